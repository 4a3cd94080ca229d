// Acceptance binary: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <iostream>

#include "dnlfront/acceptance.hpp"

int main() {
    auto results = dnlfront::acceptance::run_all(std::cout);
    bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
    std::cout << (all ? "ALL PASS" : "SOME FAILED") << std::endl;
    return all ? 0 : 1;
}
