#include "dnlfront/cli.hpp"

int main(int argc, char** argv) { return dnlfront::cli::main(argc, argv); }
