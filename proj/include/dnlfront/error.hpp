#pragma once

#include <stdexcept>
#include <string>

namespace dnlfront {

// Base of every library failure. code() is the machine-readable tag printed by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define DNLFRONT_ERROR(Name, tag)                                        \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(tag, what) {}     \
    };

// model
DNLFRONT_ERROR(RegimeError, "regime")
DNLFRONT_ERROR(DimensionError, "dimension")
DNLFRONT_ERROR(SignPatternError, "sign-pattern")
DNLFRONT_ERROR(DegeneracyError, "degeneracy")
// waves
DNLFRONT_ERROR(IntegrationError, "integration")
DNLFRONT_ERROR(SeedError, "seed")
DNLFRONT_ERROR(AmbiguousError, "ambiguous")
DNLFRONT_ERROR(BracketError, "bracket")
DNLFRONT_ERROR(ConvergenceError, "convergence")
DNLFRONT_ERROR(NonCriticalError, "non-critical")
DNLFRONT_ERROR(QuadratureError, "quadrature")
DNLFRONT_ERROR(ExtrapolationError, "extrapolation")
DNLFRONT_ERROR(FitError, "fit")
DNLFRONT_ERROR(SingularityError, "singularity")
DNLFRONT_ERROR(NoExitError, "no-exit")
// pde
DNLFRONT_ERROR(ConstraintError, "constraint")
DNLFRONT_ERROR(GridError, "grid")
DNLFRONT_ERROR(CFLError, "cfl")
DNLFRONT_ERROR(NegativityError, "negativity")
DNLFRONT_ERROR(WindowError, "window")
// analysis
DNLFRONT_ERROR(RankError, "rank")
DNLFRONT_ERROR(InconclusiveError, "inconclusive")
// cli
DNLFRONT_ERROR(ParseError, "parse")
DNLFRONT_ERROR(UnknownKeyError, "unknown-key")
DNLFRONT_ERROR(MissingSectionError, "missing-section")
DNLFRONT_ERROR(UsageError, "usage")

#undef DNLFRONT_ERROR

}  // namespace dnlfront
