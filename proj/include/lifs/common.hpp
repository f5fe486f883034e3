#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lifs {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MismatchedImage : Error { using Error::Error; };
struct OverlappingImages : Error { using Error::Error; };
struct DomainOutsideUnit : Error { using Error::Error; };
struct EmptySet : Error { using Error::Error; };
struct NotContractive : Error { using Error::Error; };
struct NotAdmissible : Error { using Error::Error; };
struct GridNotAdmissible : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct InvalidP : Error { using Error::Error; };
struct ContractivityViolated : Error { using Error::Error; };
struct SingularConditions : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };
struct ZeroLeadingCoefficient : Error { using Error::Error; };
struct DegenerateHankel : Error { using Error::Error; };
struct ThetaOutOfRange : Error { using Error::Error; };
struct NonDyadicPoint : Error { using Error::Error; };
struct SingularNormalEquations : Error { using Error::Error; };
struct GammaNotLessThanOne : Error { using Error::Error; };
struct GraphInvarianceViolated : Error { using Error::Error; };
struct IncompatibleBoundary : Error { using Error::Error; };

/// Half-open interval [lo, hi) on the real line.  The convention used
/// throughout: membership is lo <= x < hi, except where a cell is
/// explicitly flagged as closed at its right end (the last partition cell).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x < hi; }
    bool contains_closed(double x) const { return lo <= x && x <= hi; }
};

/// Deterministic 64-bit generator used everywhere randomness is needed.
/// xorshift* with an explicit 53-bit mantissa mapping, so streams are
/// reproducible bit-for-bit across platforms (std distributions are not).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}

    std::uint64_t next_u64() {
        // xorshift* is used instead of std::mt19937_64 purely for
        // compactness; the algorithm is fixed and documented here.
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    /// Uniform in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

/// Format a double so that it round-trips exactly (17 significant digits).
std::string format_full(double x);

}  // namespace lifs
