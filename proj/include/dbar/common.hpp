#pragma once

#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dbar {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

/// Evaluation point lies outside the region an operator is defined on.
struct OutOfDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Point is too close to the unit circle for the trapezoid Cauchy kernel.
/// Carries the margin the caller should respect.
struct NearBoundaryError : std::runtime_error {
    double margin;
    explicit NearBoundaryError(const std::string& what, double m)
        : std::runtime_error(what), margin(m) {}
};

/// Finite-difference stencil would leave the closed polydisc.
struct StencilOutOfDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two coordinate moduli coincide; the point sits on a sector boundary.
struct SectorTieError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Henkin sign calibration found zero or more than one admissible table.
struct CalibrationAmbiguousError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A symbolic (0,1)-form failed the exact closedness check.
struct ClosednessViolationError : std::runtime_error {
    int index_i = 0, index_j = 0;
    ClosednessViolationError(const std::string& what, int i, int j)
        : std::runtime_error(what), index_i(i), index_j(j) {}
};

// ---------------------------------------------------------------------------
// Threading
// ---------------------------------------------------------------------------

/// Worker cap: DBAR_THREADS if set, otherwise hardware concurrency.
inline unsigned thread_budget() {
    if (const char* env = std::getenv("DBAR_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Static block partition of [0, count). Results must not depend on the
/// partition; each index is processed exactly once.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    unsigned workers = thread_budget();
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    if (workers > count) workers = static_cast<unsigned>(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Portable seeded RNG
// ---------------------------------------------------------------------------

/// splitmix64: tiny, stable across platforms, good enough for samplers.
/// std::mt19937 distributions are not bit-portable, so we avoid them.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::uint64_t state_;
};

}  // namespace dbar
