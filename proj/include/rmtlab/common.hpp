#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace rmtlab {

using Complex = std::complex<double>;

/// Spectral parameter z = E + i*eta.  Solvers require eta > 0; eta = 0 is
/// reserved for boundary-value (inversion) contexts.
struct ComplexPoint {
    double E = 0.0;
    double eta = 0.0;
    Complex z() const { return {E, eta}; }
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define RMTLAB_ERROR_TYPE(name)                                                \
    class name : public Error {                                               \
      public:                                                                  \
        using Error::Error;                                                    \
    }

RMTLAB_ERROR_TYPE(NonConvergence);
RMTLAB_ERROR_TYPE(BranchViolation);
RMTLAB_ERROR_TYPE(NoBracketing);
RMTLAB_ERROR_TYPE(ThetaOutOfRange);
RMTLAB_ERROR_TYPE(PreconditionViolated);
RMTLAB_ERROR_TYPE(InsufficientResolution);
RMTLAB_ERROR_TYPE(OrderViolation);
RMTLAB_ERROR_TYPE(StepCollapse);
RMTLAB_ERROR_TYPE(NonFiniteDensity);
RMTLAB_ERROR_TYPE(OutOfInterval);
RMTLAB_ERROR_TYPE(IndexOutOfBulk);
RMTLAB_ERROR_TYPE(TooFewSamples);
RMTLAB_ERROR_TYPE(ConfigInvalid);
RMTLAB_ERROR_TYPE(NonFinite);

#undef RMTLAB_ERROR_TYPE

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Hierarchical seed derivation: master -> experiment -> stage -> sample.
/// Stable under reordering and under adding more samples later.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                                 std::uint64_t index = 0) {
    return splitmix64(parent ^ splitmix64(fnv1a(label) ^ splitmix64(index)));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed));
    rng.discard(8);
    return rng;
}

/// Worker count: explicit request > RMT_LAB_THREADS > hardware concurrency.
int thread_count(int requested = 0);

/// Runs fn(i) for i in [0, n) on a small thread pool.  Callers write results
/// into per-index slots so the output is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

} // namespace rmtlab
