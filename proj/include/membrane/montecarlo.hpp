#ifndef MEMBRANE_MONTECARLO_HPP
#define MEMBRANE_MONTECARLO_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "membrane/model.hpp"

// Seeded simulation of T_n for any model.
//
// Replicate i draws from its own stream, seeded with splitmix64(seed ^ splitmix64(i)),
// where splitmix64 is the finalizer
//   z += 0x9e3779b97f4a7c15; z = (z ^ z >> 30) * 0xbf58476d1ce4e5b9;
//   z = (z ^ z >> 27) * 0x94d049bb133111eb; return z ^ z >> 31
// and successive draws advance the same recurrence. A draw x becomes the uniform
// (x >> 11) * 2^-53, and a walker steps up when that uniform is < p. Because every
// replicate depends only on (seed, i), any split of the replicates across workers
// yields the same counts.

namespace membrane::montecarlo {

struct McEstimate {
    std::size_t n = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double p = 0;                      ///< p as used by the simulator (rounded once)
    std::vector<std::uint64_t> counts;  ///< counts[k] = replicates with T_n = k
    std::vector<double> pmf_hat;
    std::vector<double> stderr_hat;  ///< sqrt(pmf_hat (1 - pmf_hat) / samples)
};

/// The mixing function above.
std::uint64_t splitmix64(std::uint64_t z);

/// Worker count from MEMBRANE_SOJOURN_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Simulates `samples` replicates on `workers` threads (0 = worker_count()).
template <Field T>
McEstimate simulate_sojourn(const WalkModel<T>& m, std::size_t n, std::uint64_t samples, std::uint64_t seed,
                            unsigned workers = 0);

}  // namespace membrane::montecarlo

#endif  // MEMBRANE_MONTECARLO_HPP
