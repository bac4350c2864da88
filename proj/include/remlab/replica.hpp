#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include "remlab/models.hpp"
#include "remlab/rng.hpp"

namespace remlab {

// Replicas are processed in fixed-size batches so that floating-point
// results do not depend on the number of threads.
inline constexpr std::size_t kReplicaBatch = 64;

// Runs `replicas` disorder replicas on one sampler. Replica r draws from
// derive_seed(seed, "replica", r). f(r, energies) is called once per
// replica; results come back in replica order.
template <class T, class F>
std::vector<T> map_replicas(const EnergySampler& sampler, std::uint64_t seed, std::size_t replicas, F&& f) {
  std::vector<T> out(replicas);
  const std::size_t batches = (replicas + kReplicaBatch - 1) / kReplicaBatch;
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t bi = 0; bi < batches; ++bi) {
    try {
      const std::size_t lo = bi * kReplicaBatch;
      const std::size_t hi = std::min(replicas, lo + kReplicaBatch);
      std::vector<Rng> rngs;
      rngs.reserve(hi - lo);
      for (std::size_t r = lo; r < hi; ++r) rngs.push_back(make_rng(seed, "replica", r));
      const Eigen::MatrixXd energies = sampler.sample_batch(rngs);
      for (std::size_t r = lo; r < hi; ++r) {
        const Eigen::VectorXd col = energies.col(static_cast<Eigen::Index>(r - lo));
        out[r] = f(r, col);
      }
    } catch (...) {
#pragma omp critical(remlab_replica_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace remlab
