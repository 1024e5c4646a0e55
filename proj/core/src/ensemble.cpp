#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "dyner/simulator.hpp"

namespace dyner {

TrajectoryEnsemble simulate_ensemble(std::uint64_t root_seed, std::size_t reps,
                                     const PathTask& task, unsigned threads) {
  TrajectoryEnsemble ensemble;
  ensemble.root_seed = root_seed;
  ensemble.paths.resize(reps);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < reps; i = next++) {
      try {
        ensemble.paths[i] = task(RngStream{root_seed, i});
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);
  return ensemble;
}

}  // namespace dyner
