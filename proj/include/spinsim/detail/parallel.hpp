#pragma once

#include <cstddef>
#include <stdexcept>
#include <thread>
#include <vector>

namespace spinsim::detail {

/// Run fn(i) for i in [0, n) on `jobs` threads. Work is striped by index and
/// each index writes only its own slot, so results are identical for any job
/// count.
template <typename Fn>
void parallel_for_indexed(std::size_t n, int jobs, Fn&& fn) {
    if (jobs < 1) {
        throw std::invalid_argument("parallel_for_indexed: jobs must be >= 1");
    }
    if (jobs == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    const auto workers = static_cast<std::size_t>(jobs);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&fn, w, workers, n] {
            for (std::size_t i = w; i < n; i += workers) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace spinsim::detail
