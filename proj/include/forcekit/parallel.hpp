#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace forcekit {

// Worker count used by grid sweeps. 0 means "machine parallelism".
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() workers. Each index is
// visited exactly once; callers write into slot i of a preallocated buffer so
// the merged result is independent of scheduling.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
}

}  // namespace forcekit
