//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <atomic>
#include <cstdlib>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

namespace kinklap {

/// Worker count: KINKLAP_THREADS if set (>=1), else hardware concurrency.
/// By contract, results never depend on this value.
inline unsigned worker_count() {
    if (const char* env = std::getenv("KINKLAP_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

namespace detail {
inline thread_local int parallel_depth = 0;
}

/// Run fn(i) for i in [0, n). Tasks must write to disjoint state; the work
/// distribution is dynamic but outputs must be indexed so ordering does not
/// matter. Nested calls run serially.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = worker_count();
    if (workers <= 1 || n <= 1 || detail::parallel_depth > 0) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        ++detail::parallel_depth;
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
        --detail::parallel_depth;
    };
    std::vector<std::thread> pool;
    unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    pool.reserve(spawn);
    for (unsigned w = 0; w + 1 < spawn; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

}  // namespace kinklap
