// Copyright 2026 The dmdn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dmdn {

namespace detail {
inline std::atomic<unsigned>& thread_count_slot() {
    static std::atomic<unsigned> slot{[] {
        if (const char* env = std::getenv("DMDN_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) return static_cast<unsigned>(v);
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }()};
    return slot;
}
}  // namespace detail

/// Worker count used by every pixel kernel. Results never depend on it:
/// kernels only parallelize over independent outputs and all reductions
/// are combined in a fixed order.
inline unsigned thread_count() { return detail::thread_count_slot().load(); }
inline void set_thread_count(unsigned n) { detail::thread_count_slot().store(std::max(1u, n)); }

/// Calls fn(i) for every i in [begin, end), statically partitioned into
/// contiguous chunks. fn must only write state owned by index i.
template <typename Fn>
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end, Fn&& fn) {
    const std::ptrdiff_t n = end - begin;
    if (n <= 0) return;
    const auto workers = static_cast<std::ptrdiff_t>(std::min<std::ptrdiff_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::ptrdiff_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::ptrdiff_t w = 0; w < workers; ++w) {
        const std::ptrdiff_t lo = begin + n * w / workers;
        const std::ptrdiff_t hi = begin + n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::ptrdiff_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace dmdn
