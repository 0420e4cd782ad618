#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rageval::detail {

/// Runs fn(i) for i in [0, n) on at most `parallelism` threads. Work is
/// handed out by index, so callers that write results into slot i get the
/// same output regardless of scheduling. The first exception thrown is
/// rethrown after all workers finish; remaining indices are skipped.
template <class Fn>
void parallel_for(std::size_t n, std::size_t parallelism, Fn&& fn) {
    const std::size_t workers = std::min(std::max<std::size_t>(parallelism, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n || stop.load()) {
                        return;
                    }
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) {
                            first_error = std::current_exception();
                        }
                        stop.store(true);
                    }
                }
            });
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

}  // namespace rageval::detail
