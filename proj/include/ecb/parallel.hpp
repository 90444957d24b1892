#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ecb {

inline unsigned resolve_threads(unsigned requested)
{
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(k) for k in [0, count) on up to `threads` workers (0 = all
/// cores). Results must be written to per-index slots; the first exception
/// thrown by any worker is rethrown on the caller's thread.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < count; k = next++) {
                    try {
                        body(k);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace ecb
