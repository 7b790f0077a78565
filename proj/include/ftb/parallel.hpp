#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ftb {

/// Runs fn(i) for i in [0, n) on up to `jobs` worker threads (hardware
/// concurrency when jobs <= 0). Results must be written into pre-sized
/// per-index slots; the first exception is rethrown on the caller thread.
inline void parallel_for(int n, int jobs, const std::function<void(int)> &fn) {
    if (n <= 0) return;
    int workers = jobs > 0 ? jobs
                           : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min(workers, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next(0);
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace ftb
