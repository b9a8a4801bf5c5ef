#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace slimegate {

/// Calls body(i) for i in [0, count) on all hardware threads. Each index
/// runs exactly once; callers write results into slot i, so the outcome is
/// independent of scheduling. The first exception is rethrown.
template <typename F>
void parallel_for(int count, F&& body) {
    const int workers = std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace slimegate
