#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace qwave {

/// Applies f to every item on up to `workers` threads. Results keep the
/// input order; the first exception thrown by any call is rethrown.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, F&& f, int workers) {
    using R = std::decay_t<decltype(f(items.front()))>;
    std::vector<R> out(items.size());
    const int threads = std::max(1, std::min<int>(workers, static_cast<int>(items.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < items.size(); ++i) out[i] = f(items[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            try {
                out[i] = f(items[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace qwave
