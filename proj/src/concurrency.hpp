#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <semaphore>
#include <thread>
#include <vector>

namespace cvad {

// Runs fn(i) for i in [0, n) on up to max_workers threads and returns the
// results in index order, so the output never depends on completion order.
// The first exception thrown by any task is rethrown after all workers join.
template <typename Fn>
auto parallel_map(std::size_t n, int max_workers, Fn fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
    using R = decltype(fn(std::size_t{0}));
    std::vector<R> results(n);
    if (n == 0) return results;
    if (max_workers < 1) max_workers = 1;

    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(max_workers), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n); // stop handing out work
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (first_error) std::rethrow_exception(first_error);
    return results;
}

// Counting semaphore wrapper used to bound in-flight backend requests
// across threads.
class InflightLimit {
public:
    explicit InflightLimit(int limit) : sem_(limit < 1 ? 1 : limit) {}

    class Guard {
    public:
        explicit Guard(std::counting_semaphore<>& s) : sem_(s) { sem_.acquire(); }
        ~Guard() { sem_.release(); }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        std::counting_semaphore<>& sem_;
    };

    Guard acquire() { return Guard(sem_); }

private:
    std::counting_semaphore<> sem_;
};

} // namespace cvad
