#ifndef PERMUTON_PARALLEL_HPP
#define PERMUTON_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace permuton {

/// Worker count used when a caller passes threads = 0.
inline std::size_t default_threads() {
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/**
 * Runs task(0) ... task(n_tasks - 1) on up to `threads` workers. Tasks must
 * write only to their own output slot; callers merge slots in index order,
 * which keeps results independent of the thread count.
 */
template <typename Task>
void parallel_tasks(std::size_t n_tasks, std::size_t threads, Task&& task) {
    if (threads == 0) {
        threads = default_threads();
    }
    threads = std::min(threads, n_tasks);
    if (threads <= 1) {
        for (std::size_t t = 0; t < n_tasks; ++t) {
            task(t);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t t = next++; t < n_tasks; t = next++) {
                try {
                    task(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (std::thread& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}

#endif
