#ifndef SPREADFRACT_DETAIL_PARALLEL_HPP
#define SPREADFRACT_DETAIL_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "../detail/text.hpp"

namespace spreadfract {

/// Worker count: SPREADFRACT_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
inline unsigned default_thread_count()
{
    if (const char* env = std::getenv("SPREADFRACT_THREADS")) {
        if (auto n = detail::parse_int<unsigned>(env); n && *n > 0)
            return *n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

/// Runs fn(i) for i in [0, count). Each index is processed by exactly one
/// worker, so results written to slot i do not depend on the thread count.
template<class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    if (threads == 0)
        threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads - 1);
        for (unsigned t = 1; t < threads; ++t)
            pool.emplace_back(worker);
        worker();
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace detail
} // namespace spreadfract

#endif // SPREADFRACT_DETAIL_PARALLEL_HPP
