#include "tflab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tflab
{
    namespace
    {
        std::atomic<unsigned> g_max_threads{0};
    }

    void set_max_threads(unsigned n) noexcept { g_max_threads = n; }

    unsigned max_threads() noexcept
    {
        const unsigned cap = g_max_threads.load();
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        return cap == 0 ? hw : std::min(cap, hw);
    }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
    {
        const std::size_t workers = std::min<std::size_t>(max_threads(), n);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                body(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
        {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                {
                    try
                    {
                        body(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool)
            t.join();
        if (failure)
            std::rethrow_exception(failure);
    }
}  // namespace tflab
