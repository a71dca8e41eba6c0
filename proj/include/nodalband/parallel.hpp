#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nodalband {

inline int resolve_threads(int threads)
{
    if (threads > 0)
        return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

// Calls f(i) for i in [0, count) on up to `threads` workers. Each index is handled
// exactly once, so results written by index do not depend on the thread count.
template <class F>
void parallel_for(std::size_t count, int threads, F&& f)
{
    const int nt = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
    if (nt <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            f(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += nt)
                    f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err)
                    err = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (err)
        std::rethrow_exception(err);
}

// Pairwise (cascade) summation in index order.
inline double pairwise_sum(const double* v, std::size_t n)
{
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

} // namespace nodalband
