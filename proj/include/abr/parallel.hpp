#pragma once
//! Static-chunk parallel loop on std::thread; results are written by index so reductions stay ordered.

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace abr {

//! 0 means hardware concurrency.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

//! Calls body(begin, end) on contiguous chunks of [0, n); rethrows the first worker exception.
inline void parallel_for(int n, int threads, const std::function<void(int, int)>& body) {
    const int t = std::max(1, std::min(resolve_threads(threads), n));
    if (t == 1) {
        if (n > 0) body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(t);
    for (int k = 0; k < t; ++k) {
        const int begin = static_cast<int>(static_cast<long long>(n) * k / t);
        const int end = static_cast<int>(static_cast<long long>(n) * (k + 1) / t);
        pool.emplace_back([&, k, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace abr
