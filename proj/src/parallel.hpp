#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace hybrid::detail {

// Worker budget for internally parallel stages; HYBRID_RANK_THREADS caps it.
inline std::size_t thread_budget() {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("HYBRID_RANK_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return n;
}

// Static block partition of [0, count) across at most thread_budget()
// workers. fn(begin, end) must not touch another block's output.
template <typename Fn>
void parallel_blocks(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min(thread_budget(), count == 0 ? std::size_t{1} : count);
    if (workers <= 1) {
        fn(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace hybrid::detail
