#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <string_view>
#include <thread>
#include <type_traits>
#include <vector>

namespace depthlab {

// splitmix64 step; used to derive independent per-instance seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
    return mix64(mix64(base ^ h) + index);
}

// Evaluates f(0..count-1) on up to `threads` workers. Results come back in index order, so the
// output never depends on scheduling. The exception of the lowest failing index is rethrown.
template <class F>
auto parallel_map(size_t count, int threads, F&& f) -> std::vector<std::invoke_result_t<F&, size_t>> {
    using T = std::invoke_result_t<F&, size_t>;
    std::vector<T> out(count);
    std::vector<std::exception_ptr> errs(count);
    const size_t workers = std::min<size_t>(std::max(1, threads), std::max<size_t>(count, 1));
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next++; i < count; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace depthlab
