#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include <omp.h>

#include "ctl/rng.hpp"

namespace ctl {

// Thread cap from CTL_THREADS, else the OpenMP default.
inline int thread_count() {
    if (const char* env = std::getenv("CTL_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return omp_get_max_threads();
}

// Runs fn(i, rng) for i in [0, count) with rng keyed by derive_key(key, i).
// Results land in replica order, so output does not depend on the thread count.
template <class Fn>
auto replicate(std::size_t count, std::uint64_t key, Fn&& fn, int threads = 0) {
    using T = decltype(fn(std::size_t{0}, std::declval<Rng&>()));
    std::vector<T> out(count);
    const int nt = threads > 0 ? threads : thread_count();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
        Rng rng(derive_key(key, static_cast<std::uint64_t>(i)));
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i), rng);
    }
    return out;
}

// Serial reference with identical streams.
template <class Fn>
auto replicate_serial(std::size_t count, std::uint64_t key, Fn&& fn) {
    using T = decltype(fn(std::size_t{0}, std::declval<Rng&>()));
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_key(key, static_cast<std::uint64_t>(i)));
        out.push_back(fn(i, rng));
    }
    return out;
}

}  // namespace ctl
