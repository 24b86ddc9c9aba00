#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace lacc {

// Work is always cut into the same fixed number of streams and merged in
// stream order, so every statistic is bit-identical for any --threads value.
inline constexpr std::size_t kStreams = 64;

// Running mean/variance accumulator with an order-stable merge.
struct Welford {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Welford& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        mean += d * nb / (na + nb);
        m2 += o.m2 + d * d * na * nb / (na + nb);
        n += o.n;
    }

    [[nodiscard]] double variance() const {
        return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    }
    [[nodiscard]] double std_error() const {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

// Runs fn(stream, begin, end) over kStreams contiguous chunks of [0, n_items).
// Chunk boundaries depend only on n_items, never on the thread count.
inline void run_streams(std::size_t n_items, int n_threads,
                        const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    auto chunk = [n_items](std::size_t s) { return n_items * s / kStreams; };
    if (n_threads <= 1) {
        for (std::size_t s = 0; s < kStreams; ++s)
            if (chunk(s) < chunk(s + 1)) fn(s, chunk(s), chunk(s + 1));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t s = next.fetch_add(1); s < kStreams; s = next.fetch_add(1))
            if (chunk(s) < chunk(s + 1)) fn(s, chunk(s), chunk(s + 1));
    };
    std::vector<std::thread> pool;
    const int workers = std::min<int>(n_threads, static_cast<int>(kStreams));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
}

}
