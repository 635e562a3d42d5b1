#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace ncmatch {

/// Deterministic fork-join helper. Bodies must write only to their own index;
/// all merging happens after the join, so results are identical for any
/// worker count. Nested calls run sequentially to keep the fan-out bounded.
class ThreadPool {
public:
    explicit ThreadPool(unsigned threads = 1) : threads_(threads == 0 ? hardware() : threads) {}

    unsigned threads() const { return threads_; }

    template <typename F>
    void for_n(std::size_t n, F&& body) const {
        if (n == 0) return;
        if (threads_ <= 1 || n == 1 || in_worker()) {
            for (std::size_t i = 0; i < n; ++i) body(i);
            return;
        }
        unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads_, n));
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> crew;
        crew.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            crew.emplace_back([&] {
                in_worker() = true;
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
                in_worker() = false;
            });
        }
        for (auto& th : crew) th.join();
    }

private:
    static unsigned hardware() {
        unsigned h = std::thread::hardware_concurrency();
        return h == 0 ? 1 : h;
    }
    static bool& in_worker() {
        thread_local bool flag = false;
        return flag;
    }
    unsigned threads_;
};

/// Simulated parallel-round accounting: a parallel-for costs one round plus
/// the deepest round count among its bodies; sequential steps add up.
struct RoundCost {
    std::int64_t rounds = 0;

    void step(std::int64_t k = 1) { rounds += k; }
    void parallel_children(std::int64_t max_child_rounds) { rounds += 1 + max_child_rounds; }
};

struct RunStats {
    std::uint64_t oracle_calls = 0;
    std::uint64_t cache_hits = 0;
    std::int64_t iterations = 0;       // total PartialMatching loop iterations
    std::int64_t depth = 0;            // deepest PerfectMatching recursion
    std::int64_t rounds = 0;           // simulated parallel rounds
    std::int64_t depth_bound_violations = 0;
};

namespace instrumentation {

/// Counts contraction attempts on disconnected sets (they also throw).
inline std::atomic<std::uint64_t>& disconnected_contractions() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}

}  // namespace instrumentation

}  // namespace ncmatch
