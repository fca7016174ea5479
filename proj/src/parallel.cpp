#include "pruitt/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace pruitt {
namespace {

std::atomic<unsigned> g_workers{0};

unsigned env_default() {
    if (const char* env = std::getenv("PRUITT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace

void set_worker_count(unsigned n) { g_workers.store(n); }

unsigned worker_count() {
    const unsigned n = g_workers.load();
    return n == 0 ? env_default() : n;
}

std::uint64_t block_count(std::uint64_t total, std::uint64_t block_size) {
    if (block_size == 0) throw std::invalid_argument("block_count: block_size must be positive");
    return (total + block_size - 1) / block_size;
}

void parallel_blocks(std::uint64_t total, std::uint64_t block_size,
                     const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn) {
    if (total == 0) return;
    const std::uint64_t blocks = block_count(total, block_size);
    const auto run_range = [&](std::uint64_t b) {
        const std::uint64_t begin = b * block_size;
        const std::uint64_t end = std::min(total, begin + block_size);
        fn(b, begin, end);
    };

    unsigned workers = worker_count();
    if (workers > blocks) workers = static_cast<unsigned>(blocks);
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_range(b);
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<bool> failed{false};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t b = next.fetch_add(1);
                if (b >= blocks || failed.load()) break;
                try {
                    run_range(b);
                } catch (...) {
                    failed.store(true);
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error("parallel_blocks: worker failed");
}

}  // namespace pruitt
