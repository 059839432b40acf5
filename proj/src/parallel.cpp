#include "optsub/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>

namespace optsub {
namespace {

unsigned initial_threads() {
    if (const char* env = std::getenv("OPTSUB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

std::atomic<unsigned> g_threads{0};

void run_workers(unsigned n_workers, const std::function<void()>& body) {
    std::exception_ptr error;
    std::mutex error_mutex;
    auto guarded = [&] {
        try {
            body();
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_workers - 1);
    for (unsigned t = 1; t < n_workers; ++t) pool.emplace_back(guarded);
    guarded();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

unsigned worker_threads() {
    unsigned v = g_threads.load(std::memory_order_relaxed);
    if (v == 0) {
        v = initial_threads();
        g_threads.store(v, std::memory_order_relaxed);
    }
    return v;
}

void set_worker_threads(unsigned n) {
    g_threads.store(n ? n : 1, std::memory_order_relaxed);
}

void parallel_blocks(std::size_t n, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (block_size == 0) block_size = 1;
    const std::size_t n_blocks = (n + block_size - 1) / block_size;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(worker_threads(), n_blocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b)
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    run_workers(workers, [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        }
    });
}

void parallel_for_each(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_blocks(n, 1, [&](std::size_t, std::size_t i, std::size_t) { fn(i); });
}

}  // namespace optsub
