#include "optsub/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace optsub::kernels {

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* pick(const std::string& name) {
    if (name == "scalar") return &scalar_table();
    if (name == "avx2") {
        const KernelTable* t = avx2_table();
        if (!t) throw std::runtime_error("AVX2 kernels unavailable on this CPU/build");
        return t;
    }
    if (name == "auto") {
        const KernelTable* t = avx2_table();
        return t ? t : &scalar_table();
    }
    throw std::runtime_error("unknown kernel table: " + name);
}

const KernelTable* initial() {
    if (const char* env = std::getenv("OPTSUB_KERNELS")) return pick(env);
    return pick("auto");
}

}  // namespace

const KernelTable& active() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        t = initial();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void force(const std::string& name) {
    g_active.store(pick(name), std::memory_order_release);
}

}  // namespace optsub::kernels
