#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "lflx/kernels.hpp"

namespace lflx::kern {

namespace {

std::atomic<const Backend*> g_active{nullptr};

const Backend* pick_default() {
    if (const char* env = std::getenv("LFLX_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_backend();
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_available())
                throw std::runtime_error("LFLX_SIMD=avx2 requested but CPU lacks AVX2/FMA");
            return &avx2_backend();
        }
        // anything else (including "auto") falls through to detection
    }
    return avx2_available() ? &avx2_backend() : &scalar_backend();
}

}  // namespace

const Backend& active() {
    const Backend* b = g_active.load(std::memory_order_acquire);
    if (!b) {
        b = pick_default();
        g_active.store(b, std::memory_order_release);
    }
    return *b;
}

void set_backend(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        g_active.store(&scalar_backend(), std::memory_order_release);
    } else if (std::strcmp(name, "avx2") == 0) {
        if (!avx2_available())
            throw std::runtime_error("set_backend: CPU lacks AVX2/FMA");
        g_active.store(&avx2_backend(), std::memory_order_release);
    } else if (std::strcmp(name, "auto") == 0) {
        g_active.store(avx2_available() ? &avx2_backend() : &scalar_backend(),
                       std::memory_order_release);
    } else {
        throw std::invalid_argument("set_backend: unknown backend name");
    }
}

}  // namespace lflx::kern
