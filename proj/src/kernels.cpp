#include "pruitt/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pruitt::kernels {
namespace {

const Backend* select_initial() {
    if (const char* env = std::getenv("PRUITT_KERNELS")) {
        std::string_view want{env};
        if (want == "scalar") return &scalar();
        if (want == "avx2") {
            if (const Backend* b = avx2()) return b;
            // requested but unavailable: fall through to scalar
            return &scalar();
        }
    }
    if (const Backend* b = avx2()) return b;
    return &scalar();
}

const Backend*& active_slot() {
    static const Backend* slot = select_initial();
    return slot;
}

}  // namespace

const Backend& active() { return *active_slot(); }

void force_backend(std::string_view name) {
    if (name == "scalar") {
        active_slot() = &scalar();
        return;
    }
    if (name == "avx2") {
        const Backend* b = avx2();
        if (b == nullptr) throw std::runtime_error("kernels: avx2 backend not available on this CPU");
        active_slot() = b;
        return;
    }
    throw std::invalid_argument("kernels: unknown backend '" + std::string(name) + "'");
}

}  // namespace pruitt::kernels
