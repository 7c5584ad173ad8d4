#include <cstdlib>
#include <cstring>

#include "linrec/kernels.hpp"

namespace linrec::kern {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

const Ops* select() {
    const char* env = std::getenv("LINREC_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
    if (env != nullptr && std::strcmp(env, "avx2") == 0 && avx2_available()) return &avx2_ops();
    if (env == nullptr || std::strcmp(env, "auto") == 0) {
        if (avx2_available()) return &avx2_ops();
    }
#endif
    return &scalar_ops();
}

}  // namespace

const Ops& active_ops() {
    static const Ops* selected = select();
    return *selected;
}

}  // namespace linrec::kern
