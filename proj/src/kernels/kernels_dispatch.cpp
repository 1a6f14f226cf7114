#include <cstdlib>
#include <string_view>

#include "tailscope/kernels.hpp"

namespace tailscope::kernels {

#if defined(TAILSCOPE_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2() {
#if defined(TAILSCOPE_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        const char* forced = std::getenv("TAILSCOPE_KERNELS");
        if (forced && std::string_view(forced) == "scalar") return scalar();
        if (const auto* t = avx2()) return *t;
        return scalar();
    }();
    return chosen;
}

}  // namespace tailscope::kernels
