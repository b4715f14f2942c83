#include <atomic>
#include <cstdlib>
#include <string>

#include "eusn/errors.hpp"
#include "eusn/kernels.hpp"

namespace eusn::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(EUSN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* pick_default() {
    if (const char* env = std::getenv("EUSN_ISA")) {
        if (std::string(env) == "scalar") return &scalar_table();
    }
#if defined(EUSN_HAVE_AVX2)
    if (cpu_has_avx2()) return &avx2_table();
#endif
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{pick_default()};
    return current;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2: return cpu_has_avx2();
    }
    return false;
}

const KernelTable& table(Isa isa) {
    if (!supported(isa)) {
        throw ConfigError("kernel ISA not available: " + std::string(to_string(isa)));
    }
#if defined(EUSN_HAVE_AVX2)
    if (isa == Isa::Avx2) return avx2_table();
#endif
    return scalar_table();
}

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) { slot().store(&table(isa), std::memory_order_relaxed); }

}  // namespace eusn::kernels
