#include "weave/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "weave/errors.hpp"

namespace weave::kernels {

namespace scalar {

double dot(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

double squared_norm(const float* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(v[i]) * static_cast<double>(v[i]);
    }
    return acc;
}

double squared_l2_distance(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    return acc;
}

}  // namespace scalar

namespace {

struct Vtable {
    double (*dot)(const float*, const float*, std::size_t);
    double (*squared_norm)(const float*, std::size_t);
    double (*squared_l2_distance)(const float*, const float*, std::size_t);
};

constexpr Vtable kScalarVtable{scalar::dot, scalar::squared_norm, scalar::squared_l2_distance};

#if defined(WEAVE_HAVE_AVX2_BUILD)
constexpr Vtable kAvx2Vtable{avx2::dot, avx2::squared_norm, avx2::squared_l2_distance};
#endif
#if defined(WEAVE_HAVE_NEON_BUILD)
constexpr Vtable kNeonVtable{neon::dot, neon::squared_norm, neon::squared_l2_distance};
#endif

bool cpu_has_avx2() {
#if defined(WEAVE_HAVE_AVX2_BUILD) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Vtable* vtable_for(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return &kScalarVtable;
        case Backend::Avx2:
#if defined(WEAVE_HAVE_AVX2_BUILD)
            return &kAvx2Vtable;
#else
            return nullptr;
#endif
        case Backend::Neon:
#if defined(WEAVE_HAVE_NEON_BUILD)
            return &kNeonVtable;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

Backend pick_auto() {
    const char* env = std::getenv("WEAVE_SIMD");
    if (env != nullptr) {
        std::string s(env);
        if (s == "scalar") return Backend::Scalar;
        if (s == "avx2" && backend_available(Backend::Avx2)) return Backend::Avx2;
        if (s == "neon" && backend_available(Backend::Neon)) return Backend::Neon;
        // Unknown or unavailable request falls through to the probe.
    }
#if defined(WEAVE_HAVE_NEON_BUILD)
    return Backend::Neon;
#else
    if (cpu_has_avx2()) return Backend::Avx2;
    return Backend::Scalar;
#endif
}

std::atomic<const Vtable*> g_active{nullptr};
std::atomic<Backend> g_active_backend{Backend::Scalar};

const Vtable* active_vtable() {
    const Vtable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        select_backend_auto();
        t = g_active.load(std::memory_order_acquire);
    }
    return t;
}

}  // namespace

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

bool backend_available(Backend b) {
    if (b == Backend::Scalar) return true;
    if (b == Backend::Avx2) return cpu_has_avx2();
#if defined(WEAVE_HAVE_NEON_BUILD)
    if (b == Backend::Neon) return true;
#endif
    return false;
}

Backend active_backend() {
    active_vtable();
    return g_active_backend.load(std::memory_order_acquire);
}

void select_backend(Backend b) {
    if (!backend_available(b)) {
        raise(ErrorCode::InvalidConfig,
              "SIMD backend '" + std::string(backend_name(b)) + "' is not available on this machine");
    }
    g_active_backend.store(b, std::memory_order_release);
    g_active.store(vtable_for(b), std::memory_order_release);
}

void select_backend_auto() {
    select_backend(pick_auto());
}

double dot(const float* a, const float* b, std::size_t n) {
    return active_vtable()->dot(a, b, n);
}

double squared_norm(const float* v, std::size_t n) {
    return active_vtable()->squared_norm(v, n);
}

double squared_l2_distance(const float* a, const float* b, std::size_t n) {
    return active_vtable()->squared_l2_distance(a, b, n);
}

}  // namespace weave::kernels
