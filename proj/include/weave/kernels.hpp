#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops over float32 embedding storage. Every kernel
// accumulates in double so that large dimensions do not erode the similarity
// threshold boundary. Each backend uses a fixed summation order, so results
// are reproducible for a given backend regardless of how callers partition
// work across rows.
//
// The dispatched entry points (weave::kernels::dot etc.) select the widest
// backend the CPU supports at first use. WEAVE_SIMD=scalar|avx2|neon|auto
// overrides the selection, and tests can pin a backend programmatically.

namespace weave::kernels {

enum class Backend {
    Scalar,
    Avx2,
    Neon,
};

std::string_view backend_name(Backend b);

/// True if this binary carries the backend and the CPU can run it.
bool backend_available(Backend b);

/// Backend the dispatched kernels currently use.
Backend active_backend();

/// Pin the dispatched kernels to one backend. Throws InvalidConfig if the
/// backend is unavailable on this machine.
void select_backend(Backend b);

/// Re-run automatic selection (CPU probe + WEAVE_SIMD override).
void select_backend_auto();

// Dispatched kernels.
double dot(const float* a, const float* b, std::size_t n);
double squared_norm(const float* v, std::size_t n);
double squared_l2_distance(const float* a, const float* b, std::size_t n);

// Reference implementations, always present; the equivalence baseline.
namespace scalar {
double dot(const float* a, const float* b, std::size_t n);
double squared_norm(const float* v, std::size_t n);
double squared_l2_distance(const float* a, const float* b, std::size_t n);
}  // namespace scalar

#if defined(WEAVE_HAVE_AVX2_BUILD)
namespace avx2 {
double dot(const float* a, const float* b, std::size_t n);
double squared_norm(const float* v, std::size_t n);
double squared_l2_distance(const float* a, const float* b, std::size_t n);
}  // namespace avx2
#endif

#if defined(WEAVE_HAVE_NEON_BUILD)
namespace neon {
double dot(const float* a, const float* b, std::size_t n);
double squared_norm(const float* v, std::size_t n);
double squared_l2_distance(const float* a, const float* b, std::size_t n);
}  // namespace neon
#endif

}  // namespace weave::kernels
