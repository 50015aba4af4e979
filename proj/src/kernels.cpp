#include "arena/kernels.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace arena::kernels {

namespace {

double k_sum(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i];
    return acc;
}

double k_sum_sq(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i] * v[i];
    return acc;
}

double k_dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double k_sum_abs_diff(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

double k_sum_sq_diff(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double k_sum_abs_rel_diff(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]) / std::fabs(a[i]);
    return acc;
}

void k_min_max(const double* v, std::size_t n, double* mn, double* mx) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] < lo) lo = v[i];
        if (v[i] > hi) hi = v[i];
    }
    *mn = lo;
    *mx = hi;
}

void k_weighted_accumulate(double* acc, double w, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += w * x[i];
}

constexpr KernelTable kScalar = {
    k_sum, k_sum_sq, k_dot, k_sum_abs_diff, k_sum_sq_diff, k_sum_abs_rel_diff,
    k_min_max, k_weighted_accumulate,
};

bool cpu_has_avx2() {
#if defined(ARENA_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

std::atomic<const KernelTable*> g_forced{nullptr};
std::atomic<Isa> g_forced_isa{Isa::scalar};
std::atomic<bool> g_is_forced{false};

const KernelTable* detect() {
#if defined(ARENA_HAVE_AVX2_TU)
    if (cpu_has_avx2()) return &avx2_table();
#endif
    return &kScalar;
}

Isa detect_isa() {
#if defined(ARENA_HAVE_AVX2_TU)
    if (cpu_has_avx2()) return Isa::avx2;
#endif
    return Isa::scalar;
}

const KernelTable& table() {
    if (g_is_forced.load(std::memory_order_acquire)) {
        return *g_forced.load(std::memory_order_acquire);
    }
    static const KernelTable* auto_table = detect();
    return *auto_table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

Isa active_isa() {
    if (g_is_forced.load(std::memory_order_acquire)) return g_forced_isa.load();
    static Isa auto_isa = detect_isa();
    return auto_isa;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::avx2: return "avx2";
        case Isa::scalar: break;
    }
    return "scalar";
}

bool isa_available(Isa isa) {
    if (isa == Isa::scalar) return true;
    return cpu_has_avx2();
}

void force_isa(Isa isa) {
    const KernelTable* t = &kScalar;
#if defined(ARENA_HAVE_AVX2_TU)
    if (isa == Isa::avx2 && cpu_has_avx2()) t = &avx2_table();
#endif
    g_forced.store(t, std::memory_order_release);
    g_forced_isa.store(isa == Isa::avx2 && t != &kScalar ? Isa::avx2 : Isa::scalar);
    g_is_forced.store(true, std::memory_order_release);
}

void reset_isa() { g_is_forced.store(false, std::memory_order_release); }

double sum(std::span<const double> v) { return table().sum(v.data(), v.size()); }
double sum_sq(std::span<const double> v) { return table().sum_sq(v.data(), v.size()); }
double dot(std::span<const double> a, std::span<const double> b) {
    return table().dot(a.data(), b.data(), a.size());
}
double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
    return table().sum_abs_diff(a.data(), b.data(), a.size());
}
double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
    return table().sum_sq_diff(a.data(), b.data(), a.size());
}
double sum_abs_rel_diff(std::span<const double> a, std::span<const double> b) {
    return table().sum_abs_rel_diff(a.data(), b.data(), a.size());
}
std::pair<double, double> min_max(std::span<const double> v) {
    double mn, mx;
    table().min_max(v.data(), v.size(), &mn, &mx);
    return {mn, mx};
}
void weighted_accumulate(std::span<double> acc, double w, std::span<const double> x) {
    table().weighted_accumulate(acc.data(), w, x.data(), x.size());
}

}  // namespace arena::kernels
