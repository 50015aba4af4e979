#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>

// Data-parallel inner loops shared by the error metrics, the embedding
// similarity math and forecast aggregation. Scalar implementations are the
// reference; an AVX2 variant is selected at runtime when the CPU supports it
// and is equivalence-tested against the scalar path.
namespace arena::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
std::string_view isa_name(Isa);
bool isa_available(Isa);
// Pin the dispatch for equivalence tests; Isa::scalar always works.
void force_isa(Isa);
void reset_isa();

double sum(std::span<const double> v);
double sum_sq(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double sum_abs_diff(std::span<const double> a, std::span<const double> b);
double sum_sq_diff(std::span<const double> a, std::span<const double> b);
// sum over i of |a[i]-b[i]| / |a[i]|
double sum_abs_rel_diff(std::span<const double> a, std::span<const double> b);
std::pair<double, double> min_max(std::span<const double> v);
// acc[i] += w * x[i]
void weighted_accumulate(std::span<double> acc, double w, std::span<const double> x);

struct KernelTable {
    double (*sum)(const double*, std::size_t);
    double (*sum_sq)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum_abs_diff)(const double*, const double*, std::size_t);
    double (*sum_sq_diff)(const double*, const double*, std::size_t);
    double (*sum_abs_rel_diff)(const double*, const double*, std::size_t);
    void (*min_max)(const double*, std::size_t, double*, double*);
    void (*weighted_accumulate)(double*, double, const double*, std::size_t);
};

const KernelTable& scalar_table();
#if defined(ARENA_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif

}  // namespace arena::kernels
