#include "linalg.hpp"

#include "kitoke/blas_runtime.hpp"

#include <cblas.h>

#include <cstdlib>
#include <cstring>
#include <mutex>

#if defined(__linux__)
#include <unistd.h>
#endif

namespace kitoke::detail {

RowBlock widen(const TensorView& view) {
    RowBlock block{view.tokens(), view.dims(), {}};
    block.values.assign(view.data().begin(), view.data().end());
    return block;
}

RowBlock gather(const TensorView& view, std::span<const std::size_t> tokens) {
    RowBlock block{tokens.size(), view.dims(), {}};
    block.values.reserve(tokens.size() * view.dims());
    for (std::size_t t : tokens) {
        const auto v = view.token(t);
        block.values.insert(block.values.end(), v.begin(), v.end());
    }
    return block;
}

void gram(const double* a, std::size_t na, const double* b, std::size_t nb, std::size_t dims,
          double* out) {
    static std::once_flag single_threaded;
    std::call_once(single_threaded, [] { openblas_set_num_threads(1); });
    if (na == 0 || nb == 0) return;
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<blasint>(na),
                static_cast<blasint>(nb), static_cast<blasint>(dims), 1.0, a,
                static_cast<blasint>(dims), b, static_cast<blasint>(dims), 0.0, out,
                static_cast<blasint>(nb));
}

double dot_sequential(std::span<const float> a, std::span<const float> b) noexcept {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) acc += static_cast<double>(a[d]) * static_cast<double>(b[d]);
    return acc;
}

double squared_norm_sequential(std::span<const float> a) noexcept {
    double acc = 0.0;
    for (float v : a) acc += static_cast<double>(v) * static_cast<double>(v);
    return acc;
}

double squared_distance_sequential(std::span<const float> a, std::span<const float> b) noexcept {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = static_cast<double>(a[d]) - static_cast<double>(b[d]);
        acc += diff * diff;
    }
    return acc;
}

} // namespace kitoke::detail

namespace kitoke {

std::string blas_kernel_name() {
    const char* name = openblas_get_corename();
    return name ? name : "";
}

void retune_blas_or_continue(char** argv) {
#if defined(__linux__) && (defined(__x86_64__) || defined(__i386__))
    if (std::getenv("OPENBLAS_CORETYPE") || argv == nullptr) return;
    if (strcasecmp(blas_kernel_name().c_str(), "prescott") != 0) return;
    const char* core = nullptr;
    if (__builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512bw") &&
        __builtin_cpu_supports("avx512dq") && __builtin_cpu_supports("avx512vl"))
        core = "SkylakeX";
    else if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        core = "Haswell";
    if (!core) return;
    ::setenv("OPENBLAS_CORETYPE", core, 1);
    ::execv("/proc/self/exe", argv);
    ::unsetenv("OPENBLAS_CORETYPE");
#else
    (void)argv;
#endif
}

} // namespace kitoke
