#pragma once

#include <string>

namespace kitoke {

// Kernel family the BLAS library picked at load time (e.g. "Haswell").
std::string blas_kernel_name();

// OpenBLAS builds with runtime dispatch fall back to their generic x86-64
// kernel when CPUID looks unfamiliar, as it often does in VMs. If that
// happened on a CPU with AVX2 or AVX-512, re-executes the current process
// with OPENBLAS_CORETYPE set. Returns normally when nothing needs doing, when
// the variable is already set, or if the re-exec fails.
void retune_blas_or_continue(char** argv);

} // namespace kitoke
