#include "cli.hpp"
#include "kitoke/blas_runtime.hpp"

int main(int argc, char** argv) {
    kitoke::retune_blas_or_continue(argv);
    return kitoke::cli::run(argc, argv);
}
