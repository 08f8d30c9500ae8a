#pragma once

// Dense linear-algebra kernels. The kernels in `corrcs::kernels` are the
// OpenMP-parallel versions used by the solvers; `corrcs::kernels::reference`
// holds plain serial loops kept as the test oracle and benchmark baseline.
//
// Every parallel kernel assigns each output entry to exactly one thread and
// accumulates in a fixed order, so results do not depend on the thread count.
// Parallel regions are skipped when already inside one (trial-level
// parallelism in the harness owns the cores in that case).

#include <span>

#include "corrcs/matrix.hpp"

namespace corrcs::kernels {

/// out = A * x
void gemv(const Matrix& a, std::span<const double> x, std::span<double> out);

/// out = A^T * y
void gemv_t(const Matrix& a, std::span<const double> y, std::span<double> out);

/// C = A * B
Matrix gemm(const Matrix& a, const Matrix& b);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm1(std::span<const double> x);
double norm_inf(std::span<const double> x);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

namespace reference {

void gemv(const Matrix& a, std::span<const double> x, std::span<double> out);
void gemv_t(const Matrix& a, std::span<const double> y, std::span<double> out);
Matrix gemm(const Matrix& a, const Matrix& b);

}  // namespace reference

/// Number of threads kernels and the harness may use (1 without OpenMP).
int max_threads();
/// Sets the worker count for subsequent parallel regions; ignored without OpenMP.
void set_threads(int n);

}  // namespace corrcs::kernels
