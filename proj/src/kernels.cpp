#include "corrcs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace corrcs::kernels {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = std::size_t{1} << 16;
// Column block width for the transposed product.
constexpr std::size_t kColumnBlock = 256;

bool go_parallel(std::size_t work) {
#ifdef _OPENMP
  return work >= kParallelWork && !omp_in_parallel() && omp_get_max_threads() > 1;
#else
  (void)work;
  return false;
#endif
}

// Four independent accumulators; the summation order is fixed by the length.
inline double dot_unrolled(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

void gemv(const Matrix& a, std::span<const double> x, std::span<double> out) {
  if (x.size() != a.cols() || out.size() != a.rows()) {
    throw std::invalid_argument("gemv: dimension mismatch");
  }
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::size_t cols = a.cols();
  const double* base = a.data().data();
  const double* xp = x.data();
  double* op = out.data();
#pragma omp parallel for schedule(static) if (go_parallel(a.rows() * cols))
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    op[i] = dot_unrolled(base + static_cast<std::size_t>(i) * cols, xp, cols);
  }
}

void gemv_t(const Matrix& a, std::span<const double> y, std::span<double> out) {
  if (y.size() != a.rows() || out.size() != a.cols()) {
    throw std::invalid_argument("gemv_t: dimension mismatch");
  }
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  const double* base = a.data().data();
  const double* yp = y.data();
  double* op = out.data();
  const auto blocks = static_cast<std::ptrdiff_t>((cols + kColumnBlock - 1) / kColumnBlock);
#pragma omp parallel for schedule(static) if (go_parallel(rows * cols))
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t j0 = static_cast<std::size_t>(b) * kColumnBlock;
    const std::size_t j1 = std::min(cols, j0 + kColumnBlock);
    std::fill(op + j0, op + j1, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double yi = yp[i];
      if (yi == 0.0) continue;
      const double* r = base + i * cols;
      for (std::size_t j = j0; j < j1; ++j) op[j] += yi * r[j];
    }
  }
}

Matrix gemm(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("gemm: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static) if (go_parallel(a.rows() * a.cols() * b.cols()))
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    auto crow = c.row(static_cast<std::size_t>(i));
    auto arow = a.row(static_cast<std::size_t>(i));
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = arow[p];
      if (aip == 0.0) continue;
      auto brow = b.row(p);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aip * brow[j];
    }
  }
  return c;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  return dot_unrolled(x.data(), y.data(), x.size());
}

double norm2(std::span<const double> x) { return std::sqrt(dot_unrolled(x.data(), x.data(), x.size())); }

double norm1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace corrcs::kernels
