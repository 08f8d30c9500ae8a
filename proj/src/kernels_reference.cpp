#include <stdexcept>

#include "corrcs/kernels.hpp"

namespace corrcs::kernels::reference {

void gemv(const Matrix& a, std::span<const double> x, std::span<double> out) {
  if (x.size() != a.cols() || out.size() != a.rows()) {
    throw std::invalid_argument("gemv: dimension mismatch");
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    out[i] = s;
  }
}

void gemv_t(const Matrix& a, std::span<const double> y, std::span<double> out) {
  if (y.size() != a.rows() || out.size() != a.cols()) {
    throw std::invalid_argument("gemv_t: dimension mismatch");
  }
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * y[i];
    out[j] = s;
  }
}

Matrix gemm(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("gemm: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
      c(i, j) = s;
    }
  }
  return c;
}

}  // namespace corrcs::kernels::reference
