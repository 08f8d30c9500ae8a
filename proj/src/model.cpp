#include "corrcs/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "corrcs/kernels.hpp"

namespace corrcs {

SparseSignal::SparseSignal(Vector values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("SparseSignal: empty vector");
  sparsity_ = static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

SensingEnsemble::SensingEnsemble(Matrix measurement)
    : measurement_(std::move(measurement)),
      dictionary_(Matrix::identity(measurement_.cols())),
      system_(measurement_) {
  if (measurement_.rows() > measurement_.cols()) {
    throw std::invalid_argument("SensingEnsemble: more measurements than unknowns");
  }
}

SensingEnsemble::SensingEnsemble(Matrix measurement, Matrix dictionary)
    : measurement_(std::move(measurement)), dictionary_(std::move(dictionary)) {
  const std::size_t n = measurement_.cols();
  if (measurement_.rows() > n) {
    throw std::invalid_argument("SensingEnsemble: more measurements than unknowns");
  }
  if (dictionary_.rows() != n || dictionary_.cols() != n) {
    throw std::invalid_argument("SensingEnsemble: dictionary must be N x N");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < n; ++p) s += dictionary_(p, i) * dictionary_(p, j);
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-10) {
        throw std::invalid_argument("SensingEnsemble: dictionary is not orthonormal");
      }
    }
  }
  system_ = kernels::gemm(measurement_, dictionary_);
}

void NoiseSpec::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("NoiseSpec: alpha must be in (0, 1]");
  if (!(sigma_w_sq >= 0.0)) throw std::invalid_argument("NoiseSpec: sigma_w_sq must be >= 0");
  if (!(sigma_ybar_sq >= 0.0)) throw std::invalid_argument("NoiseSpec: sigma_ybar_sq must be >= 0");
}

Vector MeasurementSet::noise() const {
  if (!noiseless) throw std::logic_error("MeasurementSet: noiseless measurements not retained");
  Vector n(observed.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = observed[i] - (*noiseless)[i];
  return n;
}

Vector measure_noiseless(const SparseSignal& signal, const SensingEnsemble& ensemble) {
  if (signal.size() != ensemble.dimension()) {
    throw std::invalid_argument("measure_noiseless: signal length does not match ensemble");
  }
  Vector ybar(ensemble.measurements());
  kernels::gemv(ensemble.system_matrix(), signal.values(), ybar);
  return ybar;
}

MeasurementSet apply_correlated_noise(std::span<const double> noiseless, const NoiseSpec& spec,
                                      Rng& rng) {
  spec.validate();
  MeasurementSet out;
  out.observed.resize(noiseless.size());
  fill_gaussian(rng, out.observed, std::sqrt(spec.sigma_w_sq));
  for (std::size_t i = 0; i < noiseless.size(); ++i) out.observed[i] += spec.alpha * noiseless[i];
  out.noiseless = Vector(noiseless.begin(), noiseless.end());
  return out;
}

double correlated_noise_variance(const NoiseSpec& spec) {
  spec.validate();
  const double d = spec.alpha - 1.0;
  return d * d * spec.sigma_ybar_sq + spec.sigma_w_sq;
}

}  // namespace corrcs
