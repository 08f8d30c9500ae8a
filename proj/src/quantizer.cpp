#include "corrcs/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

namespace corrcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pdf(double x) {
  if (std::isinf(x)) return 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double x_pdf(double x) { return std::isinf(x) ? 0.0 : x * pdf(x); }

// Upper tail P(Y > x).
double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

void check_design_args(int bits, double sigma) {
  if (bits < 1 || bits > 16) throw std::invalid_argument("quantizer: bits must be in [1, 16]");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("quantizer: sigma must be positive and finite");
  }
}

double cell_lower(const std::vector<double>& t, std::size_t i) { return i == 0 ? -kInf : t[i - 1]; }
double cell_upper(const std::vector<double>& t, std::size_t i) {
  return i == t.size() ? kInf : t[i];
}

// Standard-normal MSE of a uniform mid-point quantizer with step delta.
double uniform_distortion(std::size_t cells, double delta) {
  const double half = 0.5 * static_cast<double>(cells);
  double d = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = i == 0 ? -kInf : (static_cast<double>(i) - half) * delta;
    const double b = i + 1 == cells ? kInf : (static_cast<double>(i) + 1.0 - half) * delta;
    const double c = (static_cast<double>(i) + 0.5 - half) * delta;
    const double m0 = gaussian::mass(a, b);
    const double m1 = pdf(a) - pdf(b);
    const double m2 = m0 + x_pdf(a) - x_pdf(b);
    d += m2 - 2.0 * c * m1 + c * c * m0;
  }
  return d;
}

}  // namespace

ScalarQuantizer::ScalarQuantizer(int bits, std::vector<double> thresholds, std::vector<double> levels)
    : bits_(bits), thresholds_(std::move(thresholds)), levels_(std::move(levels)) {
  if (bits_ < 1 || bits_ > 16) throw std::invalid_argument("ScalarQuantizer: bits must be in [1, 16]");
  const std::size_t cells = std::size_t{1} << bits_;
  if (levels_.size() != cells || thresholds_.size() + 1 != cells) {
    throw std::invalid_argument("ScalarQuantizer: expected 2^bits levels and 2^bits - 1 thresholds");
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (!std::isfinite(levels_[i])) throw std::invalid_argument("ScalarQuantizer: non-finite level");
    if (i > 0 && !(levels_[i] > levels_[i - 1])) {
      throw std::invalid_argument("ScalarQuantizer: levels must be strictly increasing");
    }
    if (i + 1 < cells) {
      if (!std::isfinite(thresholds_[i])) {
        throw std::invalid_argument("ScalarQuantizer: non-finite threshold");
      }
      if (i > 0 && !(thresholds_[i] > thresholds_[i - 1])) {
        throw std::invalid_argument("ScalarQuantizer: thresholds must be strictly increasing");
      }
    }
    if (!(levels_[i] > cell_lower(thresholds_, i) && levels_[i] <= cell_upper(thresholds_, i))) {
      throw std::invalid_argument("ScalarQuantizer: level outside its cell");
    }
  }
}

std::size_t ScalarQuantizer::cell_of(double v) const noexcept {
  // First threshold >= v: a value equal to p_i stays in cell i.
  return static_cast<std::size_t>(
      std::lower_bound(thresholds_.begin(), thresholds_.end(), v) - thresholds_.begin());
}

ScalarQuantizer ScalarQuantizer::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("ScalarQuantizer::scaled: factor must be positive");
  auto t = thresholds_;
  auto l = levels_;
  for (double& v : t) v *= c;
  for (double& v : l) v *= c;
  return ScalarQuantizer(bits_, std::move(t), std::move(l));
}

namespace gaussian {

double mass(double a, double b) {
  if (!(b > a)) return 0.0;
  if (a >= 0.0) return upper_tail(a) - upper_tail(b);
  if (b <= 0.0) return upper_tail(-b) - upper_tail(-a);
  return 1.0 - upper_tail(-a) - upper_tail(b);
}

double centroid(double a, double b) { return (pdf(a) - pdf(b)) / mass(a, b); }

double distortion(const ScalarQuantizer& q, double sigma) {
  const auto& t = q.thresholds();
  double d = 0.0;
  for (std::size_t i = 0; i < q.cell_count(); ++i) {
    const double a = cell_lower(t, i) / sigma;
    const double b = cell_upper(t, i) / sigma;
    const double c = q.levels()[i] / sigma;
    const double m0 = mass(a, b);
    const double m1 = pdf(a) - pdf(b);
    const double m2 = m0 + x_pdf(a) - x_pdf(b);
    d += m2 - 2.0 * c * m1 + c * c * m0;
  }
  return d * sigma * sigma;
}

}  // namespace gaussian

ScalarQuantizer design_lloyd_max(int bits, double sigma, const LloydMaxOptions& options) {
  check_design_args(bits, sigma);
  const std::size_t cells = std::size_t{1} << bits;

  // Start from the Gaussian quantiles of the cell-probability midpoints.
  const boost::math::normal_distribution<double> standard;
  std::vector<double> levels(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    levels[i] = boost::math::quantile(standard, (static_cast<double>(i) + 0.5) / static_cast<double>(cells));
  }
  std::vector<double> thresholds(cells - 1);

  bool converged = false;
  for (int it = 0; it < options.max_iterations && !converged; ++it) {
    for (std::size_t i = 0; i + 1 < cells; ++i) thresholds[i] = 0.5 * (levels[i] + levels[i + 1]);
    double moved = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      const double c = gaussian::centroid(cell_lower(thresholds, i), cell_upper(thresholds, i));
      moved = std::max(moved, std::abs(c - levels[i]));
      levels[i] = c;
    }
    converged = moved < options.tolerance;
  }
  for (std::size_t i = 0; i + 1 < cells; ++i) thresholds[i] = 0.5 * (levels[i] + levels[i + 1]);

  if (!converged) {
    for (double& v : thresholds) v *= sigma;
    for (double& v : levels) v *= sigma;
    throw QuantizerDesignError("design_lloyd_max: no fixed point within iteration cap",
                               std::move(thresholds), std::move(levels));
  }
  return ScalarQuantizer(bits, std::move(thresholds), std::move(levels)).scaled(sigma);
}

ScalarQuantizer design_uniform_mmse(int bits, double sigma) {
  check_design_args(bits, sigma);
  const std::size_t cells = std::size_t{1} << bits;

  // Golden-section search on the standardized step.
  const double upper = 20.0 / static_cast<double>(cells);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = upper;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = uniform_distortion(cells, x1);
  double f2 = uniform_distortion(cells, x2);
  constexpr double kTolerance = 1e-10;
  int guard = 0;
  while (hi - lo > kTolerance * upper && guard++ < 500) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = uniform_distortion(cells, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = uniform_distortion(cells, x2);
    }
  }
  const double delta = 0.5 * (lo + hi);

  const double half = 0.5 * static_cast<double>(cells);
  std::vector<double> thresholds(cells - 1);
  std::vector<double> levels(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    levels[i] = (static_cast<double>(i) + 0.5 - half) * delta * sigma;
    if (i + 1 < cells) thresholds[i] = (static_cast<double>(i) + 1.0 - half) * delta * sigma;
  }
  if (!(delta > 0.0) || upper - delta < 1e-6 * upper || !std::isfinite(uniform_distortion(cells, delta))) {
    throw QuantizerDesignError("design_uniform_mmse: optimum not interior to the search interval",
                               std::move(thresholds), std::move(levels));
  }
  return ScalarQuantizer(bits, std::move(thresholds), std::move(levels));
}

Vector quantize(const ScalarQuantizer& q, std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [&q](double x) { return q(x); });
  return out;
}

GainModelFit gain_model_from_alpha(double alpha, double sigma_ybar_sq) {
  GainModelFit fit;
  fit.alpha = alpha;
  fit.sigma_ybar_sq = sigma_ybar_sq;
  fit.sigma_q_sq = (1.0 - alpha) * sigma_ybar_sq;
  fit.sigma_r_sq = alpha * (1.0 - alpha) * sigma_ybar_sq;
  return fit;
}

GainModelFit fit_gain_model(const ScalarQuantizer& q, double sigma_ybar_sq, std::size_t sample_count,
                            Rng& rng) {
  if (!(sigma_ybar_sq > 0.0)) throw std::invalid_argument("fit_gain_model: sigma_ybar_sq must be > 0");
  if (sample_count < 10000) throw std::invalid_argument("fit_gain_model: need at least 1e4 samples");

  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(sigma_ybar_sq);
  // Welford updates for the two sample variances.
  double mean_y = 0.0, m2_y = 0.0, mean_q = 0.0, m2_q = 0.0;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const double y = sd * normal(rng);
    const double e = q(y) - y;
    const double n = static_cast<double>(i + 1);
    const double dy = y - mean_y;
    mean_y += dy / n;
    m2_y += dy * (y - mean_y);
    const double de = e - mean_q;
    mean_q += de / n;
    m2_q += de * (e - mean_q);
  }
  const double alpha = 1.0 - m2_q / m2_y;
  GainModelFit fit = gain_model_from_alpha(alpha, sigma_ybar_sq);
  fit.sample_count = sample_count;
  return fit;
}

}  // namespace corrcs
