#pragma once

#include "cenn/layers.hpp"

#include <random>

namespace cenn {

using Rng = std::mt19937_64;

/// Uniform entries in [lo, hi] at every object.
Section random_section(const FunctorPtr& f, Rng& rng, double lo = -1.0, double hi = 1.0);
Matrix random_feature(const FeatureFunctor& f, ObjectIndex a, Rng& rng, double lo = -1.0, double hi = 1.0);
std::vector<Section> random_sections(const FunctorPtr& f, std::size_t count, std::uint64_t seed);

struct ArrowResidual {
  ArrowIndex arrow;
  double residual = 0.0;
  std::size_t sample = 0;  // sample index attaining the residual
};

struct EquivarianceReport {
  double max_residual = 0.0;
  std::vector<ArrowResidual> per_arrow;
  double tol = 1e-9;

  bool ok() const { return max_residual <= tol; }
  /// Arrow with the largest residual.
  const ArrowResidual* witness() const;
  nlohmann::json to_json(const FiniteCategory& cat) const;
};

/// ‖Y(w) Φ_c(x_c) − Φ_a(X(w) x_c)‖∞ for every arrow w: a→c and sample x.
EquivarianceReport check_equivariance(const NetworkSpec& net, const std::vector<Section>& samples,
                                      double tol = 1e-9);
EquivarianceReport check_equivariance(const Layer& layer, const FunctorPtr& input,
                                      const std::vector<Section>& samples, double tol = 1e-9);

/// sup over samples of ‖Φ(x) − Ψ(x)‖∞ across every populated object.
double max_difference(const NetworkSpec& phi, const NetworkSpec& psi, const std::vector<Section>& samples);

}  // namespace cenn
