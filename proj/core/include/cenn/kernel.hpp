#pragma once

#include "cenn/functor.hpp"

#include <optional>
#include <string_view>

namespace cenn {

enum class Regime { IN, IN_bundle, IN_probe, pointwise_steerable, unconstrained };

std::string to_string(Regime r);
Regime regime_from_string(std::string_view s);

/// Per (arrow u: b→a, y ∈ Ω(a)) matrices K(u,y): E_Z(b) → E_Z'(a), plus an optional bias
/// field b_a ∈ C(Ω(a), E_Z'(a)).
class CategoryKernel {
 public:
  CategoryKernel(FunctorPtr source, FunctorPtr target, Regime regime = Regime::unconstrained);

  const FunctorPtr& source() const noexcept { return source_; }
  const FunctorPtr& target() const noexcept { return target_; }
  const FiniteCategory& category() const noexcept { return source_->category(); }

  Regime regime() const noexcept { return regime_; }
  void set_regime(Regime r) noexcept { regime_ = r; }

  /// σ used when the regime is IN_probe.
  const std::optional<ProbeFamily>& probe() const noexcept { return probe_; }
  void set_probe(std::optional<ProbeFamily> p) { probe_ = std::move(p); }

  Matrix& entry(ArrowIndex u, std::size_t y) { return entries_[u].at(y); }
  const Matrix& entry(ArrowIndex u, std::size_t y) const { return entries_[u].at(y); }
  void set_entry(ArrowIndex u, std::size_t y, Matrix m);

  bool has_bias() const noexcept { return bias_.has_value(); }
  const ObjectMap<Matrix>& bias() const { return *bias_; }
  void set_bias(ObjectMap<Matrix> bias);
  void clear_bias() { bias_.reset(); }
  /// b_a, or zeros when no bias is stored.
  Matrix bias_at(ObjectIndex a) const;

  CategoryKernel& operator*=(double s);
  CategoryKernel& operator+=(const CategoryKernel& other);

  /// Scalar entries in canonical order (arrow, point, row-major matrix entries).
  Vector coefficients() const;
  void set_coefficients(const Vector& v);
  std::size_t coefficient_count() const;

 private:
  FunctorPtr source_;
  FunctorPtr target_;
  Regime regime_;
  std::optional<ProbeFamily> probe_;
  ArrowMap<std::vector<Matrix>> entries_;
  std::optional<ObjectMap<Matrix>> bias_;
};

/// Kernel supported on identity arrows with K(id_a, y) given per object (others zero).
CategoryKernel identity_supported_kernel(FunctorPtr source, FunctorPtr target,
                                         const ObjectMap<Matrix>& per_object, Regime regime);

struct L1Bound {
  std::vector<std::pair<ArrowIndex, double>> per_arrow;  // G_a(u) = max_y ‖K(u,y)‖
  double integral = 0.0;                                 // Σ μ(u) G_a(u)
  double transport_bound = 0.0;                          // H_a of the source functor
  double lipschitz = 0.0;                                // H_a · Σ μ(u) G_a(u)
};

L1Bound compute_l1_bound(const CategoryKernel& k, ObjectIndex a);

/// max over (h, g, y) of ‖ρ_Y(h^{-1}) K(hg, h·y) − K(g, y)‖ for a one-object group category
/// whose functors use π_h(y) = h·y and L^Y_h = ρ_Y(h^{-1}). Throws Error(not_a_group) otherwise.
double check_pointwise_steerability(const CategoryKernel& k);

}  // namespace cenn
