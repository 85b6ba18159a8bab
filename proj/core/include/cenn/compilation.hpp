#pragma once

#include "cenn/equivariance.hpp"

namespace cenn {

enum class RetractionFlavor { haar_groupoid, thin_graded };

std::string to_string(RetractionFlavor f);

/// Block of the graded fiber E_Y(a) holding the summand U(e).
struct GradedBlock {
  ObjectIndex summand;
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct GradedData {
  ObjectMap<std::size_t> summand_dims;        // U(e)
  ObjectMap<std::vector<GradedBlock>> blocks;  // summands of E_Y(a) in canonical object order
  ArrowMap<Matrix> inclusion;                  // E_{d→a}: E_Y(d) → E_Y(a), U(d) into U(d)
};

/// Bundle convolution R with R∘Δ_Y = id_Y.
struct Retraction {
  CategoryKernel kernel;
  RetractionFlavor flavor;
  ObjectMap<double> normalization;  // Σ_{u∈I(a)} μ(u) absorbed into the kernel (Haar only)
  std::optional<GradedData> graded;

  const FunctorPtr& functor() const { return kernel.target(); }
};

/// R(u, y) = L^Y_{u^{-1}} / Σ_{v∈I(a)} μ(v): averaging against the per-target normalized weights.
Retraction build_haar_retraction(const FunctorPtr& y);

struct GradedTarget {
  FunctorPtr functor;
  Retraction retraction;
};

/// E_Y(a) = ⊕_{e≤a} U(e) on a thin category, with truncation transports and inclusion retraction.
GradedTarget build_graded_target(const CategoryPtr& cat, const ObjectMap<std::size_t>& summand_dims);

/// Haar for groupoids, graded inclusion for thin categories whose functor is already graded;
/// otherwise Error(no_retraction).
Retraction build_retraction(const FunctorPtr& y);

struct GradedLawReport {
  std::size_t nat_failures = 0;
  std::size_t ann_failures = 0;
  std::size_t poi_failures = 0;
  bool ok() const { return nat_failures + ann_failures + poi_failures == 0; }
};

/// Exact (bitwise) check of the naturality, annihilation and partition-of-identity laws.
GradedLawReport check_graded_laws(const Retraction& r);

/// Ψ = [lift, componentwise_lift(G), bundle_conv(R)].
NetworkSpec compile_equivariant(const Retraction& r, const ObjectwiseMap& g, const FunctorPtr& x);
/// G given by a network evaluated objectwise.
NetworkSpec compile_equivariant(const Retraction& r, const NetworkSpec& g);

/// max over samples and objects of ‖R(Δ_Y h) − h‖∞.
double check_retraction(const Retraction& r, const std::vector<Section>& samples);

struct StabilityBound {
  double kernel_mass = 0.0;  // max_a Σ_{u∈I(a)} μ(u) max_y ‖R(u,y)‖
  double map_gap = 0.0;      // max over transported samples of ‖G_b − H_b‖∞
  double bound = 0.0;        // kernel_mass · map_gap
};

/// Stability of compilation on the transported samples {X(u) x_a : u ∈ I(a)}.
StabilityBound stability_bound(const Retraction& r, const ObjectwiseMap& g, const ObjectwiseMap& h,
                               const std::vector<Section>& samples);

}  // namespace cenn
