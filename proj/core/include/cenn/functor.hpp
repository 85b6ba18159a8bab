#pragma once

#include "cenn/category.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cenn {

/// Base maps between finite point sets, stored as target point indices.
using PointMap = std::vector<std::size_t>;

/// A feature functor C^op → Vect with finite base sets.
///
/// For u: b→a the functor stores τ_u: Ω(a)→Ω(b), π_u: Ω(b)→Ω(a) and the fiber transport
/// L_u: E(a)→E(b) (an n(b) x n(a) matrix). A feature at a is a |Ω(a)| x n(a) matrix whose
/// row p is the fiber vector at point p; X(u) f = L_u ∘ f ∘ π_u.
///
/// Construction only checks that indices are in range. Functoriality, the mixed-base law and
/// matrix shapes are checked by validate_functor.
class FeatureFunctor {
 public:
  FeatureFunctor(CategoryPtr cat, ObjectMap<std::vector<std::string>> base,
                 ObjectMap<std::size_t> fiber_dim, ArrowMap<PointMap> tau, ArrowMap<PointMap> pi,
                 ArrowMap<Matrix> transport);

  /// Single base point "*" everywhere, τ = π = id.
  static FeatureFunctor pointwise(CategoryPtr cat, ObjectMap<std::size_t> fiber_dim,
                                  ArrowMap<Matrix> transport);

  /// Scalar functor S^m sharing base data with `like`: fiber R^m, L_u = I.
  static FeatureFunctor scalar(const FeatureFunctor& like, std::size_t m);

  /// Same base data as `like`, new fibers and transports.
  static FeatureFunctor with_fibers(const FeatureFunctor& like, ObjectMap<std::size_t> fiber_dim,
                                    ArrowMap<Matrix> transport);

  const FiniteCategory& category() const noexcept { return *cat_; }
  const CategoryPtr& category_ptr() const noexcept { return cat_; }

  const std::vector<std::string>& base(ObjectIndex a) const { return base_[a]; }
  std::size_t base_size(ObjectIndex a) const { return base_[a].size(); }
  std::size_t fiber_dim(ObjectIndex a) const { return fiber_dim_[a]; }
  /// |Ω(a)|·n(a), the dimension of the section space at a.
  std::size_t section_dim(ObjectIndex a) const { return base_size(a) * fiber_dim(a); }

  const PointMap& tau(ArrowIndex u) const { return tau_[u]; }
  const PointMap& pi(ArrowIndex u) const { return pi_[u]; }
  const Matrix& transport(ArrowIndex u) const { return transport_[u]; }

  /// H_a: max over positive-weight u ∈ I(a) of the operator norm of L_u.
  double transport_bound(ObjectIndex a) const;

  /// (X(u) f)(y) = L_u f(π_u y) for y ∈ Ω(src u); f is a feature at tgt u.
  Matrix apply(ArrowIndex u, const Matrix& feature) const;

  Matrix zero_feature(ObjectIndex a) const;
  void check_feature(ObjectIndex a, const Matrix& feature, const char* module) const;

  std::size_t point_index(ObjectIndex a, std::string_view point) const;

  friend bool operator==(const FeatureFunctor& x, const FeatureFunctor& y);

 private:
  CategoryPtr cat_;
  ObjectMap<std::vector<std::string>> base_;
  ObjectMap<std::size_t> fiber_dim_;
  ArrowMap<PointMap> tau_;
  ArrowMap<PointMap> pi_;
  ArrowMap<Matrix> transport_;
};

using FunctorPtr = std::shared_ptr<const FeatureFunctor>;

template <class... Args>
FunctorPtr make_functor(Args&&... args) {
  return std::make_shared<const FeatureFunctor>(std::forward<Args>(args)...);
}
inline FunctorPtr share(FeatureFunctor f) {
  return std::make_shared<const FeatureFunctor>(std::move(f));
}

/// A field of features over the objects of a functor; objects may be left unpopulated.
class Section {
 public:
  Section() = default;
  explicit Section(FunctorPtr functor);

  const FunctorPtr& functor() const noexcept { return functor_; }
  bool has(ObjectIndex a) const { return data_[a].has_value(); }
  const Matrix& at(ObjectIndex a) const;
  void set(ObjectIndex a, Matrix feature);
  void clear(ObjectIndex a) { data_[a].reset(); }
  std::size_t object_count() const noexcept { return data_.size(); }

  friend bool operator==(const Section& x, const Section& y);

 private:
  FunctorPtr functor_;
  ObjectMap<std::optional<Matrix>> data_;
};

/// Arrow-indexed probe maps σ_u: Ω(tgt u) → Ω(src u).
struct ProbeFamily {
  ArrowMap<PointMap> sigma;

  /// σ = τ (thin, discrete, sheaf categories).
  static ProbeFamily from_tau(const FeatureFunctor& f);
  /// σ_u = id on shared base sets (one-object groups and groupoids over a common base).
  static ProbeFamily identity(const FeatureFunctor& f);

  /// σ_{id_a} = id and every map lands in range.
  ValidationReport validate(const FeatureFunctor& f) const;

  friend bool operator==(const ProbeFamily&, const ProbeFamily&) = default;
};

/// Reports functoriality (base and fiber), identity laws, mixed-base law, and shape mismatches.
ValidationReport validate_functor(const FiniteCategory& cat, const FeatureFunctor& f,
                                  double tol = 1e-12);

/// Matrix of f_a ↦ L_u ∘ f_a ∘ π_u in point-major, fiber-minor coordinates.
Matrix transport_operator(const FeatureFunctor& f, ArrowIndex u);

/// Arrow-evaluation separation diagnostics on a finite sample set at object a.
ValidationReport check_separation(const FeatureFunctor& f, const ProbeFamily& sigma, ObjectIndex a,
                                  const std::vector<Matrix>& samples, double tol);

}  // namespace cenn
