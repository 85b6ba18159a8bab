#pragma once

#include "cenn/kernel.hpp"

#include <nlohmann/json_fwd.hpp>

namespace cenn {

/// Which arrows carry free kernel entries.
enum class KernelSupport { all_arrows, identity_only };

/// Ordered index of scalar kernel unknowns K(u, y)[r, s].
struct KernelUnknown {
  ArrowIndex arrow;
  std::size_t point;
  std::size_t row;
  std::size_t col;
};

class KernelLayout {
 public:
  KernelLayout(FunctorPtr source, FunctorPtr target, KernelSupport support = KernelSupport::all_arrows);

  std::size_t size() const noexcept { return unknowns_.size(); }
  const KernelUnknown& operator[](std::size_t i) const { return unknowns_[i]; }
  /// Column of K(u, y)[r, s], or npos when the arrow is not supported.
  std::size_t column(ArrowIndex u, std::size_t y, std::size_t r, std::size_t s) const;
  bool supported(ArrowIndex u) const { return offset_[u] != npos; }

  /// Writes a coefficient vector into a kernel; unsupported arrows stay zero.
  CategoryKernel reshape(const Vector& v, Regime regime) const;
  Vector flatten(const CategoryKernel& k) const;

  const FunctorPtr& source() const noexcept { return source_; }
  const FunctorPtr& target() const noexcept { return target_; }
  KernelSupport support() const noexcept { return support_; }

  static constexpr std::size_t npos = std::size_t(-1);

 private:
  FunctorPtr source_;
  FunctorPtr target_;
  KernelSupport support_;
  std::vector<KernelUnknown> unknowns_;
  ArrowMap<std::size_t> offset_;
};

enum class ConstraintKind { IN, IN_bundle, IN_probe, steerability, bias, scalar_channel };

std::string to_string(ConstraintKind k);

/// Generating tuple of one scalar equation.
struct RowProvenance {
  ConstraintKind kind;
  ArrowIndex w;
  std::size_t y;            // output point (in Ω(src w) for naturality rows)
  std::string basis;        // e.g. "p=0,j=1" or "u=g,p=0,j=0"
  std::size_t output;       // output coordinate
};

struct ConstraintSystem {
  ConstraintKind kind;
  KernelLayout layout;
  Matrix matrix;
  std::vector<RowProvenance> provenance;
  std::optional<ProbeFamily> probe;

  std::size_t unknown_count() const { return layout.size(); }
  std::size_t row_count() const { return std::size_t(matrix.rows()); }
  Regime regime() const;
  /// max-abs of matrix·coefficients(k) over all rows.
  double residual(const CategoryKernel& k) const;
  nlohmann::json provenance_json() const;
};

/// Linearized naturality for category convolution (IN), arrow-bundle convolution (IN_bundle)
/// or probe-evaluated bundle convolution (IN_probe). Rows that are identically zero are dropped.
ConstraintSystem assemble_in_constraints(FunctorPtr source, FunctorPtr target, Regime kind,
                                         const std::optional<ProbeFamily>& probe = std::nullopt,
                                         KernelSupport support = KernelSupport::all_arrows);

/// ρ_Y(h^{-1}) K(hg, h·y) = K(g, y) on a one-object group category.
ConstraintSystem assemble_steerability_constraints(FunctorPtr source, FunctorPtr target);

struct ParameterBasis {
  std::vector<CategoryKernel> kernels;
  std::vector<double> singular_values;
  std::size_t rank = 0;
};

/// Orthonormal basis of the nullspace; singular values below tol·σ_max count as zero.
ParameterBasis solve_parameter_space(const ConstraintSystem& sys, double tol = 1e-10);

/// Orthonormal basis of the nullspace of an arbitrary matrix (columns of the result).
Matrix nullspace(const Matrix& a, double tol, std::vector<double>* singular_values = nullptr,
                 std::size_t* rank = nullptr);

/// Natural bias fields: Z'(w) b_c = b_a for every arrow w: a→c.
std::vector<ObjectMap<Matrix>> solve_natural_bias(const FeatureFunctor& target, double tol = 1e-10);
double bias_residual(const FeatureFunctor& target, const ObjectMap<Matrix>& bias);

/// Linear natural scalar channel: per object a, s_a maps a flattened feature (|Ω(a)|·n(a)) to
/// one scalar per point (|Ω(a)|).
using ScalarChannel = ObjectMap<Matrix>;

/// Basis of linear channels with S(u)∘s_a = s_b∘Z(u) for every u: b→a.
std::vector<ScalarChannel> solve_scalar_channels(const FeatureFunctor& f, double tol = 1e-10);
double scalar_channel_residual(const FeatureFunctor& f, const ScalarChannel& s);

/// Channel reading coordinate `j` of every fiber (s_a(z)(y) = z(y)_j); objects with n(a) ≤ j get
/// a zero channel.
ScalarChannel coordinate_channel(const FeatureFunctor& f, std::size_t j);

}  // namespace cenn
