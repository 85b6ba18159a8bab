#pragma once

#include "cenn/constraints.hpp"
#include "cenn/kernel.hpp"

#include <memory>
#include <variant>

namespace cenn {

enum class ActivationKind { relu, leaky_relu, tanh, softplus };

/// Nonpolynomial, continuous, globally Lipschitz scalar activation.
struct Activation {
  ActivationKind kind = ActivationKind::tanh;
  double slope = 0.01;  // leaky_relu only

  double operator()(double t) const;
  double derivative(double t) const;
  double lipschitz() const;

  static Activation from_string(std::string_view name, double slope = 0.01);
  friend bool operator==(const Activation&, const Activation&) = default;
};

std::string to_string(const Activation& a);

/// (h_u)_{u ∈ I(a)}: one feature of the functor at s(u) per incoming arrow, in the
/// category's canonical order of I(a).
struct BundleSection {
  FunctorPtr functor;
  ObjectIndex object{};
  std::vector<Matrix> components;

  const Matrix& at(ArrowIndex u) const;
  Matrix& at(ArrowIndex u);
  /// max over positive-weight u of ‖h_u‖∞.
  double norm() const;
};

/// Bundle sections over several objects.
struct BundleField {
  FunctorPtr functor;
  ObjectMap<std::optional<BundleSection>> data;

  bool has(ObjectIndex a) const { return data[a].has_value(); }
  const BundleSection& at(ObjectIndex a) const;
};

Section conv_forward(const CategoryKernel& k, const Section& x);

/// Coordinates [offset, offset + size) of each fiber vector are scaled by α(s_a(z_a)(y)).
/// size = npos means "through the end of the fiber".
struct GateBlock {
  std::size_t offset = 0;
  std::size_t size = npos;
  ScalarChannel channel;

  static constexpr std::size_t npos = std::size_t(-1);
};

Section gate_forward(const Activation& alpha, const ScalarChannel& s, const Section& z);
Section gate_forward(const Activation& alpha, const std::vector<GateBlock>& blocks, const Section& z);

BundleSection bundle_lift(const FeatureFunctor& f, const FunctorPtr& fp, const Matrix& x_a, ObjectIndex a);
BundleSection bundle_lift(const FunctorPtr& f, const Section& x, ObjectIndex a);
BundleSection bundle_reindex(ArrowIndex w, const BundleSection& h);

struct NetworkSpec;

/// One stage of a per-object map acting on a |Ω(b)| x n feature.
struct AffineStage {
  Matrix weight;  // acts on the point-major flattening
  Vector bias;
};
struct ActivationStage {
  Activation alpha;
};
struct ClipStage {
  double radius = 1.0;  // entrywise projection onto the sup-norm ball
};
struct FragmentStage {
  std::shared_ptr<const NetworkSpec> network;  // evaluated on a section populated at b only
};
using Stage = std::variant<AffineStage, ActivationStage, ClipStage, FragmentStage>;

/// Family of per-object maps H_b: features of `input` at b → features of `output` at b.
/// Objects without a map are allowed where every incoming role has zero weight.
struct ObjectwiseMap {
  FunctorPtr input;
  FunctorPtr output;
  ObjectMap<std::optional<std::vector<Stage>>> stages;

  ObjectwiseMap() = default;
  ObjectwiseMap(FunctorPtr in, FunctorPtr out);

  static ObjectwiseMap identity(FunctorPtr f);
  static ObjectwiseMap zero(FunctorPtr in, FunctorPtr out);
  static ObjectwiseMap affine(FunctorPtr in, FunctorPtr out, const ObjectMap<Matrix>& weight,
                              const ObjectMap<Vector>& bias);

  bool has(ObjectIndex b) const { return stages[b].has_value(); }
  Matrix apply(ObjectIndex b, const Matrix& feature) const;
  /// Product of stage bounds; nullopt when a stage has no recorded bound.
  std::optional<double> lipschitz_bound(ObjectIndex b) const;
};

BundleSection componentwise_lift(const ObjectwiseMap& h_map, const BundleSection& h);

/// Probe evaluation uses the kernel's stored probe when its regime is IN_probe, τ otherwise.
Section bundle_conv_forward(const CategoryKernel& k, const BundleField& h);
Matrix bundle_conv_forward(const CategoryKernel& k, const BundleSection& h);

// ---- networks ----

struct ConvLayer {
  CategoryKernel kernel;
};
struct GateLayer {
  FunctorPtr functor;
  Activation alpha;
  std::vector<GateBlock> blocks;
};
struct LiftLayer {
  FunctorPtr functor;
};
struct ComponentwiseLiftLayer {
  ObjectwiseMap map;
};
struct BundleConvLayer {
  CategoryKernel kernel;
  bool retraction = false;  // marks the compile-time retraction for documents and reports
};
using Layer = std::variant<ConvLayer, GateLayer, LiftLayer, ComponentwiseLiftLayer, BundleConvLayer>;

std::string layer_name(const Layer& l);

/// Data flowing between layers: a section or an arrow-bundle field.
using Value = std::variant<Section, BundleField>;

struct LayerType {
  FunctorPtr functor;
  bool bundle = false;
};

LayerType layer_input(const Layer& l);
LayerType layer_output(const Layer& l);

struct NetworkSpec {
  FunctorPtr input;  // Z^(0); required for empty networks
  std::vector<Layer> layers;

  FunctorPtr output() const;
  bool output_is_bundle() const;
  /// Throws Error(type_mismatch) naming the first incoherent layer boundary.
  void typecheck() const;
};

bool same_functor(const FunctorPtr& a, const FunctorPtr& b);

Value apply_layer(const Layer& l, const Value& v);
Value network_forward_value(const NetworkSpec& net, const Value& x);
/// Runs the network on a section and requires a section result.
Section network_forward(const NetworkSpec& net, const Section& x);
/// Objectwise evaluation Φ_a(x_a).
Matrix network_forward(const NetworkSpec& net, ObjectIndex a, const Matrix& x_a);

}  // namespace cenn
