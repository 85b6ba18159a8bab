#include "cenn/layers.hpp"

#include <algorithm>
#include <cmath>

namespace cenn {

double Activation::operator()(double t) const {
  switch (kind) {
    case ActivationKind::relu: return t > 0.0 ? t : 0.0;
    case ActivationKind::leaky_relu: return t > 0.0 ? t : slope * t;
    case ActivationKind::tanh: return std::tanh(t);
    case ActivationKind::softplus: return t > 30.0 ? t : std::log1p(std::exp(t));
  }
  return t;
}

double Activation::derivative(double t) const {
  switch (kind) {
    case ActivationKind::relu: return t > 0.0 ? 1.0 : 0.0;
    case ActivationKind::leaky_relu: return t > 0.0 ? 1.0 : slope;
    case ActivationKind::tanh: {
      const double th = std::tanh(t);
      return 1.0 - th * th;
    }
    case ActivationKind::softplus: return 1.0 / (1.0 + std::exp(-t));
  }
  return 1.0;
}

double Activation::lipschitz() const {
  if (kind == ActivationKind::leaky_relu) return std::max(1.0, std::abs(slope));
  return 1.0;
}

Activation Activation::from_string(std::string_view name, double slope) {
  if (name == "relu") return {ActivationKind::relu, slope};
  if (name == "leaky_relu") return {ActivationKind::leaky_relu, slope};
  if (name == "tanh") return {ActivationKind::tanh, slope};
  if (name == "softplus") return {ActivationKind::softplus, slope};
  throw Error(ErrorKind::malformed_input, "layers", "unknown activation '" + std::string(name) + "'",
              std::string(name));
}

std::string to_string(const Activation& a) {
  switch (a.kind) {
    case ActivationKind::relu: return "relu";
    case ActivationKind::leaky_relu: return "leaky_relu";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::softplus: return "softplus";
  }
  return "tanh";
}

// ---- bundles ----

const Matrix& BundleSection::at(ArrowIndex u) const {
  return components.at(functor->category().incoming_position(u));
}

Matrix& BundleSection::at(ArrowIndex u) {
  return components.at(functor->category().incoming_position(u));
}

double BundleSection::norm() const {
  const auto& c = functor->category();
  double n = 0.0;
  for (auto u : c.incoming(object))
    if (c.weight(u) > 0.0) n = std::max(n, sup_norm(at(u)));
  return n;
}

const BundleSection& BundleField::at(ObjectIndex a) const {
  if (!data[a])
    throw Error(ErrorKind::malformed_input, "layers",
                "bundle is not populated at '" + functor->category().object_name(a) + "'",
                functor->category().object_name(a));
  return *data[a];
}

namespace {

void check_bundle(const FeatureFunctor& f, const BundleSection& h) {
  const auto& c = f.category();
  const auto in = c.incoming(h.object);
  if (h.components.size() != in.size())
    throw Error(ErrorKind::shape_mismatch, "layers",
                "bundle at '" + c.object_name(h.object) + "' needs one component per incoming arrow",
                c.object_name(h.object));
  for (std::size_t i = 0; i < in.size(); ++i) f.check_feature(c.src(in[i]), h.components[i], "layers");
}

}  // namespace

Section conv_forward(const CategoryKernel& k, const Section& x) {
  if (k.regime() == Regime::IN_bundle || k.regime() == Regime::IN_probe)
    throw Error(ErrorKind::regime_mismatch, "layers", "category convolution needs an IN or steerable kernel",
                to_string(k.regime()));
  const auto& z = *k.source();
  const auto& c = z.category();
  Section out(k.target());
  for (auto a : c.objects()) {
    if (!x.has(a)) continue;
    const Matrix& xa = x.at(a);
    z.check_feature(a, xa, "layers");
    Matrix y_out = k.bias_at(a);
    for (auto u : c.incoming(a)) {
      const double mu = c.weight(u);
      if (mu == 0.0) continue;
      const auto& tau = z.tau(u);
      const auto& pi = z.pi(u);
      const Matrix& L = z.transport(u);
      for (std::size_t y = 0; y < z.base_size(a); ++y) {
        const auto p = Eigen::Index(pi[tau[y]]);
        y_out.row(Eigen::Index(y)) += mu * (k.entry(u, y) * (L * xa.row(p).transpose())).transpose();
      }
    }
    out.set(a, std::move(y_out));
  }
  return out;
}

Section gate_forward(const Activation& alpha, const ScalarChannel& s, const Section& z) {
  return gate_forward(alpha, std::vector<GateBlock>{GateBlock{0, GateBlock::npos, s}}, z);
}

Section gate_forward(const Activation& alpha, const std::vector<GateBlock>& blocks, const Section& z) {
  const auto& f = *z.functor();
  const auto& c = f.category();
  Section out(z.functor());
  for (auto a : c.objects()) {
    if (!z.has(a)) continue;
    Matrix za = z.at(a);
    const Vector flat = flatten(za);
    Matrix result = za;
    const auto n = f.fiber_dim(a);
    for (const auto& block : blocks) {
      if (block.channel.size() != c.object_count())
        throw Error(ErrorKind::shape_mismatch, "layers", "scalar channel must cover every object");
      const Matrix& s = block.channel[a];
      if (s.rows() != Eigen::Index(f.base_size(a)) || s.cols() != Eigen::Index(f.section_dim(a)))
        throw Error(ErrorKind::shape_mismatch, "layers",
                    "scalar channel at '" + c.object_name(a) + "' does not match the functor", c.object_name(a));
      if (block.offset > n) throw Error(ErrorKind::shape_mismatch, "layers", "gate block starts past the fiber");
      const auto size = std::min(block.size, n - block.offset);
      const Vector r = s * flat;
      for (std::size_t y = 0; y < f.base_size(a); ++y) {
        const double g = alpha(r(Eigen::Index(y)));
        result.row(Eigen::Index(y)).segment(Eigen::Index(block.offset), Eigen::Index(size)) *= g;
      }
    }
    out.set(a, std::move(result));
  }
  return out;
}

BundleSection bundle_lift(const FeatureFunctor& f, const FunctorPtr& fp, const Matrix& x_a, ObjectIndex a) {
  const auto& c = f.category();
  BundleSection h{fp, a, {}};
  for (auto u : c.incoming(a)) h.components.push_back(f.apply(u, x_a));
  return h;
}

BundleSection bundle_lift(const FunctorPtr& f, const Section& x, ObjectIndex a) {
  return bundle_lift(*f, f, x.at(a), a);
}

BundleSection bundle_reindex(ArrowIndex w, const BundleSection& h) {
  const auto& c = h.functor->category();
  if (c.tgt(w) != h.object)
    throw Error(ErrorKind::shape_mismatch, "layers", "reindexing arrow must end at the bundle's object",
                c.arrow_id(w));
  const auto a = c.src(w);
  BundleSection out{h.functor, a, {}};
  for (auto u : c.incoming(a)) out.components.push_back(h.at(c.composite(w, u)));
  return out;
}

// ---- objectwise maps ----

ObjectwiseMap::ObjectwiseMap(FunctorPtr in, FunctorPtr out)
    : input(std::move(in)), output(std::move(out)), stages(input->category().object_count()) {}

ObjectwiseMap ObjectwiseMap::identity(FunctorPtr f) {
  ObjectwiseMap m(f, f);
  for (auto a : f->category().objects()) m.stages[a] = std::vector<Stage>{};
  return m;
}

ObjectwiseMap ObjectwiseMap::zero(FunctorPtr in, FunctorPtr out) {
  ObjectwiseMap m(in, out);
  for (auto a : in->category().objects())
    m.stages[a] = std::vector<Stage>{AffineStage{
        Matrix::Zero(Eigen::Index(out->section_dim(a)), Eigen::Index(in->section_dim(a))),
        Vector::Zero(Eigen::Index(out->section_dim(a)))}};
  return m;
}

ObjectwiseMap ObjectwiseMap::affine(FunctorPtr in, FunctorPtr out, const ObjectMap<Matrix>& weight,
                                    const ObjectMap<Vector>& bias) {
  ObjectwiseMap m(in, out);
  for (auto a : in->category().objects()) m.stages[a] = std::vector<Stage>{AffineStage{weight[a], bias[a]}};
  return m;
}

Matrix ObjectwiseMap::apply(ObjectIndex b, const Matrix& feature) const {
  const auto& c = input->category();
  if (!stages[b])
    throw Error(ErrorKind::malformed_input, "layers", "no objectwise map at '" + c.object_name(b) + "'",
                c.object_name(b));
  input->check_feature(b, feature, "layers");
  const auto points = Eigen::Index(input->base_size(b));
  Matrix cur = feature;
  for (const auto& stage : *stages[b]) {
    if (const auto* s = std::get_if<AffineStage>(&stage)) {
      if (s->weight.cols() != cur.size() || s->bias.size() != s->weight.rows() ||
          (points > 0 && s->weight.rows() % points != 0))
        throw Error(ErrorKind::shape_mismatch, "layers",
                    "affine stage at '" + c.object_name(b) + "' does not fit its input", c.object_name(b));
      const Vector v = s->weight * flatten(cur) + s->bias;
      cur = unflatten(v, points, points > 0 ? s->weight.rows() / points : 0);
    } else if (const auto* s = std::get_if<ActivationStage>(&stage)) {
      cur = cur.unaryExpr([&](double t) { return s->alpha(t); });
    } else if (const auto* s = std::get_if<ClipStage>(&stage)) {
      cur = cur.cwiseMax(-s->radius).cwiseMin(s->radius);
    } else if (const auto* s = std::get_if<FragmentStage>(&stage)) {
      cur = network_forward(*s->network, b, cur);
    }
  }
  output->check_feature(b, cur, "layers");
  return cur;
}

std::optional<double> ObjectwiseMap::lipschitz_bound(ObjectIndex b) const {
  if (!stages[b]) return std::nullopt;
  double bound = 1.0;
  for (const auto& stage : *stages[b]) {
    if (const auto* s = std::get_if<AffineStage>(&stage)) bound *= operator_norm(s->weight);
    else if (const auto* s = std::get_if<ActivationStage>(&stage)) bound *= s->alpha.lipschitz();
    else if (std::holds_alternative<FragmentStage>(stage)) return std::nullopt;
  }
  return bound;
}

BundleSection componentwise_lift(const ObjectwiseMap& h_map, const BundleSection& h) {
  const auto& c = h_map.input->category();
  check_bundle(*h_map.input, h);
  BundleSection out{h_map.output, h.object, {}};
  for (auto u : c.incoming(h.object)) {
    const auto b = c.src(u);
    if (h_map.has(b)) {
      out.components.push_back(h_map.apply(b, h.at(u)));
    } else if (c.weight(u) == 0.0) {
      out.components.push_back(h_map.output->zero_feature(b));
    } else {
      throw Error(ErrorKind::malformed_input, "layers",
                  "componentwise lift has no map at '" + c.object_name(b) + "' (needed by arrow '" +
                      c.arrow_id(u) + "')",
                  c.arrow_id(u));
    }
  }
  return out;
}

Matrix bundle_conv_forward(const CategoryKernel& k, const BundleSection& h) {
  if (k.regime() == Regime::IN || k.regime() == Regime::pointwise_steerable)
    throw Error(ErrorKind::regime_mismatch, "layers", "bundle convolution needs an IN_bundle or IN_probe kernel",
                to_string(k.regime()));
  if (k.regime() == Regime::IN_probe && !k.probe())
    throw Error(ErrorKind::regime_mismatch, "layers", "IN_probe kernel carries no probe family");
  const auto& z = *k.source();
  const auto& c = z.category();
  check_bundle(z, h);
  const auto a = h.object;
  const bool use_probe = k.probe().has_value() && k.regime() != Regime::IN_bundle;
  Matrix out = k.bias_at(a);
  for (auto u : c.incoming(a)) {
    const double mu = c.weight(u);
    if (mu == 0.0) continue;
    const auto& eval = use_probe ? k.probe()->sigma[u] : z.tau(u);
    const Matrix& hu = h.at(u);
    for (std::size_t y = 0; y < z.base_size(a); ++y)
      out.row(Eigen::Index(y)) += mu * (k.entry(u, y) * hu.row(Eigen::Index(eval[y])).transpose()).transpose();
  }
  return out;
}

Section bundle_conv_forward(const CategoryKernel& k, const BundleField& h) {
  Section out(k.target());
  for (auto a : k.category().objects())
    if (h.has(a)) out.set(a, bundle_conv_forward(k, h.at(a)));
  return out;
}

}  // namespace cenn
