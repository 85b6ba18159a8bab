#include "cenn/kernel.hpp"

#include <algorithm>

namespace cenn {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::IN: return "IN";
    case Regime::IN_bundle: return "IN_bundle";
    case Regime::IN_probe: return "IN_probe";
    case Regime::pointwise_steerable: return "pointwise_steerable";
    case Regime::unconstrained: return "unconstrained";
  }
  return "unconstrained";
}

Regime regime_from_string(std::string_view s) {
  if (s == "IN") return Regime::IN;
  if (s == "IN_bundle") return Regime::IN_bundle;
  if (s == "IN_probe") return Regime::IN_probe;
  if (s == "pointwise_steerable") return Regime::pointwise_steerable;
  if (s == "unconstrained") return Regime::unconstrained;
  throw Error(ErrorKind::malformed_input, "kernels", "unknown regime '" + std::string(s) + "'",
              std::string(s));
}

CategoryKernel::CategoryKernel(FunctorPtr source, FunctorPtr target, Regime regime)
    : source_(std::move(source)), target_(std::move(target)), regime_(regime) {
  if (!source_ || !target_) throw Error(ErrorKind::malformed_input, "kernels", "kernel needs two functors");
  const auto& c = source_->category();
  if (!(c == target_->category()))
    throw Error(ErrorKind::shape_mismatch, "kernels", "kernel functors live on different categories");
  entries_ = ArrowMap<std::vector<Matrix>>(c.arrow_count());
  for (auto u : c.arrows()) {
    const auto a = c.tgt(u);
    const auto b = c.src(u);
    entries_[u].assign(target_->base_size(a),
                       Matrix::Zero(Eigen::Index(target_->fiber_dim(a)), Eigen::Index(source_->fiber_dim(b))));
  }
  for (auto a : c.objects())
    if (source_->base_size(a) != target_->base_size(a))
      throw Error(ErrorKind::shape_mismatch, "kernels",
                  "source and target functors disagree on |Ω| at '" + c.object_name(a) + "'",
                  c.object_name(a));
}

void CategoryKernel::set_entry(ArrowIndex u, std::size_t y, Matrix m) {
  Matrix& slot = entries_[u].at(y);
  if (m.rows() != slot.rows() || m.cols() != slot.cols())
    throw Error(ErrorKind::shape_mismatch, "kernels",
                "kernel entry for '" + category().arrow_id(u) + "' must be " + std::to_string(slot.rows()) +
                    "x" + std::to_string(slot.cols()),
                category().arrow_id(u));
  slot = std::move(m);
}

void CategoryKernel::set_bias(ObjectMap<Matrix> bias) {
  const auto& c = category();
  if (bias.size() != c.object_count())
    throw Error(ErrorKind::shape_mismatch, "kernels", "bias must cover every object");
  for (auto a : c.objects()) target_->check_feature(a, bias[a], "kernels");
  bias_ = std::move(bias);
}

Matrix CategoryKernel::bias_at(ObjectIndex a) const {
  return bias_ ? (*bias_)[a] : target_->zero_feature(a);
}

CategoryKernel& CategoryKernel::operator*=(double s) {
  for (auto& per_arrow : entries_)
    for (auto& m : per_arrow) m *= s;
  if (bias_)
    for (auto& b : *bias_) b *= s;
  return *this;
}

CategoryKernel& CategoryKernel::operator+=(const CategoryKernel& other) {
  if (other.coefficient_count() != coefficient_count())
    throw Error(ErrorKind::shape_mismatch, "kernels", "adding kernels of different shapes");
  for (std::size_t i = 0; i < entries_.size(); ++i)
    for (std::size_t y = 0; y < entries_.raw()[i].size(); ++y)
      entries_.raw()[i][y] += other.entries_.raw()[i][y];
  if (other.bias_) {
    if (!bias_) bias_ = *other.bias_;
    else
      for (std::size_t a = 0; a < bias_->size(); ++a) bias_->raw()[a] += other.bias_->raw()[a];
  }
  return *this;
}

std::size_t CategoryKernel::coefficient_count() const {
  std::size_t n = 0;
  for (const auto& per_arrow : entries_)
    for (const auto& m : per_arrow) n += std::size_t(m.size());
  return n;
}

Vector CategoryKernel::coefficients() const {
  Vector v(static_cast<Eigen::Index>(coefficient_count()));
  Eigen::Index k = 0;
  for (const auto& per_arrow : entries_)
    for (const auto& m : per_arrow)
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index s = 0; s < m.cols(); ++s) v(k++) = m(r, s);
  return v;
}

void CategoryKernel::set_coefficients(const Vector& v) {
  if (std::size_t(v.size()) != coefficient_count())
    throw Error(ErrorKind::shape_mismatch, "kernels", "coefficient vector has the wrong length");
  Eigen::Index k = 0;
  for (auto& per_arrow : entries_)
    for (auto& m : per_arrow)
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index s = 0; s < m.cols(); ++s) m(r, s) = v(k++);
}

CategoryKernel identity_supported_kernel(FunctorPtr source, FunctorPtr target,
                                         const ObjectMap<Matrix>& per_object, Regime regime) {
  CategoryKernel k(std::move(source), std::move(target), regime);
  const auto& c = k.category();
  for (auto a : c.objects())
    for (std::size_t y = 0; y < k.target()->base_size(a); ++y) k.set_entry(c.identity(a), y, per_object[a]);
  return k;
}

L1Bound compute_l1_bound(const CategoryKernel& k, ObjectIndex a) {
  const auto& c = k.category();
  L1Bound out;
  for (auto u : c.incoming(a)) {
    double g = 0.0;
    for (std::size_t y = 0; y < k.target()->base_size(a); ++y) g = std::max(g, operator_norm(k.entry(u, y)));
    out.per_arrow.emplace_back(u, g);
    out.integral += c.weight(u) * g;
  }
  out.transport_bound = k.source()->transport_bound(a);
  out.lipschitz = out.transport_bound * out.integral;
  return out;
}

double check_pointwise_steerability(const CategoryKernel& k) {
  const auto& c = k.category();
  if (c.object_count() != 1 || !c.is_groupoid())
    throw Error(ErrorKind::not_a_group, "kernels",
                "pointwise steerability needs a one-object category built from a finite group");
  const auto& Y = *k.target();
  double residual = 0.0;
  for (auto h : c.arrows())
    for (auto g : c.arrows()) {
      const auto hg = c.composite(h, g);
      const Matrix& rho_y_hinv = Y.transport(h);
      for (std::size_t y = 0; y < Y.base_size(ObjectIndex{0}); ++y) {
        const std::size_t hy = Y.pi(h)[y];
        residual = std::max(residual, operator_norm(rho_y_hinv * k.entry(hg, hy) - k.entry(g, y)));
      }
    }
  return residual;
}

}  // namespace cenn
