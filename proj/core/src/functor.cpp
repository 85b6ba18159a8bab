#include "cenn/functor.hpp"

#include <algorithm>
#include <cmath>

namespace cenn {

namespace {

[[noreturn]] void malformed(const std::string& msg, nlohmann::json witness = nullptr) {
  throw Error(ErrorKind::malformed_input, "functors", msg, std::move(witness));
}

std::string point_list(const std::vector<std::size_t>& pts) {
  std::string s = "[";
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? "," : "") + std::to_string(pts[i]);
  return s + "]";
}

}  // namespace

FeatureFunctor::FeatureFunctor(CategoryPtr cat, ObjectMap<std::vector<std::string>> base,
                               ObjectMap<std::size_t> fiber_dim, ArrowMap<PointMap> tau,
                               ArrowMap<PointMap> pi, ArrowMap<Matrix> transport)
    : cat_(std::move(cat)),
      base_(std::move(base)),
      fiber_dim_(std::move(fiber_dim)),
      tau_(std::move(tau)),
      pi_(std::move(pi)),
      transport_(std::move(transport)) {
  if (!cat_) malformed("functor needs a category");
  const auto& c = *cat_;
  if (base_.size() != c.object_count() || fiber_dim_.size() != c.object_count())
    malformed("base/fiber tables must cover every object");
  if (tau_.size() != c.arrow_count() || pi_.size() != c.arrow_count() ||
      transport_.size() != c.arrow_count())
    malformed("tau/pi/L tables must cover every arrow");
  for (auto u : c.arrows()) {
    const auto a = c.tgt(u);
    const auto b = c.src(u);
    const auto& t = tau_[u];
    const auto& p = pi_[u];
    if (t.size() != base_size(a))
      malformed("tau of arrow '" + c.arrow_id(u) + "' must be defined on every point of its target",
                c.arrow_id(u));
    if (p.size() != base_size(b))
      malformed("pi of arrow '" + c.arrow_id(u) + "' must be defined on every point of its source",
                c.arrow_id(u));
    if (std::ranges::any_of(t, [&](std::size_t y) { return y >= base_size(b); }) ||
        std::ranges::any_of(p, [&](std::size_t y) { return y >= base_size(a); }))
      malformed("base map of arrow '" + c.arrow_id(u) + "' leaves its codomain", c.arrow_id(u));
  }
}

FeatureFunctor FeatureFunctor::pointwise(CategoryPtr cat, ObjectMap<std::size_t> fiber_dim,
                                         ArrowMap<Matrix> transport) {
  const auto n_obj = cat->object_count();
  const auto n_arr = cat->arrow_count();
  return FeatureFunctor(cat, ObjectMap<std::vector<std::string>>(n_obj, {"*"}), std::move(fiber_dim),
                        ArrowMap<PointMap>(n_arr, PointMap{0}), ArrowMap<PointMap>(n_arr, PointMap{0}),
                        std::move(transport));
}

FeatureFunctor FeatureFunctor::scalar(const FeatureFunctor& like, std::size_t m) {
  const auto& c = like.category();
  ArrowMap<Matrix> L(c.arrow_count());
  for (auto u : c.arrows()) L[u] = Matrix::Identity(Eigen::Index(m), Eigen::Index(m));
  return with_fibers(like, ObjectMap<std::size_t>(c.object_count(), m), std::move(L));
}

FeatureFunctor FeatureFunctor::with_fibers(const FeatureFunctor& like, ObjectMap<std::size_t> fiber_dim,
                                           ArrowMap<Matrix> transport) {
  return FeatureFunctor(like.cat_, like.base_, std::move(fiber_dim), like.tau_, like.pi_,
                        std::move(transport));
}

double FeatureFunctor::transport_bound(ObjectIndex a) const {
  double h = 0.0;
  for (auto u : cat_->incoming(a))
    if (cat_->weight(u) > 0.0) h = std::max(h, operator_norm(transport_[u]));
  return h;
}

Matrix FeatureFunctor::apply(ArrowIndex u, const Matrix& feature) const {
  const auto a = cat_->tgt(u);
  const auto b = cat_->src(u);
  check_feature(a, feature, "functors");
  const Matrix& L = transport_[u];
  if (L.rows() != Eigen::Index(fiber_dim(b)) || L.cols() != Eigen::Index(fiber_dim(a)))
    throw Error(ErrorKind::shape_mismatch, "functors",
                "transport of arrow '" + cat_->arrow_id(u) + "' has the wrong shape", cat_->arrow_id(u));
  Matrix out(Eigen::Index(base_size(b)), Eigen::Index(fiber_dim(b)));
  const auto& p = pi_[u];
  for (std::size_t y = 0; y < base_size(b); ++y)
    out.row(Eigen::Index(y)) = (L * feature.row(Eigen::Index(p[y])).transpose()).transpose();
  return out;
}

Matrix FeatureFunctor::zero_feature(ObjectIndex a) const {
  return Matrix::Zero(Eigen::Index(base_size(a)), Eigen::Index(fiber_dim(a)));
}

void FeatureFunctor::check_feature(ObjectIndex a, const Matrix& feature, const char* module) const {
  if (feature.rows() != Eigen::Index(base_size(a)) || feature.cols() != Eigen::Index(fiber_dim(a)))
    throw Error(ErrorKind::shape_mismatch, module,
                "feature at '" + cat_->object_name(a) + "' has shape " + std::to_string(feature.rows()) +
                    "x" + std::to_string(feature.cols()) + ", expected " + std::to_string(base_size(a)) +
                    "x" + std::to_string(fiber_dim(a)),
                cat_->object_name(a));
}

std::size_t FeatureFunctor::point_index(ObjectIndex a, std::string_view point) const {
  const auto& pts = base_[a];
  auto it = std::ranges::find(pts, point);
  if (it == pts.end())
    malformed("unknown base point '" + std::string(point) + "' at '" + cat_->object_name(a) + "'",
              std::string(point));
  return std::size_t(it - pts.begin());
}

bool operator==(const FeatureFunctor& x, const FeatureFunctor& y) {
  if (&x == &y) return true;
  if (x.cat_ != y.cat_ && !(*x.cat_ == *y.cat_)) return false;
  if (x.base_ != y.base_ || x.fiber_dim_ != y.fiber_dim_ || x.tau_ != y.tau_ || x.pi_ != y.pi_)
    return false;
  for (std::size_t i = 0; i < x.transport_.size(); ++i) {
    const auto& l = x.transport_.raw()[i];
    const auto& r = y.transport_.raw()[i];
    if (l.rows() != r.rows() || l.cols() != r.cols() || l != r) return false;
  }
  return true;
}

Section::Section(FunctorPtr functor)
    : functor_(std::move(functor)), data_(functor_->category().object_count()) {}

const Matrix& Section::at(ObjectIndex a) const {
  if (!data_[a])
    throw Error(ErrorKind::malformed_input, "functors",
                "section is not populated at '" + functor_->category().object_name(a) + "'",
                functor_->category().object_name(a));
  return *data_[a];
}

void Section::set(ObjectIndex a, Matrix feature) {
  functor_->check_feature(a, feature, "functors");
  data_[a] = std::move(feature);
}

bool operator==(const Section& x, const Section& y) {
  if (x.data_.size() != y.data_.size()) return false;
  for (std::size_t i = 0; i < x.data_.size(); ++i) {
    const auto& l = x.data_.raw()[i];
    const auto& r = y.data_.raw()[i];
    if (l.has_value() != r.has_value()) return false;
    if (l && (l->rows() != r->rows() || l->cols() != r->cols() || *l != *r)) return false;
  }
  return true;
}

ProbeFamily ProbeFamily::from_tau(const FeatureFunctor& f) {
  ProbeFamily p;
  p.sigma = ArrowMap<PointMap>(f.category().arrow_count());
  for (auto u : f.category().arrows()) p.sigma[u] = f.tau(u);
  return p;
}

ProbeFamily ProbeFamily::identity(const FeatureFunctor& f) {
  const auto& c = f.category();
  ProbeFamily p;
  p.sigma = ArrowMap<PointMap>(c.arrow_count());
  for (auto u : c.arrows()) {
    const auto na = f.base_size(c.tgt(u));
    if (na != f.base_size(c.src(u)))
      throw Error(ErrorKind::unsupported, "functors",
                  "identity probe needs equal base sizes along arrow '" + c.arrow_id(u) + "'",
                  c.arrow_id(u));
    PointMap m(na);
    for (std::size_t y = 0; y < na; ++y) m[y] = y;
    p.sigma[u] = std::move(m);
  }
  return p;
}

ValidationReport ProbeFamily::validate(const FeatureFunctor& f) const {
  ValidationReport report;
  const auto& c = f.category();
  if (sigma.size() != c.arrow_count()) {
    report.add("shape", {}, 0.0, "probe family must cover every arrow");
    return report;
  }
  for (auto u : c.arrows()) {
    const auto& s = sigma[u];
    if (s.size() != f.base_size(c.tgt(u)) ||
        std::ranges::any_of(s, [&](std::size_t y) { return y >= f.base_size(c.src(u)); })) {
      report.add("shape", {c.arrow_id(u)}, 0.0, "probe map has wrong domain or codomain");
      continue;
    }
    if (c.is_identity(u))
      for (std::size_t y = 0; y < s.size(); ++y)
        if (s[y] != y) {
          report.add("identity", {c.arrow_id(u)}, 0.0, "sigma of an identity must be the identity");
          break;
        }
  }
  return report;
}

ValidationReport validate_functor(const FiniteCategory& cat, const FeatureFunctor& f, double tol) {
  ValidationReport report;
  const auto& id = [&](ArrowIndex u) { return cat.arrow_id(u); };

  bool shapes_ok = true;
  for (auto u : cat.arrows()) {
    const Matrix& L = f.transport(u);
    const auto rows = Eigen::Index(f.fiber_dim(cat.src(u)));
    const auto cols = Eigen::Index(f.fiber_dim(cat.tgt(u)));
    if (L.rows() != rows || L.cols() != cols) {
      shapes_ok = false;
      report.add("shape", {id(u)}, 0.0,
                 "L is " + std::to_string(L.rows()) + "x" + std::to_string(L.cols()) + ", expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  for (auto a : cat.objects()) {
    const auto e = cat.identity(a);
    const auto& t = f.tau(e);
    const auto& p = f.pi(e);
    for (std::size_t y = 0; y < t.size(); ++y)
      if (t[y] != y || p[y] != y) {
        report.add("identity_base", {id(e)}, 0.0, "tau/pi of an identity must be the identity");
        break;
      }
    if (shapes_ok) {
      const Matrix& L = f.transport(e);
      const double r = sup_norm(L - Matrix::Identity(L.rows(), L.cols()));
      if (r > tol) report.add("identity_fiber", {id(e)}, r);
    }
  }

  for (auto u : cat.arrows())
    for (auto v : cat.incoming(cat.src(u))) {
      auto uv = cat.compose(u, v);
      if (!uv) continue;
      // τ_{u∘v} = τ_v ∘ τ_u on Ω(tgt u).
      const auto& t_uv = f.tau(*uv);
      const auto& t_u = f.tau(u);
      const auto& t_v = f.tau(v);
      std::vector<std::size_t> bad;
      for (std::size_t y = 0; y < t_uv.size(); ++y)
        if (t_uv[y] != t_v[t_u[y]]) bad.push_back(y);
      if (!bad.empty())
        report.add("functoriality_tau", {id(u), id(v)}, double(bad.size()), "points " + point_list(bad));
      // π_{u∘v} = π_u ∘ π_v on Ω(src v).
      const auto& p_uv = f.pi(*uv);
      const auto& p_u = f.pi(u);
      const auto& p_v = f.pi(v);
      bad.clear();
      for (std::size_t y = 0; y < p_uv.size(); ++y)
        if (p_uv[y] != p_u[p_v[y]]) bad.push_back(y);
      if (!bad.empty())
        report.add("functoriality_pi", {id(u), id(v)}, double(bad.size()), "points " + point_list(bad));
      // L_{u∘v} = L_v · L_u.
      if (shapes_ok) {
        const double r = sup_norm(f.transport(*uv) - f.transport(v) * f.transport(u));
        if (r > tol) report.add("functoriality_L", {id(u), id(v)}, r);
      }
    }

  // Mixed-base law: τ_{w∘u} ∘ π_w = τ_u on Ω(src w) for w: a→c, u ∈ I(a).
  for (auto w : cat.arrows())
    for (auto u : cat.incoming(cat.src(w))) {
      auto wu = cat.compose(w, u);
      if (!wu) continue;
      const auto& t_wu = f.tau(*wu);
      const auto& p_w = f.pi(w);
      const auto& t_u = f.tau(u);
      std::size_t disagreements = 0;
      for (std::size_t y = 0; y < t_u.size(); ++y)
        if (t_wu[p_w[y]] != t_u[y]) ++disagreements;
      if (disagreements)
        report.add("mixed_base", {id(w), id(u)}, double(disagreements));
    }
  return report;
}

Matrix transport_operator(const FeatureFunctor& f, ArrowIndex u) {
  const auto& c = f.category();
  const auto a = c.tgt(u);
  const auto b = c.src(u);
  const Matrix& L = f.transport(u);
  const auto na = Eigen::Index(f.fiber_dim(a));
  const auto nb = Eigen::Index(f.fiber_dim(b));
  if (L.rows() != nb || L.cols() != na)
    throw Error(ErrorKind::shape_mismatch, "functors",
                "transport of arrow '" + c.arrow_id(u) + "' has the wrong shape", c.arrow_id(u));
  Matrix T = Matrix::Zero(Eigen::Index(f.section_dim(b)), Eigen::Index(f.section_dim(a)));
  const auto& p = f.pi(u);
  for (std::size_t y = 0; y < f.base_size(b); ++y)
    T.block(Eigen::Index(y) * nb, Eigen::Index(p[y]) * na, nb, na) = L;
  return T;
}

ValidationReport check_separation(const FeatureFunctor& f, const ProbeFamily& sigma, ObjectIndex a,
                                  const std::vector<Matrix>& samples, double tol) {
  ValidationReport report;
  const auto& c = f.category();
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      if (sup_norm(samples[i] - samples[j]) <= tol) continue;
      for (std::size_t y = 0; y < f.base_size(a); ++y) {
        bool separated = false;
        for (auto u : c.incoming(a)) {
          const Matrix xi = f.apply(u, samples[i]);
          const Matrix xj = f.apply(u, samples[j]);
          const auto p = Eigen::Index(sigma.sigma[u][y]);
          if (sup_norm(xi.row(p) - xj.row(p)) > tol) {
            separated = true;
            break;
          }
        }
        if (!separated)
          report.add("separation", {std::to_string(i), std::to_string(j), f.base(a)[y]}, 0.0,
                     "no incoming arrow separates the pair at this point (finite-sample check)");
      }
    }
  return report;
}

}  // namespace cenn
