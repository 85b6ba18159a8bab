#include "cenn/constraints.hpp"

#include <algorithm>
#include <map>

namespace cenn {

namespace {

/// Accumulates rows sparsely and drops identically-zero rows.
class RowBuilder {
 public:
  explicit RowBuilder(std::size_t cols) : scratch_(cols, 0.0), mark_(cols, 0) {}

  void add(std::size_t col, double value) {
    if (col == KernelLayout::npos || value == 0.0) return;
    if (!mark_[col]) {
      mark_[col] = 1;
      touched_.push_back(col);
    }
    scratch_[col] += value;
  }

  void commit(RowProvenance prov) {
    std::vector<std::pair<std::size_t, double>> row;
    for (auto c : touched_) {
      if (scratch_[c] != 0.0) row.emplace_back(c, scratch_[c]);
      scratch_[c] = 0.0;
      mark_[c] = 0;
    }
    touched_.clear();
    if (row.empty()) return;
    std::ranges::sort(row);
    rows_.push_back(std::move(row));
    provenance_.push_back(std::move(prov));
  }

  Matrix matrix() const {
    Matrix m = Matrix::Zero(Eigen::Index(rows_.size()), Eigen::Index(scratch_.size()));
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (const auto& [c, v] : rows_[i]) m(Eigen::Index(i), Eigen::Index(c)) = v;
    return m;
  }

  std::vector<RowProvenance> take_provenance() { return std::move(provenance_); }

 private:
  std::vector<double> scratch_;
  std::vector<char> mark_;
  std::vector<std::size_t> touched_;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
  std::vector<RowProvenance> provenance_;
};

std::string basis_label(std::size_t p, std::size_t j) {
  return "p=" + std::to_string(p) + ",j=" + std::to_string(j);
}

std::string basis_label(const std::string& u, std::size_t p, std::size_t j) {
  return "u=" + u + "," + basis_label(p, j);
}

void check_pair(const FeatureFunctor& z, const FeatureFunctor& zp) {
  if (!(z.category() == zp.category()))
    throw Error(ErrorKind::shape_mismatch, "kernels", "functors live on different categories");
  for (auto a : z.category().objects())
    if (z.base_size(a) != zp.base_size(a))
      throw Error(ErrorKind::shape_mismatch, "kernels",
                  "functors disagree on the base set at '" + z.category().object_name(a) + "'",
                  z.category().object_name(a));
}

/// Point maps used when evaluating a bundle component: τ or a probe σ.
const PointMap& evaluation_map(const FeatureFunctor& z, const std::optional<ProbeFamily>& probe, ArrowIndex u) {
  return probe ? probe->sigma[u] : z.tau(u);
}

}  // namespace

std::string to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::IN: return "IN";
    case ConstraintKind::IN_bundle: return "IN_bundle";
    case ConstraintKind::IN_probe: return "IN_probe";
    case ConstraintKind::steerability: return "steerability";
    case ConstraintKind::bias: return "bias";
    case ConstraintKind::scalar_channel: return "scalar_channel";
  }
  return "IN";
}

KernelLayout::KernelLayout(FunctorPtr source, FunctorPtr target, KernelSupport support)
    : source_(std::move(source)), target_(std::move(target)), support_(support) {
  check_pair(*source_, *target_);
  const auto& c = source_->category();
  offset_ = ArrowMap<std::size_t>(c.arrow_count(), npos);
  for (auto u : c.arrows()) {
    if (support_ == KernelSupport::identity_only && !c.is_identity(u)) continue;
    offset_[u] = unknowns_.size();
    const auto a = c.tgt(u);
    const auto rows = target_->fiber_dim(a);
    const auto cols = source_->fiber_dim(c.src(u));
    for (std::size_t y = 0; y < target_->base_size(a); ++y)
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t s = 0; s < cols; ++s) unknowns_.push_back({u, y, r, s});
  }
}

std::size_t KernelLayout::column(ArrowIndex u, std::size_t y, std::size_t r, std::size_t s) const {
  if (offset_[u] == npos) return npos;
  const auto& c = source_->category();
  const auto rows = target_->fiber_dim(c.tgt(u));
  const auto cols = source_->fiber_dim(c.src(u));
  return offset_[u] + (y * rows + r) * cols + s;
}

CategoryKernel KernelLayout::reshape(const Vector& v, Regime regime) const {
  if (std::size_t(v.size()) != size())
    throw Error(ErrorKind::shape_mismatch, "kernels", "coefficient vector does not match the layout");
  CategoryKernel k(source_, target_, regime);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& q = unknowns_[i];
    k.entry(q.arrow, q.point)(Eigen::Index(q.row), Eigen::Index(q.col)) = v(Eigen::Index(i));
  }
  return k;
}

Vector KernelLayout::flatten(const CategoryKernel& k) const {
  Vector v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& q = unknowns_[i];
    v(Eigen::Index(i)) = k.entry(q.arrow, q.point)(Eigen::Index(q.row), Eigen::Index(q.col));
  }
  return v;
}

Regime ConstraintSystem::regime() const {
  switch (kind) {
    case ConstraintKind::IN: return Regime::IN;
    case ConstraintKind::IN_bundle: return Regime::IN_bundle;
    case ConstraintKind::IN_probe: return Regime::IN_probe;
    case ConstraintKind::steerability: return Regime::pointwise_steerable;
    default: return Regime::unconstrained;
  }
}

double ConstraintSystem::residual(const CategoryKernel& k) const {
  if (matrix.rows() == 0) return 0.0;
  return sup_norm(matrix * layout.flatten(k));
}

nlohmann::json ConstraintSystem::provenance_json() const {
  const auto& z = *layout.source();
  const auto& c = z.category();
  nlohmann::json unknowns = nlohmann::json::array();
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& q = layout[i];
    unknowns.push_back(c.arrow_id(q.arrow) + "@" + z.base(c.tgt(q.arrow))[q.point] + "[" +
                       std::to_string(q.row) + "," + std::to_string(q.col) + "]");
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : provenance)
    rows.push_back({{"kind", to_string(p.kind)},
                    {"w", c.arrow_id(p.w)},
                    {"y", p.y},
                    {"basis", p.basis},
                    {"output", p.output}});
  return {{"kind", to_string(kind)},
          {"support", layout.support() == KernelSupport::all_arrows ? "all" : "identity_only"},
          {"shape", {matrix.rows(), matrix.cols()}},
          {"unknowns", std::move(unknowns)},
          {"rows", std::move(rows)}};
}

ConstraintSystem assemble_in_constraints(FunctorPtr source, FunctorPtr target, Regime kind,
                                         const std::optional<ProbeFamily>& probe, KernelSupport support) {
  if (kind != Regime::IN && kind != Regime::IN_bundle && kind != Regime::IN_probe)
    throw Error(ErrorKind::regime_mismatch, "kernels", "integrated naturality needs IN, IN_bundle or IN_probe",
                to_string(kind));
  if (kind == Regime::IN_probe && !probe)
    throw Error(ErrorKind::malformed_input, "kernels", "IN_probe requires a probe family");
  KernelLayout layout(source, target, support);
  const auto& z = *source;
  const auto& zp = *target;
  const auto& c = z.category();
  if (kind == Regime::IN_probe) {
    auto report = probe->validate(z);
    if (!report.ok())
      throw Error(ErrorKind::malformed_input, "kernels", "probe family is invalid", report.to_json());
  }
  const std::optional<ProbeFamily> eval_probe = kind == Regime::IN_probe ? probe : std::nullopt;

  RowBuilder rows(layout.size());
  const ConstraintKind ck = kind == Regime::IN           ? ConstraintKind::IN
                            : kind == Regime::IN_bundle ? ConstraintKind::IN_bundle
                                                        : ConstraintKind::IN_probe;

  for (auto w : c.arrows()) {
    const auto a = c.src(w);
    const auto cc = c.tgt(w);
    const Matrix& Lw = zp.transport(w);
    const auto n_out = zp.fiber_dim(a);
    for (std::size_t y = 0; y < z.base_size(a); ++y) {
      const std::size_t wy = zp.pi(w)[y];
      if (kind == Regime::IN) {
        for (std::size_t p = 0; p < z.base_size(cc); ++p)
          for (std::size_t j = 0; j < z.fiber_dim(cc); ++j)
            for (std::size_t i = 0; i < n_out; ++i) {
              // L'_w Σ_{u'∈I(c)} μ(u') K(u', π_w y) L_{u'} x(π_{u'} τ_{u'} π_w y)
              for (auto up : c.incoming(cc)) {
                const auto b = c.src(up);
                if (z.pi(up)[z.tau(up)[wy]] != p) continue;
                const double mu = c.weight(up);
                for (std::size_t r = 0; r < zp.fiber_dim(cc); ++r)
                  for (std::size_t s = 0; s < z.fiber_dim(b); ++s)
                    rows.add(layout.column(up, wy, r, s),
                             mu * Lw(Eigen::Index(i), Eigen::Index(r)) *
                                 z.transport(up)(Eigen::Index(s), Eigen::Index(j)));
              }
              // − Σ_{u∈I(a)} μ(u) K(u, y) L_{w∘u} x(π_{w∘u} τ_u y)
              for (auto u : c.incoming(a)) {
                const auto b = c.src(u);
                const auto wu = c.composite(w, u);
                if (z.pi(wu)[z.tau(u)[y]] != p) continue;
                const double mu = c.weight(u);
                for (std::size_t s = 0; s < z.fiber_dim(b); ++s)
                  rows.add(layout.column(u, y, i, s), -mu * z.transport(wu)(Eigen::Index(s), Eigen::Index(j)));
              }
              rows.commit({ck, w, y, basis_label(p, j), i});
            }
      } else {
        for (auto u0 : c.incoming(cc)) {
          const auto b = c.src(u0);
          for (std::size_t p = 0; p < z.base_size(b); ++p)
            for (std::size_t j = 0; j < z.fiber_dim(b); ++j)
              for (std::size_t i = 0; i < n_out; ++i) {
                if (evaluation_map(z, eval_probe, u0)[wy] == p) {
                  const double mu = c.weight(u0);
                  for (std::size_t r = 0; r < zp.fiber_dim(cc); ++r)
                    rows.add(layout.column(u0, wy, r, j), mu * Lw(Eigen::Index(i), Eigen::Index(r)));
                }
                for (auto u : c.incoming(a)) {
                  if (c.compose(w, u) != u0) continue;
                  if (evaluation_map(z, eval_probe, u)[y] != p) continue;
                  rows.add(layout.column(u, y, i, j), -c.weight(u));
                }
                rows.commit({ck, w, y, basis_label(c.arrow_id(u0), p, j), i});
              }
        }
      }
    }
  }
  Matrix m = rows.matrix();
  return ConstraintSystem{ck, std::move(layout), std::move(m), rows.take_provenance(), eval_probe};
}

ConstraintSystem assemble_steerability_constraints(FunctorPtr source, FunctorPtr target) {
  const auto& c = source->category();
  if (c.object_count() != 1 || !c.is_groupoid())
    throw Error(ErrorKind::not_a_group, "kernels",
                "pointwise steerability needs a one-object category built from a finite group");
  KernelLayout layout(source, target, KernelSupport::all_arrows);
  const auto& zp = *target;
  const ObjectIndex star{0};
  const auto n_out = zp.fiber_dim(star);
  const auto n_in = source->fiber_dim(star);
  RowBuilder rows(layout.size());
  for (auto h : c.arrows())
    for (auto g : c.arrows()) {
      const auto hg = c.composite(h, g);
      const Matrix& rho = zp.transport(h);
      for (std::size_t y = 0; y < zp.base_size(star); ++y) {
        const auto hy = zp.pi(h)[y];
        for (std::size_t i = 0; i < n_out; ++i)
          for (std::size_t s = 0; s < n_in; ++s) {
            for (std::size_t r = 0; r < n_out; ++r)
              rows.add(layout.column(hg, hy, r, s), rho(Eigen::Index(i), Eigen::Index(r)));
            rows.add(layout.column(g, y, i, s), -1.0);
            rows.commit({ConstraintKind::steerability, h, y,
                         "g=" + c.arrow_id(g) + ",s=" + std::to_string(s), i});
          }
      }
    }
  Matrix m = rows.matrix();
  return ConstraintSystem{ConstraintKind::steerability, std::move(layout), std::move(m), rows.take_provenance(),
                          std::nullopt};
}

ParameterBasis solve_parameter_space(const ConstraintSystem& sys, double tol) {
  if (sys.unknown_count() == 0)
    throw Error(ErrorKind::empty_unknowns, "kernels", "constraint system has no unknowns");
  ParameterBasis out;
  const Matrix null = nullspace(sys.matrix, tol, &out.singular_values, &out.rank);
  for (Eigen::Index k = 0; k < null.cols(); ++k) {
    auto kernel = sys.layout.reshape(null.col(k), sys.regime());
    if (sys.probe) kernel.set_probe(sys.probe);
    out.kernels.push_back(std::move(kernel));
  }
  return out;
}

// ---- natural bias ----

namespace {

struct BiasLayout {
  ObjectMap<std::size_t> offset;
  std::size_t size = 0;

  explicit BiasLayout(const FeatureFunctor& f) : offset(f.category().object_count()) {
    for (auto a : f.category().objects()) {
      offset[a] = size;
      size += f.section_dim(a);
    }
  }
  std::size_t column(const FeatureFunctor& f, ObjectIndex a, std::size_t p, std::size_t i) const {
    return offset[a] + p * f.fiber_dim(a) + i;
  }
};

Matrix bias_matrix(const FeatureFunctor& f, const BiasLayout& layout) {
  const auto& c = f.category();
  RowBuilder rows(layout.size);
  for (auto w : c.arrows()) {
    const auto a = c.src(w);
    const auto cc = c.tgt(w);
    for (std::size_t y = 0; y < f.base_size(a); ++y)
      for (std::size_t i = 0; i < f.fiber_dim(a); ++i) {
        for (std::size_t r = 0; r < f.fiber_dim(cc); ++r)
          rows.add(layout.column(f, cc, f.pi(w)[y], r), f.transport(w)(Eigen::Index(i), Eigen::Index(r)));
        rows.add(layout.column(f, a, y, i), -1.0);
        rows.commit({ConstraintKind::bias, w, y, {}, i});
      }
  }
  return rows.matrix();
}

}  // namespace

std::vector<ObjectMap<Matrix>> solve_natural_bias(const FeatureFunctor& target, double tol) {
  const BiasLayout layout(target);
  const auto& c = target.category();
  std::vector<ObjectMap<Matrix>> out;
  if (layout.size == 0) return out;
  const Matrix null = nullspace(bias_matrix(target, layout), tol);
  for (Eigen::Index k = 0; k < null.cols(); ++k) {
    ObjectMap<Matrix> b(c.object_count());
    for (auto a : c.objects())
      b[a] = unflatten(null.col(k).segment(Eigen::Index(layout.offset[a]), Eigen::Index(target.section_dim(a))),
                       Eigen::Index(target.base_size(a)), Eigen::Index(target.fiber_dim(a)));
    out.push_back(std::move(b));
  }
  return out;
}

double bias_residual(const FeatureFunctor& target, const ObjectMap<Matrix>& bias) {
  const auto& c = target.category();
  double r = 0.0;
  for (auto w : c.arrows())
    r = std::max(r, sup_norm(target.apply(w, bias[c.tgt(w)]) - bias[c.src(w)]));
  return r;
}

// ---- scalar channels ----

namespace {

/// Matrix of S(u): r ↦ r∘π_u from R^{Ω(a)} to R^{Ω(b)}.
Matrix point_pullback(const FeatureFunctor& f, ArrowIndex u) {
  const auto& c = f.category();
  const auto a = c.tgt(u);
  const auto b = c.src(u);
  Matrix p = Matrix::Zero(Eigen::Index(f.base_size(b)), Eigen::Index(f.base_size(a)));
  for (std::size_t y = 0; y < f.base_size(b); ++y) p(Eigen::Index(y), Eigen::Index(f.pi(u)[y])) = 1.0;
  return p;
}

}  // namespace

std::vector<ScalarChannel> solve_scalar_channels(const FeatureFunctor& f, double tol) {
  const auto& c = f.category();
  ObjectMap<std::size_t> offset(c.object_count());
  std::size_t size = 0;
  for (auto a : c.objects()) {
    offset[a] = size;
    size += f.base_size(a) * f.section_dim(a);
  }
  std::vector<ScalarChannel> out;
  if (size == 0) return out;
  // s_a stored row-major: entry (q, k) at offset[a] + q * section_dim(a) + k.
  auto col = [&](ObjectIndex a, std::size_t q, std::size_t k) { return offset[a] + q * f.section_dim(a) + k; };
  RowBuilder rows(size);
  for (auto u : c.arrows()) {
    const auto a = c.tgt(u);
    const auto b = c.src(u);
    const Matrix P = point_pullback(f, u);
    const Matrix T = transport_operator(f, u);
    // (P_u s_a - s_b T_u)(q, k) = 0 for q ∈ Ω(b), k < section_dim(a).
    for (std::size_t q = 0; q < f.base_size(b); ++q)
      for (std::size_t k = 0; k < f.section_dim(a); ++k) {
        for (std::size_t y = 0; y < f.base_size(a); ++y)
          rows.add(col(a, y, k), P(Eigen::Index(q), Eigen::Index(y)));
        for (std::size_t m = 0; m < f.section_dim(b); ++m)
          rows.add(col(b, q, m), -T(Eigen::Index(m), Eigen::Index(k)));
        rows.commit({ConstraintKind::scalar_channel, u, q, "k=" + std::to_string(k), 0});
      }
  }
  const Matrix null = nullspace(rows.matrix(), tol);
  for (Eigen::Index n = 0; n < null.cols(); ++n) {
    ScalarChannel s(c.object_count());
    for (auto a : c.objects()) {
      Matrix m(Eigen::Index(f.base_size(a)), Eigen::Index(f.section_dim(a)));
      for (Eigen::Index q = 0; q < m.rows(); ++q)
        for (Eigen::Index k = 0; k < m.cols(); ++k) m(q, k) = null(Eigen::Index(col(a, std::size_t(q), std::size_t(k))), n);
      s[a] = std::move(m);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double scalar_channel_residual(const FeatureFunctor& f, const ScalarChannel& s) {
  const auto& c = f.category();
  double r = 0.0;
  for (auto u : c.arrows()) {
    const Matrix lhs = point_pullback(f, u) * s[c.tgt(u)];
    const Matrix rhs = s[c.src(u)] * transport_operator(f, u);
    r = std::max(r, sup_norm(lhs - rhs));
  }
  return r;
}

ScalarChannel coordinate_channel(const FeatureFunctor& f, std::size_t j) {
  const auto& c = f.category();
  ScalarChannel s(c.object_count());
  for (auto a : c.objects()) {
    Matrix m = Matrix::Zero(Eigen::Index(f.base_size(a)), Eigen::Index(f.section_dim(a)));
    if (j < f.fiber_dim(a))
      for (std::size_t y = 0; y < f.base_size(a); ++y) m(Eigen::Index(y), Eigen::Index(y * f.fiber_dim(a) + j)) = 1.0;
    s[a] = std::move(m);
  }
  return s;
}

}  // namespace cenn
