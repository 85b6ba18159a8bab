#include "cenn/equivariance.hpp"

#include <algorithm>

namespace cenn {

Matrix random_feature(const FeatureFunctor& f, ObjectIndex a, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(Eigen::Index(f.base_size(a)), Eigen::Index(f.fiber_dim(a)));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = dist(rng);
  return m;
}

Section random_section(const FunctorPtr& f, Rng& rng, double lo, double hi) {
  Section s(f);
  for (auto a : f->category().objects()) s.set(a, random_feature(*f, a, rng, lo, hi));
  return s;
}

std::vector<Section> random_sections(const FunctorPtr& f, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Section> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_section(f, rng));
  return out;
}

const ArrowResidual* EquivarianceReport::witness() const {
  if (per_arrow.empty()) return nullptr;
  return &*std::ranges::max_element(per_arrow, {}, &ArrowResidual::residual);
}

nlohmann::json EquivarianceReport::to_json(const FiniteCategory& cat) const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : per_arrow)
    rows.push_back({{"arrow", cat.arrow_id(r.arrow)}, {"residual", r.residual}, {"sample", r.sample}});
  nlohmann::json out{{"max_residual", max_residual}, {"tol", tol}, {"ok", ok()}, {"per_arrow", rows}};
  if (const auto* w = witness()) out["witness_arrow"] = cat.arrow_id(w->arrow);
  return out;
}

EquivarianceReport check_equivariance(const NetworkSpec& net, const std::vector<Section>& samples, double tol) {
  net.typecheck();
  const auto& x_f = *net.input;
  const auto y_f = net.output();
  const auto& c = x_f.category();
  EquivarianceReport report;
  report.tol = tol;
  for (auto w : c.arrows()) report.per_arrow.push_back({w, 0.0, 0});

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Section phi_x = network_forward(net, samples[i]);
    for (auto w : c.arrows()) {
      const auto a = c.src(w);
      const auto cc = c.tgt(w);
      if (!samples[i].has(cc)) continue;
      const Matrix lhs = y_f->apply(w, phi_x.at(cc));
      const Matrix rhs = network_forward(net, a, x_f.apply(w, samples[i].at(cc)));
      const double r = sup_norm(lhs - rhs);
      auto& slot = report.per_arrow[idx(w)];
      if (r > slot.residual) slot = {w, r, i};
      report.max_residual = std::max(report.max_residual, r);
    }
  }
  return report;
}

EquivarianceReport check_equivariance(const Layer& layer, const FunctorPtr& input,
                                      const std::vector<Section>& samples, double tol) {
  return check_equivariance(NetworkSpec{input, {layer}}, samples, tol);
}

double max_difference(const NetworkSpec& phi, const NetworkSpec& psi, const std::vector<Section>& samples) {
  double d = 0.0;
  for (const auto& x : samples) {
    const Section a = network_forward(phi, x);
    const Section b = network_forward(psi, x);
    for (auto o : x.functor()->category().objects())
      if (a.has(o) && b.has(o)) d = std::max(d, sup_norm(a.at(o) - b.at(o)));
  }
  return d;
}

}  // namespace cenn
