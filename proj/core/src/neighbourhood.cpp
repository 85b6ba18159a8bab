#include "cenn/builders.hpp"

#include <algorithm>
#include <map>

namespace cenn {

NeighbourhoodGroupoid build_neighbourhood_groupoid(const CWComplex& k, std::size_t radius) {
  const auto n = k.size();
  NeighbourhoodGroupoid ng;
  for (std::size_t i = 0; i < n; ++i) ng.patches.push_back(extract_patch(k, i, radius));

  // isos[τ][σ]: maps from the σ-ball to the τ-ball, i.e. the arrows τ→σ.
  std::vector<std::vector<std::vector<PatchMap>>> isos(n, std::vector<std::vector<PatchMap>>(n));
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t s = 0; s < n; ++s) isos[t][s] = enumerate_rooted_isomorphisms(ng.patches[s], ng.patches[t]);

  auto id = [&](std::size_t t, std::size_t s, std::size_t i) {
    return k.cell(t).id + "->" + k.cell(s).id + "#" + std::to_string(i);
  };
  CategorySpec spec;
  for (const auto& c : k.cells()) spec.objects.push_back(c.id);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t i = 0; i < isos[t][s].size(); ++i) spec.arrows.push_back({id(t, s, i), k.cell(t).id, k.cell(s).id});
  for (std::size_t t = 0; t < n; ++t) {
    PatchMap identity(ng.patches[t].size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
    const auto& list = isos[t][t];
    spec.identities[k.cell(t).id] = id(t, t, std::size_t(std::ranges::find(list, identity) - list.begin()));
  }
  // ψ∘φ for φ: τ→σ and ψ: σ→ρ carries the ρ-ball to the τ-ball by φ∘ψ.
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t i = 0; i < isos[t][s].size(); ++i) {
        const auto& phi = isos[t][s][i];
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t j = 0; j < isos[s][r].size(); ++j) {
            const auto& psi = isos[s][r][j];
            PatchMap comp(psi.size());
            for (std::size_t q = 0; q < psi.size(); ++q) comp[q] = phi[psi[q]];
            const auto& list = isos[t][r];
            const auto pos = std::size_t(std::ranges::find(list, comp) - list.begin());
            spec.composition.push_back({id(s, r, j), id(t, s, i), id(t, r, pos)});
          }
      }
  ng.category = std::make_shared<const FiniteCategory>(FiniteCategory::from_spec(spec));
  ng.arrow_maps.resize(ng.category->arrow_count());
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t i = 0; i < isos[t][s].size(); ++i)
        ng.arrow_maps[idx(ng.category->arrow_index(id(t, s, i)))] = isos[t][s][i];
  return ng;
}

NeighbourhoodFunctors build_neighbourhood_functors(const NeighbourhoodGroupoid& ng, std::size_t d_x,
                                                   std::size_t d_y) {
  const auto& c = *ng.category;
  ObjectMap<std::size_t> dx(c.object_count()), dy(c.object_count(), d_y);
  for (auto a : c.objects()) dx[a] = ng.patches[idx(a)].size() * d_x;
  ArrowMap<Matrix> lx(c.arrow_count()), ly(c.arrow_count());
  const auto d = Eigen::Index(d_x);
  for (auto u : c.arrows()) {
    const auto t = c.src(u);
    const auto s = c.tgt(u);
    // (X_k(φ)x)_ρ = x_{φ^{-1}ρ}: the σ-coordinate i lands on the τ-coordinate φ(i).
    Matrix l = Matrix::Zero(Eigen::Index(dx[t]), Eigen::Index(dx[s]));
    const auto& phi = ng.arrow_maps[idx(u)];
    for (std::size_t i = 0; i < phi.size(); ++i) l.block(Eigen::Index(phi[i]) * d, Eigen::Index(i) * d, d, d).setIdentity();
    lx[u] = std::move(l);
    ly[u] = Matrix::Identity(Eigen::Index(d_y), Eigen::Index(d_y));
  }
  return {share(FeatureFunctor::pointwise(ng.category, dx, std::move(lx))),
          share(FeatureFunctor::pointwise(ng.category, dy, std::move(ly)))};
}

Vector gather_patch(const NeighbourhoodGroupoid& ng, std::size_t cell, const Matrix& signal) {
  const auto& p = ng.patches.at(cell);
  const auto d = signal.cols();
  Vector v(Eigen::Index(p.size()) * d);
  for (std::size_t i = 0; i < p.size(); ++i) v.segment(Eigen::Index(i) * d, d) = signal.row(Eigen::Index(p.vertices[i])).transpose();
  return v;
}

}  // namespace cenn
