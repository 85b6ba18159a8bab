#include "cenn/builders.hpp"

#include <algorithm>
#include <functional>

namespace cenn {

CategoryPtr group_category(const FiniteGroup& g) {
  CategorySpec spec;
  spec.objects = {"*"};
  for (const auto& n : g.names()) spec.arrows.push_back({n, "*", "*"});
  spec.identities["*"] = g.name(g.identity());
  for (std::size_t a = 0; a < g.order(); ++a)
    for (std::size_t b = 0; b < g.order(); ++b) spec.composition.push_back({g.name(a), g.name(b), g.name(g.mul(a, b))});
  return std::make_shared<const FiniteCategory>(FiniteCategory::from_spec(spec));
}

FunctorPtr group_functor(const CategoryPtr& cat, const FiniteGroup& g, const GroupAction& action,
                         const Representation& rho) {
  action.validate(g);
  validate_representation(g, rho);
  const auto& c = *cat;
  const auto d = std::size_t(rho.front().rows());
  ArrowMap<PointMap> tau(c.arrow_count()), pi(c.arrow_count());
  ArrowMap<Matrix> L(c.arrow_count());
  for (auto u : c.arrows()) {
    const auto x = g.find(c.arrow_id(u));
    const auto xinv = g.inverse(x);
    tau[u] = action.act[xinv];
    pi[u] = action.act[x];
    L[u] = rho[xinv];
  }
  return make_functor(cat, ObjectMap<std::vector<std::string>>(1, action.points), ObjectMap<std::size_t>(1, d),
                      std::move(tau), std::move(pi), std::move(L));
}

GroupCategory build_group_category(const FiniteGroup& g, const GroupAction& action, const Representation& rho_x,
                                   const Representation& rho_y) {
  auto cat = group_category(g);
  return {cat, group_functor(cat, g, action, rho_x), group_functor(cat, g, action, rho_y)};
}

ActionGroupoid build_action_groupoid(const FiniteGroup& g, const GroupAction& action) {
  action.validate(g);
  auto id = [&](std::size_t x, std::size_t y) { return g.name(x) + "|" + action.points[y]; };
  CategorySpec spec;
  spec.objects = action.points;
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t y = 0; y < action.points.size(); ++y)
      spec.arrows.push_back({id(x, y), action.points[y], action.points[action.act[x][y]]});
  for (std::size_t y = 0; y < action.points.size(); ++y) spec.identities[action.points[y]] = id(g.identity(), y);
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t y = 0; y < action.points.size(); ++y)
      for (std::size_t h = 0; h < g.order(); ++h)
        spec.composition.push_back({id(h, action.act[x][y]), id(x, y), id(g.mul(h, x), y)});
  auto cat = std::make_shared<const FiniteCategory>(FiniteCategory::from_spec(spec));
  ActionGroupoid out{cat, std::vector<std::pair<std::size_t, std::size_t>>(cat->arrow_count())};
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t y = 0; y < action.points.size(); ++y) out.arrow_data[idx(cat->arrow_index(id(x, y)))] = {x, y};
  return out;
}

FunctorPtr action_groupoid_functor(const ActionGroupoid& ag, const FiniteGroup& g, const Representation& rho) {
  validate_representation(g, rho);
  const auto& c = *ag.category;
  ArrowMap<Matrix> L(c.arrow_count());
  for (auto u : c.arrows()) L[u] = rho[g.inverse(ag.arrow_data[idx(u)].first)];
  return share(FeatureFunctor::pointwise(ag.category, ObjectMap<std::size_t>(c.object_count(), std::size_t(rho.front().rows())),
                                         std::move(L)));
}

namespace {

/// A directed cycle through distinct elements in the relation graph, if any.
std::vector<std::size_t> find_cycle(const std::vector<std::vector<std::size_t>>& succ) {
  const auto n = succ.size();
  std::vector<int> state(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;
  std::function<bool(std::size_t)> dfs = [&](std::size_t v) {
    state[v] = 1;
    stack.push_back(v);
    for (auto w : succ[v]) {
      if (w == v) continue;
      if (state[w] == 1) {
        auto it = std::ranges::find(stack, w);
        cycle.assign(it, stack.end());
        return true;
      }
      if (state[w] == 0 && dfs(w)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (state[v] == 0 && dfs(v)) break;
  return cycle;
}

}  // namespace

CategoryPtr build_poset_category(const std::vector<std::string>& elements,
                                 const std::vector<std::pair<std::string, std::string>>& relation) {
  const auto n = elements.size();
  auto index = [&](const std::string& s) {
    auto it = std::ranges::find(elements, s);
    if (it == elements.end())
      throw Error(ErrorKind::unknown_object, "builders", "relation names unknown element '" + s + "'", s);
    return std::size_t(it - elements.begin());
  };
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
  for (const auto& [d, a] : relation) {
    const auto i = index(d);
    const auto j = index(a);
    succ[i].push_back(j);
    le[i][j] = true;
  }
  if (auto cyc = find_cycle(succ); !cyc.empty()) {
    nlohmann::json names = nlohmann::json::array();
    for (auto v : cyc) names.push_back(elements[v]);
    throw Error(ErrorKind::cycle, "builders", "relation contains a cycle", names);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (le[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (le[k][j]) le[i][j] = true;

  auto id = [&](std::size_t d, std::size_t a) { return elements[d] + "<=" + elements[a]; };
  CategorySpec spec;
  spec.objects = elements;
  for (std::size_t d = 0; d < n; ++d)
    for (std::size_t a = 0; a < n; ++a)
      if (le[d][a]) spec.arrows.push_back({id(d, a), elements[d], elements[a]});
  for (std::size_t a = 0; a < n; ++a) spec.identities[elements[a]] = id(a, a);
  for (std::size_t d = 0; d < n; ++d)
    for (std::size_t a = 0; a < n; ++a)
      if (le[d][a])
        for (std::size_t c = 0; c < n; ++c)
          if (le[a][c]) spec.composition.push_back({id(a, c), id(d, a), id(d, c)});
  return std::make_shared<const FiniteCategory>(FiniteCategory::from_spec(spec));
}

CategoryPtr chain_poset(std::size_t n) {
  std::vector<std::string> el;
  std::vector<std::pair<std::string, std::string>> rel;
  for (std::size_t i = 0; i < n; ++i) {
    el.push_back(std::to_string(i));
    if (i > 0) rel.emplace_back(std::to_string(i - 1), std::to_string(i));
  }
  return build_poset_category(el, rel);
}

CategoryPtr diamond_lattice() {
  return build_poset_category({"bot", "a", "b", "top"}, {{"bot", "a"}, {"bot", "b"}, {"a", "top"}, {"b", "top"}});
}

CategoryPtr build_face_category(const CWComplex& k, bool include_bottom) {
  std::vector<std::string> el;
  std::vector<std::pair<std::string, std::string>> rel = k.faces();
  if (include_bottom) {
    el.push_back(bottom_object);
    for (const auto& c : k.cells()) {
      if (c.id == bottom_object)
        throw Error(ErrorKind::invalid_complex, "builders", "cell id collides with the bottom object", c.id);
      rel.emplace_back(bottom_object, c.id);
    }
  }
  for (const auto& c : k.cells()) el.push_back(c.id);
  return build_poset_category(el, rel);
}

FunctorPtr constant_functor(const CategoryPtr& cat, const ObjectMap<std::size_t>& dims) {
  const auto& c = *cat;
  ArrowMap<Matrix> L(c.arrow_count());
  for (auto u : c.arrows()) L[u] = Matrix::Identity(Eigen::Index(dims[c.src(u)]), Eigen::Index(dims[c.tgt(u)]));
  return share(FeatureFunctor::pointwise(cat, dims, std::move(L)));
}

}  // namespace cenn
