#include "cenn/group.hpp"

#include <algorithm>
#include <numeric>

namespace cenn {

namespace {

[[noreturn]] void not_a_group(const std::string& msg, nlohmann::json witness) {
  throw Error(ErrorKind::not_a_group, "builders", msg, std::move(witness));
}

}  // namespace

FiniteGroup::FiniteGroup(std::vector<std::string> names, std::vector<std::vector<std::size_t>> table)
    : names_(std::move(names)), table_(std::move(table)) {
  const auto n = names_.size();
  if (n == 0) not_a_group("a group needs at least one element", nullptr);
  if (table_.size() != n) not_a_group("multiplication table must be n x n", nullptr);
  for (std::size_t g = 0; g < n; ++g) {
    if (table_[g].size() != n) not_a_group("multiplication table must be n x n", names_[g]);
    for (std::size_t h = 0; h < n; ++h)
      if (table_[g][h] >= n) not_a_group("product leaves the group", {names_[g], names_[h]});
  }
  auto is_identity = [&](std::size_t e) {
    for (std::size_t g = 0; g < n; ++g)
      if (table_[e][g] != g || table_[g][e] != g) return false;
    return true;
  };
  std::size_t e = 0;
  while (e < n && !is_identity(e)) ++e;
  if (e == n) not_a_group("no identity element", nullptr);
  identity_ = e;
  inverse_.assign(n, n);
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t h = 0; h < n; ++h)
      if (table_[g][h] == e && table_[h][g] == e) inverse_[g] = h;
    if (inverse_[g] == n) not_a_group("element has no inverse", names_[g]);
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
          not_a_group("multiplication is not associative", {names_[a], names_[b], names_[c]});
}

FiniteGroup FiniteGroup::cyclic(std::size_t n) {
  if (n == 0) not_a_group("cyclic group of order 0", nullptr);
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) names.push_back(k == 0 ? "e" : (k == 1 ? "g" : "g" + std::to_string(k)));
  std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return FiniteGroup(std::move(names), std::move(t));
}

FiniteGroup FiniteGroup::symmetric(std::size_t n) {
  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::vector<std::string> names;
  for (const auto& q : perms) {
    std::string s;
    for (auto i : q) s += std::to_string(i);
    names.push_back(s.empty() ? "e" : s);
  }
  // (g·h)(i) = g(h(i)).
  std::vector<std::vector<std::size_t>> t(perms.size(), std::vector<std::size_t>(perms.size()));
  for (std::size_t a = 0; a < perms.size(); ++a)
    for (std::size_t b = 0; b < perms.size(); ++b) {
      std::vector<std::size_t> c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = perms[a][perms[b][i]];
      t[a][b] = std::size_t(std::ranges::find(perms, c) - perms.begin());
    }
  FiniteGroup g(std::move(names), std::move(t));
  g.perms_ = std::move(perms);
  return g;
}

std::size_t FiniteGroup::find(std::string_view name) const {
  auto it = std::ranges::find(names_, name);
  if (it == names_.end())
    throw Error(ErrorKind::malformed_input, "builders", "unknown group element '" + std::string(name) + "'",
                std::string(name));
  return std::size_t(it - names_.begin());
}

void GroupAction::validate(const FiniteGroup& g) const {
  const auto n = points.size();
  if (act.size() != g.order())
    throw Error(ErrorKind::not_an_action, "builders", "action table needs one row per group element");
  for (std::size_t a = 0; a < g.order(); ++a) {
    if (act[a].size() != n || std::ranges::any_of(act[a], [&](std::size_t y) { return y >= n; }))
      throw Error(ErrorKind::not_an_action, "builders", "action row leaves the point set", g.name(a));
  }
  for (std::size_t y = 0; y < n; ++y)
    if (act[g.identity()][y] != y)
      throw Error(ErrorKind::not_an_action, "builders", "identity does not fix every point", points[y]);
  for (std::size_t a = 0; a < g.order(); ++a)
    for (std::size_t b = 0; b < g.order(); ++b)
      for (std::size_t y = 0; y < n; ++y)
        if (act[g.mul(a, b)][y] != act[a][act[b][y]])
          throw Error(ErrorKind::not_an_action, "builders", "(gh)·y differs from g·(h·y)",
                      {g.name(a), g.name(b), points[y]});
}

GroupAction GroupAction::trivial(const FiniteGroup& g, std::vector<std::string> points) {
  GroupAction a{std::move(points), {}};
  std::vector<std::size_t> id(a.points.size());
  std::iota(id.begin(), id.end(), 0);
  a.act.assign(g.order(), id);
  return a;
}

GroupAction GroupAction::regular(const FiniteGroup& g) {
  GroupAction a{g.names(), std::vector<std::vector<std::size_t>>(g.order(), std::vector<std::size_t>(g.order()))};
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t y = 0; y < g.order(); ++y) a.act[x][y] = g.mul(x, y);
  return a;
}

GroupAction GroupAction::natural(const FiniteGroup& g, std::size_t n) {
  GroupAction a;
  for (std::size_t i = 0; i < n; ++i) a.points.push_back(std::to_string(i));
  a.act.assign(g.order(), std::vector<std::size_t>(n));
  if (!g.permutations().empty()) {
    if (g.permutations().front().size() != n)
      throw Error(ErrorKind::not_an_action, "builders", "natural action size must match the symmetric group");
    for (std::size_t x = 0; x < g.order(); ++x) a.act[x] = g.permutations()[x];
  } else {
    if (g.order() != n)
      throw Error(ErrorKind::not_an_action, "builders", "cyclic rotation needs as many points as elements");
    // Cyclic groups built by cyclic(n) have element k at index k.
    for (std::size_t x = 0; x < g.order(); ++x)
      for (std::size_t y = 0; y < n; ++y) a.act[x][y] = (x + y) % n;
  }
  a.validate(g);
  return a;
}

GroupAction GroupAction::swap(const FiniteGroup& c2) {
  if (c2.order() != 2) throw Error(ErrorKind::not_an_action, "builders", "swap action needs a group of order 2");
  GroupAction a{{"p", "q"}, std::vector<std::vector<std::size_t>>(2)};
  const auto e = c2.identity();
  a.act[e] = {0, 1};
  a.act[1 - e] = {1, 0};
  return a;
}

void validate_representation(const FiniteGroup& g, const Representation& rho, double tol) {
  if (rho.size() != g.order())
    throw Error(ErrorKind::not_a_homomorphism, "builders", "representation needs one matrix per element");
  const auto d = rho.front().rows();
  for (std::size_t a = 0; a < g.order(); ++a)
    if (rho[a].rows() != d || rho[a].cols() != d)
      throw Error(ErrorKind::not_a_homomorphism, "builders", "representation matrices must be square and equal-size",
                  g.name(a));
  if (sup_norm(rho[g.identity()] - Matrix::Identity(d, d)) > tol)
    throw Error(ErrorKind::not_a_homomorphism, "builders", "ρ(e) is not the identity", g.name(g.identity()));
  for (std::size_t a = 0; a < g.order(); ++a)
    for (std::size_t b = 0; b < g.order(); ++b)
      if (sup_norm(rho[g.mul(a, b)] - rho[a] * rho[b]) > tol) {
        nlohmann::json w = a == b ? nlohmann::json(g.name(a)) : nlohmann::json{g.name(a), g.name(b)};
        throw Error(ErrorKind::not_a_homomorphism, "builders",
                    "ρ(" + g.name(a) + "·" + g.name(b) + ") ≠ ρ(" + g.name(a) + ")ρ(" + g.name(b) + ")", w);
      }
}

Representation trivial_rep(const FiniteGroup& g, std::size_t dim) {
  return Representation(g.order(), Matrix::Identity(Eigen::Index(dim), Eigen::Index(dim)));
}

Representation sign_rep(const FiniteGroup& g) {
  Representation r(g.order(), Matrix::Identity(1, 1));
  if (!g.permutations().empty()) {
    for (std::size_t x = 0; x < g.order(); ++x) {
      const auto& p = g.permutations()[x];
      std::size_t inversions = 0;
      for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) inversions += p[i] > p[j];
      r[x](0, 0) = inversions % 2 ? -1.0 : 1.0;
    }
  } else if (g.order() % 2 == 0) {
    // Element k of cyclic(n) is g^k.
    for (std::size_t x = 0; x < g.order(); ++x) r[x](0, 0) = x % 2 ? -1.0 : 1.0;
  }
  validate_representation(g, r);
  return r;
}

Representation regular_rep(const FiniteGroup& g) {
  const auto n = Eigen::Index(g.order());
  Representation r(g.order(), Matrix::Zero(n, n));
  for (std::size_t x = 0; x < g.order(); ++x)
    for (std::size_t h = 0; h < g.order(); ++h) r[x](Eigen::Index(g.mul(x, h)), Eigen::Index(h)) = 1.0;
  return r;
}

Representation direct_sum(const Representation& a, const Representation& b) {
  Representation r;
  for (std::size_t x = 0; x < a.size(); ++x) {
    Matrix m = Matrix::Zero(a[x].rows() + b[x].rows(), a[x].cols() + b[x].cols());
    m.topLeftCorner(a[x].rows(), a[x].cols()) = a[x];
    m.bottomRightCorner(b[x].rows(), b[x].cols()) = b[x];
    r.push_back(std::move(m));
  }
  return r;
}

}  // namespace cenn
