#include "cenn/complex.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace cenn {

namespace {

[[noreturn]] void invalid(const std::string& msg, nlohmann::json witness = nullptr) {
  throw Error(ErrorKind::invalid_complex, "builders", msg, std::move(witness));
}

}  // namespace

CWComplex::CWComplex(std::vector<Cell> cells, std::vector<std::pair<std::string, std::string>> faces)
    : cells_(std::move(cells)), faces_(std::move(faces)) {
  const auto n = cells_.size();
  std::map<std::string, std::size_t, std::less<>> lookup;
  for (std::size_t i = 0; i < n; ++i)
    if (!lookup.emplace(cells_[i].id, i).second) invalid("duplicate cell id '" + cells_[i].id + "'", cells_[i].id);

  order_.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) order_[i][i] = true;
  for (const auto& [lo, hi] : faces_) {
    auto a = lookup.find(lo);
    auto b = lookup.find(hi);
    if (a == lookup.end() || b == lookup.end()) invalid("face pair names an unknown cell", {lo, hi});
    if (cells_[a->second].dim >= cells_[b->second].dim)
      invalid("a face must have smaller dimension than its coface", {lo, hi});
    order_[a->second][b->second] = true;
  }
  // Dimension strictly increases along face pairs, so the closure is acyclic.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (order_[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (order_[k][j]) order_[i][j] = true;

  cover_.assign(n, std::vector<bool>(n, false));
  adjacency_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !order_[i][j]) continue;
      bool direct = true;
      for (std::size_t k = 0; k < n && direct; ++k)
        if (k != i && k != j && order_[i][k] && order_[k][j]) direct = false;
      if (direct) {
        cover_[i][j] = true;
        covers_.emplace_back(i, j);
        adjacency_[i].push_back(j);
        adjacency_[j].push_back(i);
      }
    }
  for (auto& adj : adjacency_) std::ranges::sort(adj);

  std::size_t max_dim = 0;
  for (const auto& c : cells_) max_dim = std::max(max_dim, c.dim);
  if (max_dim <= 1)
    for (std::size_t j = 0; j < n; ++j) {
      if (cells_[j].dim != 1) continue;
      std::size_t vertices = 0;
      for (std::size_t i = 0; i < n; ++i) vertices += (i != j && order_[i][j] && cells_[i].dim == 0);
      if (vertices != 2) invalid("edge '" + cells_[j].id + "' must have exactly two vertices", cells_[j].id);
    }
}

CWComplex CWComplex::graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<Cell> cells;
  std::vector<std::pair<std::string, std::string>> faces;
  for (std::size_t i = 0; i < n; ++i) cells.push_back({"v" + std::to_string(i), 0});
  for (const auto& [a, b] : edges) {
    const auto id = "e" + std::to_string(a) + "_" + std::to_string(b);
    cells.push_back({id, 1});
    faces.emplace_back("v" + std::to_string(a), id);
    faces.emplace_back("v" + std::to_string(b), id);
  }
  return CWComplex(std::move(cells), std::move(faces));
}

CWComplex CWComplex::path_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return graph(n, e);
}

CWComplex CWComplex::cycle_graph(std::size_t n) {
  if (n < 3) invalid("cycle graphs need at least three vertices", n);
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(std::min(i, (i + 1) % n), std::max(i, (i + 1) % n));
  return graph(n, e);
}

CWComplex CWComplex::polygon(std::size_t n) {
  const CWComplex boundary = cycle_graph(n);
  auto cells = boundary.cells();
  auto faces = boundary.faces();
  cells.push_back({"f", 2});
  for (const auto& c : boundary.cells())
    if (c.dim == 1) faces.emplace_back(c.id, "f");
  return CWComplex(std::move(cells), std::move(faces));
}

std::size_t CWComplex::find(std::string_view id) const {
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i].id == id) return i;
  invalid("unknown cell '" + std::string(id) + "'", std::string(id));
}

RootedPatch extract_patch(const CWComplex& k, std::size_t root, std::size_t radius) {
  std::vector<std::size_t> dist(k.size(), std::size_t(-1));
  std::deque<std::size_t> queue{root};
  dist[root] = 0;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    if (dist[v] == radius) continue;
    for (auto w : k.neighbours(v))
      if (dist[w] == std::size_t(-1)) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  RootedPatch p{&k, root, {}, 0};
  for (std::size_t i = 0; i < k.size(); ++i)
    if (dist[i] != std::size_t(-1)) p.vertices.push_back(i);
  std::ranges::sort(p.vertices, [&](std::size_t a, std::size_t b) {
    return std::pair(k.cell(a).dim, k.cell(a).id) < std::pair(k.cell(b).dim, k.cell(b).id);
  });
  p.root_position = std::size_t(std::ranges::find(p.vertices, root) - p.vertices.begin());
  return p;
}

namespace {

struct Signature {
  std::size_t dim, up, down;
  friend bool operator==(const Signature&, const Signature&) = default;
};

std::vector<Signature> signatures(const RootedPatch& p) {
  std::vector<Signature> s(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    s[i].dim = p.dim(i);
    s[i].up = s[i].down = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (i == j) continue;
      s[i].up += p.leq(i, j);
      s[i].down += p.leq(j, i);
    }
  }
  return s;
}

class IsoSearch {
 public:
  IsoSearch(const RootedPatch& p1, const RootedPatch& p2)
      : p1_(p1), p2_(p2), s1_(signatures(p1)), s2_(signatures(p2)), map_(p1.size()), used_(p2.size(), false) {
    // Root first, then the remaining vertices in canonical order.
    order_.push_back(p1.root_position);
    for (std::size_t i = 0; i < p1.size(); ++i)
      if (i != p1.root_position) order_.push_back(i);
  }

  std::vector<PatchMap> run() {
    if (p1_.size() != p2_.size()) return {};
    auto sorted = [](std::vector<Signature> v) {
      std::ranges::sort(v, [](const Signature& a, const Signature& b) {
        return std::tuple(a.dim, a.up, a.down) < std::tuple(b.dim, b.up, b.down);
      });
      return v;
    };
    if (sorted(s1_) != sorted(s2_)) return {};
    extend(0);
    std::ranges::sort(found_);
    return std::move(found_);
  }

 private:
  bool consistent(std::size_t i, std::size_t img, std::size_t depth) const {
    if (!(s1_[i] == s2_[img])) return false;
    for (std::size_t d = 0; d < depth; ++d) {
      const auto j = order_[d];
      const auto jm = map_[j];
      if (p1_.leq(i, j) != p2_.leq(img, jm) || p1_.leq(j, i) != p2_.leq(jm, img)) return false;
    }
    return true;
  }

  void extend(std::size_t depth) {
    if (depth == order_.size()) {
      found_.push_back(map_);
      return;
    }
    const auto i = order_[depth];
    if (depth == 0) {
      const auto img = p2_.root_position;
      if (!consistent(i, img, 0)) return;
      assign(i, img, depth);
      return;
    }
    for (std::size_t img = 0; img < p2_.size(); ++img)
      if (!used_[img] && img != p2_.root_position && consistent(i, img, depth)) assign(i, img, depth);
  }

  void assign(std::size_t i, std::size_t img, std::size_t depth) {
    map_[i] = img;
    used_[img] = true;
    extend(depth + 1);
    used_[img] = false;
  }

  const RootedPatch& p1_;
  const RootedPatch& p2_;
  std::vector<Signature> s1_, s2_;
  std::vector<std::size_t> order_;
  PatchMap map_;
  std::vector<bool> used_;
  std::vector<PatchMap> found_;
};

}  // namespace

std::vector<PatchMap> enumerate_rooted_isomorphisms(const RootedPatch& p1, const RootedPatch& p2) {
  return IsoSearch(p1, p2).run();
}

}  // namespace cenn
