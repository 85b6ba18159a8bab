#include "cenn/category.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cenn {

namespace {

[[noreturn]] void malformed(const std::string& msg, nlohmann::json witness = nullptr) {
  throw Error(ErrorKind::malformed_input, "catcore", msg, std::move(witness));
}

}  // namespace

FiniteCategory FiniteCategory::from_spec(const CategorySpec& spec) {
  FiniteCategory cat;
  cat.objects_ = spec.objects;
  for (std::size_t i = 0; i < cat.objects_.size(); ++i) {
    if (!cat.object_lookup_.emplace(cat.objects_[i], i).second)
      malformed("duplicate object '" + cat.objects_[i] + "'", cat.objects_[i]);
  }

  std::vector<CategorySpec::ArrowSpec> arrows = spec.arrows;
  std::ranges::sort(arrows, {}, &CategorySpec::ArrowSpec::id);
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    const auto& a = arrows[i];
    if (i > 0 && arrows[i - 1].id == a.id) malformed("duplicate arrow '" + a.id + "'", a.id);
    auto s = cat.find_object(a.src);
    auto t = cat.find_object(a.tgt);
    if (!s || !t) malformed("arrow '" + a.id + "' references an unknown object", a.id);
    cat.arrows_.push_back({a.id, *s, *t});
    cat.arrow_lookup_.emplace(a.id, i);
  }

  const std::size_t n_obj = cat.objects_.size();
  const std::size_t n_arr = cat.arrows_.size();

  cat.identities_ = ObjectMap<ArrowIndex>(n_obj);
  for (auto a : cat.objects()) {
    auto it = spec.identities.find(cat.object_name(a));
    if (it == spec.identities.end())
      malformed("object '" + cat.object_name(a) + "' has no identity arrow", cat.object_name(a));
    auto u = cat.find_arrow(it->second);
    if (!u) malformed("identity '" + it->second + "' is not an arrow", it->second);
    cat.identities_[a] = *u;
  }
  for (const auto& [obj, _] : spec.identities)
    if (!cat.find_object(obj)) malformed("identity declared for unknown object '" + obj + "'", obj);

  cat.composition_.assign(n_arr * n_arr, std::nullopt);
  for (const auto& entry : spec.composition) {
    auto f = cat.find_arrow(entry.f);
    auto g = cat.find_arrow(entry.g);
    auto fg = cat.find_arrow(entry.composite);
    if (!f || !g || !fg)
      malformed("composition entry references an unknown arrow",
                {entry.f, entry.g, entry.composite});
    auto& slot = cat.composition_[idx(*f) * n_arr + idx(*g)];
    if (slot && *slot != *fg)
      malformed("conflicting composition entries for (" + entry.f + ", " + entry.g + ")",
                {entry.f, entry.g});
    slot = *fg;
  }

  cat.weights_ = ArrowMap<double>(n_arr, 1.0);
  for (const auto& [id, w] : spec.weights) {
    auto u = cat.find_arrow(id);
    if (!u) malformed("weight for unknown arrow '" + id + "'", id);
    cat.weights_[*u] = w;
  }

  cat.incoming_ = ObjectMap<std::vector<ArrowIndex>>(n_obj);
  cat.incoming_position_ = ArrowMap<std::size_t>(n_arr);
  for (auto u : cat.arrows()) {
    auto& in = cat.incoming_[cat.tgt(u)];
    cat.incoming_position_[u] = in.size();
    in.push_back(u);
  }
  return cat;
}

CategorySpec FiniteCategory::to_spec() const {
  CategorySpec spec;
  spec.objects = objects_;
  for (const auto& a : arrows_) spec.arrows.push_back({a.id, object_name(a.src), object_name(a.tgt)});
  for (auto a : objects()) spec.identities[object_name(a)] = arrow_id(identity(a));
  for (auto f : arrows())
    for (auto g : arrows())
      if (auto fg = compose(f, g)) spec.composition.push_back({arrow_id(f), arrow_id(g), arrow_id(*fg)});
  for (auto u : arrows()) spec.weights[arrow_id(u)] = weight(u);
  return spec;
}

std::optional<ObjectIndex> FiniteCategory::find_object(std::string_view name) const {
  auto it = object_lookup_.find(name);
  if (it == object_lookup_.end()) return std::nullopt;
  return ObjectIndex{it->second};
}

ObjectIndex FiniteCategory::object(std::string_view name) const {
  if (auto a = find_object(name)) return *a;
  throw Error(ErrorKind::unknown_object, "catcore", "unknown object '" + std::string(name) + "'",
              std::string(name));
}

std::optional<ArrowIndex> FiniteCategory::find_arrow(std::string_view id) const {
  auto it = arrow_lookup_.find(id);
  if (it == arrow_lookup_.end()) return std::nullopt;
  return ArrowIndex{it->second};
}

ArrowIndex FiniteCategory::arrow_index(std::string_view id) const {
  if (auto u = find_arrow(id)) return *u;
  throw Error(ErrorKind::unknown_arrow, "catcore", "unknown arrow '" + std::string(id) + "'",
              std::string(id));
}

std::optional<ArrowIndex> FiniteCategory::compose(ArrowIndex f, ArrowIndex g) const {
  return composition_[idx(f) * arrows_.size() + idx(g)];
}

ArrowIndex FiniteCategory::composite(ArrowIndex f, ArrowIndex g) const {
  if (auto fg = compose(f, g)) return *fg;
  throw Error(ErrorKind::malformed_input, "catcore",
              "composition table has no entry for (" + arrow_id(f) + ", " + arrow_id(g) + ")",
              {arrow_id(f), arrow_id(g)});
}

std::vector<ArrowIndex> FiniteCategory::hom(ObjectIndex b, ObjectIndex a) const {
  std::vector<ArrowIndex> out;
  for (auto u : incoming(a))
    if (src(u) == b) out.push_back(u);
  return out;
}

FiniteCategory FiniteCategory::with_weights(ArrowMap<double> weights) const {
  if (weights.size() != arrows_.size())
    throw Error(ErrorKind::shape_mismatch, "catcore", "weight table size differs from arrow count");
  FiniteCategory copy = *this;
  copy.weights_ = std::move(weights);
  return copy;
}

std::optional<ArrowIndex> FiniteCategory::inverse(ArrowIndex u) const {
  for (auto v : incoming(src(u))) {
    if (src(v) != tgt(u)) continue;
    auto vu = compose(v, u);
    auto uv = compose(u, v);
    if (vu && uv && *vu == identity(src(u)) && *uv == identity(tgt(u))) return v;
  }
  return std::nullopt;
}

bool FiniteCategory::is_groupoid() const {
  return std::ranges::all_of(arrows(), [&](ArrowIndex u) { return inverse(u).has_value(); });
}

bool FiniteCategory::is_thin() const {
  for (auto a : objects()) {
    auto in = incoming(a);
    for (std::size_t i = 1; i < in.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (src(in[i]) == src(in[j])) return false;
  }
  return true;
}

bool operator==(const FiniteCategory& a, const FiniteCategory& b) {
  if (a.objects_ != b.objects_ || a.arrows_.size() != b.arrows_.size()) return false;
  for (std::size_t i = 0; i < a.arrows_.size(); ++i) {
    const auto& x = a.arrows_[i];
    const auto& y = b.arrows_[i];
    if (x.id != y.id || x.src != y.src || x.tgt != y.tgt) return false;
  }
  return a.identities_ == b.identities_ && a.composition_ == b.composition_ &&
         a.weights_ == b.weights_;
}

ValidationReport validate_category(const FiniteCategory& cat) {
  ValidationReport report;
  const auto& id = [&](ArrowIndex u) { return cat.arrow_id(u); };

  for (auto a : cat.objects()) {
    auto e = cat.identity(a);
    if (cat.src(e) != a || cat.tgt(e) != a)
      report.add("identity", {cat.object_name(a), id(e)}, 0.0, "identity arrow is not an endomorphism");
  }

  for (auto f : cat.arrows()) {
    for (auto g : cat.arrows()) {
      auto fg = cat.compose(f, g);
      const bool composable = cat.src(f) == cat.tgt(g);
      if (!composable) {
        if (fg) report.add("typing", {id(f), id(g)}, 0.0, "composite defined for non-composable pair");
        continue;
      }
      if (!fg) {
        report.add("typing", {id(f), id(g)}, 0.0, "composable pair has no composite");
        continue;
      }
      if (cat.src(*fg) != cat.src(g) || cat.tgt(*fg) != cat.tgt(f))
        report.add("typing", {id(f), id(g), id(*fg)}, 0.0, "composite has wrong source or target");
    }
  }

  for (auto u : cat.arrows()) {
    auto left = cat.compose(cat.identity(cat.tgt(u)), u);
    auto right = cat.compose(u, cat.identity(cat.src(u)));
    if (left && *left != u)
      report.add("identity", {id(cat.identity(cat.tgt(u))), id(u)}, 0.0, "id∘u != u");
    if (right && *right != u)
      report.add("identity", {id(u), id(cat.identity(cat.src(u)))}, 0.0, "u∘id != u");
  }

  for (auto f : cat.arrows())
    for (auto g : cat.arrows()) {
      auto fg = cat.compose(f, g);
      if (!fg || cat.src(f) != cat.tgt(g)) continue;
      for (auto h : cat.incoming(cat.src(g))) {
        auto gh = cat.compose(g, h);
        if (!gh) continue;
        auto lhs = cat.compose(*fg, h);
        auto rhs = cat.compose(f, *gh);
        if (lhs && rhs && *lhs != *rhs) report.add("associativity", {id(f), id(g), id(h)});
      }
    }

  for (auto u : cat.arrows()) {
    const double w = cat.weight(u);
    if (!std::isfinite(w) || w < 0.0) report.add("weight", {id(u)}, w, "weight must be finite and >= 0");
  }
  return report;
}

std::vector<ArrowIndex> incoming_arrows(const FiniteCategory& cat, std::string_view object) {
  auto in = cat.incoming(cat.object(object));
  return {in.begin(), in.end()};
}

MeasureMode measure_mode_from_string(std::string_view s) {
  if (s == "nsp") return MeasureMode::nsp;
  if (s == "left_coherent") return MeasureMode::left_coherent;
  if (s == "bi_coherent") return MeasureMode::bi_coherent;
  throw Error(ErrorKind::malformed_input, "catcore", "unknown measure mode '" + std::string(s) + "'");
}

ValidationReport check_measure_properties(const FiniteCategory& cat, MeasureMode mode, double tol) {
  ValidationReport report;
  const auto& id = [&](ArrowIndex u) { return cat.arrow_id(u); };

  if (mode == MeasureMode::nsp) {
    for (auto w : cat.arrows())
      for (auto u : cat.incoming(cat.src(w))) {
        if (cat.weight(u) <= tol) continue;
        auto wu = cat.compose(w, u);
        if (wu && cat.weight(*wu) <= tol)
          report.add("nsp", {id(w), id(u), id(*wu)}, cat.weight(u),
                     "positive-weight arrow pushed onto a null arrow");
      }
    return report;
  }

  // Left coherence: (w∘-)_# μ_{b,a} = μ_{b,c} for every w: a→c and object b.
  for (auto w : cat.arrows()) {
    const auto a = cat.src(w);
    const auto c = cat.tgt(w);
    for (auto v : cat.incoming(c)) {
      double pushed = 0.0;
      for (auto u : cat.hom(cat.src(v), a))
        if (cat.compose(w, u) == v) pushed += cat.weight(u);
      const double r = std::abs(pushed - cat.weight(v));
      if (r > tol) report.add("left_coherent", {id(w), id(v)}, r);
    }
  }
  if (mode == MeasureMode::left_coherent) return report;

  // Precomposition analogue: (-∘v)_# μ_{c,a} = μ_{b,a} for every v: b→c and object a.
  for (auto v : cat.arrows()) {
    const auto b = cat.src(v);
    const auto c = cat.tgt(v);
    for (auto a : cat.objects()) {
      for (auto t : cat.hom(b, a)) {
        double pushed = 0.0;
        for (auto u : cat.hom(c, a))
          if (cat.compose(u, v) == t) pushed += cat.weight(u);
        const double r = std::abs(pushed - cat.weight(t));
        if (r > tol) report.add("bi_coherent", {id(v), id(t)}, r);
      }
    }
  }
  return report;
}

}  // namespace cenn
