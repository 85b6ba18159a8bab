#include "cenn/io.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace cenn {

namespace {

[[noreturn]] void malformed(const std::string& message, Json witness = nullptr) {
  throw Error(ErrorKind::malformed_input, "io", message, std::move(witness));
}

/// Runs f, turning JSON access errors into Error(malformed_input) that names the document part.
template <class F>
auto guarded(std::string_view what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    malformed(std::string(what) + ": " + e.what(), std::string(what));
  }
}

const Json& require(const Json& j, const char* key, std::string_view what) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string(what) + " needs key '" + key + "'", key);
  return j.at(key);
}

std::size_t point_of(const FeatureFunctor& f, ObjectIndex a, const Json& id) {
  return f.point_index(a, id.get<std::string>());
}

PointMap point_map_from_json(const Json& j, const FeatureFunctor& f, ArrowIndex u, bool from_tgt,
                             std::string_view what) {
  // from_tgt: keys are points of tgt u (τ, σ); otherwise keys are points of src u (π).
  const auto& c = f.category();
  const auto dom = from_tgt ? c.tgt(u) : c.src(u);
  const auto cod = from_tgt ? c.src(u) : c.tgt(u);
  PointMap m(f.base_size(dom), std::size_t(-1));
  for (const auto& [k, v] : j.items()) m.at(f.point_index(dom, k)) = point_of(f, cod, v);
  for (std::size_t p = 0; p < m.size(); ++p)
    if (m[p] == std::size_t(-1))
      malformed(std::string(what) + " for arrow '" + c.arrow_id(u) + "' misses point '" + f.base(dom)[p] + "'",
                c.arrow_id(u));
  return m;
}

Json point_map_to_json(const PointMap& m, const FeatureFunctor& f, ArrowIndex u, bool from_tgt) {
  const auto& c = f.category();
  const auto dom = from_tgt ? c.tgt(u) : c.src(u);
  const auto cod = from_tgt ? c.src(u) : c.tgt(u);
  Json out = Json::object();
  for (std::size_t p = 0; p < m.size(); ++p) out[f.base(dom)[p]] = f.base(cod)[m[p]];
  return out;
}

Json stage_to_json(const Stage& s, const std::function<Json(const NetworkSpec&)>& fragment) {
  struct {
    const std::function<Json(const NetworkSpec&)>& fragment;
    Json operator()(const AffineStage& a) const {
      return {{"type", "affine"}, {"weight", matrix_to_json(a.weight)}, {"bias", std::vector<double>(a.bias.begin(), a.bias.end())}};
    }
    Json operator()(const ActivationStage& a) const {
      Json j{{"type", "activation"}, {"activation", to_string(a.alpha)}};
      if (a.alpha.kind == ActivationKind::leaky_relu) j["slope"] = a.alpha.slope;
      return j;
    }
    Json operator()(const ClipStage& c) const { return {{"type", "clip"}, {"radius", c.radius}}; }
    Json operator()(const FragmentStage& f) const { return {{"type", "fragment"}, {"network", fragment(*f.network)}}; }
  } v{fragment};
  return std::visit(v, s);
}

Activation activation_from_json(const Json& j) {
  return Activation::from_string(j.value("activation", std::string("tanh")), j.value("slope", 0.01));
}

/// Functor table shared by a network document and its nested fragments.
class FunctorTable {
 public:
  std::string name(const FunctorPtr& f) {
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (same_functor(entries_[i], f)) return "f" + std::to_string(i);
    entries_.push_back(f);
    return "f" + std::to_string(entries_.size() - 1);
  }
  Json to_json() const {
    Json j = Json::object();
    for (std::size_t i = 0; i < entries_.size(); ++i) j["f" + std::to_string(i)] = functor_to_json(*entries_[i]);
    return j;
  }

 private:
  std::vector<FunctorPtr> entries_;
};

class FunctorResolver {
 public:
  FunctorResolver(const Json& table, CategoryPtr cat, std::filesystem::path base)
      : table_(table), cat_(std::move(cat)), base_(std::move(base)) {}

  FunctorPtr get(const Json& ref) {
    const auto name = ref.get<std::string>();
    if (auto it = cache_.find(name); it != cache_.end()) return it->second;
    if (!table_.is_object() || !table_.contains(name)) malformed("unknown functor '" + name + "'", name);
    const Json& entry = table_.at(name);
    auto f = functor_from_json(entry.is_string() ? read_json_file(base_ / entry.get<std::string>()) : entry, cat_);
    cache_.emplace(name, f);
    return f;
  }
  const std::filesystem::path& base() const { return base_; }
  const CategoryPtr& category() const { return cat_; }

 private:
  Json table_;
  CategoryPtr cat_;
  std::filesystem::path base_;
  std::map<std::string, FunctorPtr> cache_;
};

Json network_body(const NetworkSpec& net, FunctorTable& table);
NetworkSpec network_body_from_json(const Json& j, FunctorResolver& fr);

Json stages_to_json(const std::vector<Stage>& stages, FunctorTable& table) {
  Json arr = Json::array();
  for (const auto& s : stages) arr.push_back(stage_to_json(s, [&](const NetworkSpec& n) { return network_body(n, table); }));
  return arr;
}

std::vector<Stage> stages_from_json(const Json& arr, FunctorResolver* fr) {
  std::vector<Stage> out;
  for (const auto& s : arr) {
    const auto type = require(s, "type", "stage").get<std::string>();
    if (type == "affine") {
      const Matrix w = matrix_from_json(require(s, "weight", "affine stage"));
      Vector b = Vector::Zero(w.rows());
      if (s.contains("bias")) {
        const auto v = s.at("bias").get<std::vector<double>>();
        if (Eigen::Index(v.size()) != w.rows()) malformed("affine stage bias does not match the weight rows");
        b = Eigen::Map<const Vector>(v.data(), Eigen::Index(v.size()));
      }
      out.push_back(AffineStage{w, b});
    } else if (type == "activation") {
      out.push_back(ActivationStage{activation_from_json(s)});
    } else if (type == "clip") {
      out.push_back(ClipStage{s.value("radius", 1.0)});
    } else if (type == "fragment") {
      if (!fr) malformed("fragment stages need a functor table");
      out.push_back(FragmentStage{std::make_shared<const NetworkSpec>(network_body_from_json(require(s, "network", "fragment"), *fr))});
    } else {
      malformed("unknown stage type '" + type + "'", type);
    }
  }
  return out;
}

Json maps_to_json(const ObjectwiseMap& m, FunctorTable& table) {
  const auto& c = m.input->category();
  Json maps = Json::object();
  for (auto a : c.objects()) maps[c.object_name(a)] = m.has(a) ? stages_to_json(*m.stages[a], table) : Json(nullptr);
  return maps;
}

ObjectwiseMap maps_from_json(const Json& maps, FunctorPtr in, FunctorPtr out, FunctorResolver* fr) {
  ObjectwiseMap m(in, out);
  const auto& c = in->category();
  for (const auto& [name, stages] : maps.items()) {
    const auto a = c.object(name);
    if (stages.is_null()) continue;
    m.stages[a] = stages_from_json(stages, fr);
  }
  return m;
}

Json kernel_ref(const CategoryKernel& k, FunctorTable& table) {
  return {{"source", table.name(k.source())}, {"target", table.name(k.target())}, {"kernel", kernel_to_json(k)}};
}

CategoryKernel kernel_ref_from_json(const Json& l, FunctorResolver& fr) {
  auto src = fr.get(require(l, "source", "layer"));
  auto tgt = fr.get(require(l, "target", "layer"));
  const Json& kj = require(l, "kernel", "layer");
  return kernel_from_json(kj.is_string() ? read_json_file(fr.base() / kj.get<std::string>()) : kj, src, tgt);
}

Json network_body(const NetworkSpec& net, FunctorTable& table) {
  Json layers = Json::array();
  for (const auto& l : net.layers) {
    Json j{{"type", layer_name(l)}};
    if (auto* conv = std::get_if<ConvLayer>(&l)) {
      j.update(kernel_ref(conv->kernel, table));
    } else if (auto* gate = std::get_if<GateLayer>(&l)) {
      const auto& c = gate->functor->category();
      j["functor"] = table.name(gate->functor);
      j["activation"] = to_string(gate->alpha);
      if (gate->alpha.kind == ActivationKind::leaky_relu) j["slope"] = gate->alpha.slope;
      Json blocks = Json::array();
      for (const auto& b : gate->blocks)
        blocks.push_back({{"offset", b.offset},
                          {"size", b.size == GateBlock::npos ? Json(nullptr) : Json(b.size)},
                          {"channel", object_matrices_to_json(b.channel, c)}});
      j["blocks"] = blocks;
    } else if (auto* lift = std::get_if<LiftLayer>(&l)) {
      j["functor"] = table.name(lift->functor);
    } else if (auto* cl = std::get_if<ComponentwiseLiftLayer>(&l)) {
      j["input"] = table.name(cl->map.input);
      j["output"] = table.name(cl->map.output);
      j["maps"] = maps_to_json(cl->map, table);
    } else if (auto* bc = std::get_if<BundleConvLayer>(&l)) {
      j.update(kernel_ref(bc->kernel, table));
    }
    layers.push_back(std::move(j));
  }
  return {{"input", table.name(net.input)}, {"layers", layers}};
}

NetworkSpec network_body_from_json(const Json& j, FunctorResolver& fr) {
  NetworkSpec net{fr.get(require(j, "input", "network")), {}};
  const auto& c = *fr.category();
  for (const auto& l : require(j, "layers", "network")) {
    const auto type = require(l, "type", "layer").get<std::string>();
    if (type == "conv") {
      net.layers.push_back(ConvLayer{kernel_ref_from_json(l, fr)});
    } else if (type == "bundle_conv" || type == "retraction") {
      net.layers.push_back(BundleConvLayer{kernel_ref_from_json(l, fr), type == "retraction" || l.value("retraction", false)});
    } else if (type == "lift") {
      net.layers.push_back(LiftLayer{fr.get(require(l, "functor", "lift"))});
    } else if (type == "gate") {
      GateLayer g{fr.get(require(l, "functor", "gate")), activation_from_json(l), {}};
      for (const auto& b : require(l, "blocks", "gate")) {
        GateBlock blk;
        blk.offset = b.value("offset", std::size_t{0});
        if (b.contains("size") && !b.at("size").is_null()) blk.size = b.at("size").get<std::size_t>();
        blk.channel = object_matrices_from_json(require(b, "channel", "gate block"), c, "gate channel");
        g.blocks.push_back(std::move(blk));
      }
      net.layers.push_back(std::move(g));
    } else if (type == "componentwise_lift") {
      auto in = fr.get(require(l, "input", "componentwise_lift"));
      auto out = fr.get(require(l, "output", "componentwise_lift"));
      net.layers.push_back(ComponentwiseLiftLayer{maps_from_json(require(l, "maps", "componentwise_lift"), in, out, &fr)});
    } else {
      malformed("unknown layer type '" + type + "'", type);
    }
  }
  return net;
}

}  // namespace

// ---- files ----

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot open '" + path.string() + "'", path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    malformed("'" + path.string() + "' is not valid JSON: " + e.what(), path.string());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::malformed_input, "io", "cannot write '" + path.string() + "'", path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const Json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols, std::string_view what) {
  return guarded(what, [&] {
    if (!j.is_array()) malformed(std::string(what) + " must be a nested array");
    const auto r = Eigen::Index(j.size());
    const Eigen::Index c = r ? Eigen::Index(j.at(0).size()) : std::max<Eigen::Index>(cols, 0);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      const auto& row = j.at(std::size_t(i));
      if (!row.is_array() || Eigen::Index(row.size()) != c) malformed(std::string(what) + " is not rectangular");
      for (Eigen::Index k = 0; k < c; ++k) m(i, k) = row.at(std::size_t(k)).get<double>();
    }
    if ((rows >= 0 && r != rows) || (cols >= 0 && r > 0 && c != cols))
      throw Error(ErrorKind::shape_mismatch, "io",
                  std::string(what) + " is " + std::to_string(r) + "x" + std::to_string(c) + ", expected " +
                      std::to_string(rows) + "x" + std::to_string(cols),
                  std::string(what));
    return m;
  });
}

// ---- categories ----

CategorySpec category_spec_from_json(const Json& j) {
  return guarded("category", [&] {
    CategorySpec s;
    s.objects = require(j, "objects", "category").get<std::vector<std::string>>();
    for (const auto& a : require(j, "arrows", "category")) {
      if (a.is_array()) {
        if (a.size() != 3) malformed("arrow triples are [id, src, tgt]");
        s.arrows.push_back({a[0].get<std::string>(), a[1].get<std::string>(), a[2].get<std::string>()});
      } else {
        s.arrows.push_back({a.at("id").get<std::string>(), a.at("src").get<std::string>(), a.at("tgt").get<std::string>()});
      }
    }
    s.identities = require(j, "identities", "category").get<std::map<std::string, std::string>>();
    for (const auto& t : require(j, "composition", "category")) {
      if (!t.is_array() || t.size() != 3) malformed("composition entries are [f, g, f∘g]", t);
      s.composition.push_back({t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
    }
    if (j.contains("weights")) s.weights = j.at("weights").get<std::map<std::string, double>>();
    return s;
  });
}

Json category_to_json(const FiniteCategory& c) {
  const auto s = c.to_spec();
  Json arrows = Json::array();
  for (const auto& a : s.arrows) arrows.push_back({{"id", a.id}, {"src", a.src}, {"tgt", a.tgt}});
  Json comp = Json::array();
  for (const auto& t : s.composition) comp.push_back({t.f, t.g, t.composite});
  return {{"objects", s.objects}, {"arrows", arrows}, {"identities", s.identities}, {"composition", comp},
          {"weights", s.weights}};
}

CategoryPtr category_from_json(const Json& j) {
  return std::make_shared<const FiniteCategory>(FiniteCategory::from_spec(category_spec_from_json(j)));
}

// ---- functors and sections ----

FunctorPtr functor_from_json(const Json& j, const CategoryPtr& cat) {
  return guarded("functor", [&] {
    const auto& c = *cat;
    ObjectMap<std::vector<std::string>> base(c.object_count(), std::vector<std::string>{"*"});
    if (j.contains("base"))
      for (const auto& [name, pts] : j.at("base").items()) base[c.object(name)] = pts.get<std::vector<std::string>>();
    ObjectMap<std::size_t> dims(c.object_count(), 0);
    const auto& fd = require(j, "fiber_dim", "functor");
    for (auto a : c.objects()) {
      if (fd.is_number_integer()) {
        dims[a] = fd.get<std::size_t>();
      } else {
        if (!fd.contains(c.object_name(a))) malformed("fiber_dim misses object '" + c.object_name(a) + "'", c.object_name(a));
        dims[a] = fd.at(c.object_name(a)).get<std::size_t>();
      }
    }
    if (fd.is_object())
      for (const auto& [name, _] : fd.items()) c.object(name);

    // Point maps are resolved against a provisional functor that only carries the base sets.
    ArrowMap<PointMap> tau(c.arrow_count()), pi(c.arrow_count());
    ArrowMap<Matrix> transport(c.arrow_count());
    for (auto u : c.arrows()) {
      const auto& src = base[c.src(u)];
      const auto& tgt = base[c.tgt(u)];
      tau[u].assign(tgt.size(), 0);
      pi[u].assign(src.size(), 0);
      transport[u] = Matrix::Zero(Eigen::Index(dims[c.src(u)]), Eigen::Index(dims[c.tgt(u)]));
    }
    const FeatureFunctor shape(cat, base, dims, tau, pi, transport);
    const Json empty = Json::object();
    const Json& jt = j.contains("tau") ? j.at("tau") : empty;
    const Json& jp = j.contains("pi") ? j.at("pi") : empty;
    const Json& jl = j.contains("L") ? j.at("L") : empty;
    for (const auto* part : {&jt, &jp, &jl})
      for (const auto& [id, _] : part->items()) c.arrow_index(id);
    for (auto u : c.arrows()) {
      const auto& id = c.arrow_id(u);
      const bool single = base[c.src(u)].size() == 1 && base[c.tgt(u)].size() == 1;
      if (jt.contains(id)) tau[u] = point_map_from_json(jt.at(id), shape, u, true, "tau");
      else if (!single) malformed("functor misses tau for arrow '" + id + "'", id);
      if (jp.contains(id)) pi[u] = point_map_from_json(jp.at(id), shape, u, false, "pi");
      else if (!single) malformed("functor misses pi for arrow '" + id + "'", id);
      const auto rows = Eigen::Index(dims[c.src(u)]);
      const auto cols = Eigen::Index(dims[c.tgt(u)]);
      if (jl.contains(id)) transport[u] = matrix_from_json(jl.at(id), rows, cols, "L[" + id + "]");
      else if (rows == cols) transport[u] = Matrix::Identity(rows, cols);
      else malformed("functor misses L for arrow '" + id + "'", id);
    }
    return make_functor(cat, std::move(base), std::move(dims), std::move(tau), std::move(pi), std::move(transport));
  });
}

Json functor_to_json(const FeatureFunctor& f) {
  const auto& c = f.category();
  Json base = Json::object(), dims = Json::object(), tau = Json::object(), pi = Json::object(), l = Json::object();
  for (auto a : c.objects()) {
    base[c.object_name(a)] = f.base(a);
    dims[c.object_name(a)] = f.fiber_dim(a);
  }
  for (auto u : c.arrows()) {
    tau[c.arrow_id(u)] = point_map_to_json(f.tau(u), f, u, true);
    pi[c.arrow_id(u)] = point_map_to_json(f.pi(u), f, u, false);
    l[c.arrow_id(u)] = matrix_to_json(f.transport(u));
  }
  return {{"base", base}, {"fiber_dim", dims}, {"tau", tau}, {"pi", pi}, {"L", l}};
}

Section section_from_json(const Json& j, const FunctorPtr& f) {
  return guarded("section", [&] {
    if (!j.is_object()) malformed("a section is an object mapping object names to features");
    const auto& c = f->category();
    Section s(f);
    for (const auto& [name, m] : j.items()) {
      const auto a = c.object(name);
      s.set(a, matrix_from_json(m, Eigen::Index(f->base_size(a)), Eigen::Index(f->fiber_dim(a)), "section[" + name + "]"));
    }
    return s;
  });
}

Json section_to_json(const Section& s) {
  const auto& c = s.functor()->category();
  Json j = Json::object();
  for (auto a : c.objects())
    if (s.has(a)) j[c.object_name(a)] = matrix_to_json(s.at(a));
  return j;
}

ProbeFamily probe_from_json(const Json& j, const FeatureFunctor& f) {
  return guarded("probe", [&] {
    const auto& c = f.category();
    ProbeFamily p;
    p.sigma = ArrowMap<PointMap>(c.arrow_count());
    for (auto u : c.arrows()) {
      if (j.contains(c.arrow_id(u))) p.sigma[u] = point_map_from_json(j.at(c.arrow_id(u)), f, u, true, "probe");
      else if (f.base_size(c.src(u)) == 1 && f.base_size(c.tgt(u)) == 1) p.sigma[u] = PointMap{0};
      else malformed("probe misses arrow '" + c.arrow_id(u) + "'", c.arrow_id(u));
    }
    return p;
  });
}

Json probe_to_json(const ProbeFamily& p, const FeatureFunctor& f) {
  const auto& c = f.category();
  Json j = Json::object();
  for (auto u : c.arrows()) j[c.arrow_id(u)] = point_map_to_json(p.sigma[u], f, u, true);
  return j;
}

Json object_matrices_to_json(const ObjectMap<Matrix>& m, const FiniteCategory& c) {
  Json j = Json::object();
  for (auto a : c.objects()) j[c.object_name(a)] = matrix_to_json(m[a]);
  return j;
}

ObjectMap<Matrix> object_matrices_from_json(const Json& j, const FiniteCategory& c, std::string_view what) {
  return guarded(what, [&] {
    ObjectMap<Matrix> m(c.object_count());
    for (const auto& [name, v] : j.items()) m[c.object(name)] = matrix_from_json(v, -1, -1, what);
    return m;
  });
}

// ---- kernels ----

Json kernel_to_json(const CategoryKernel& k) {
  const auto& c = k.category();
  const auto& tgt = *k.target();
  Json entries = Json::object();
  for (auto u : c.arrows())
    for (std::size_t y = 0; y < tgt.base_size(c.tgt(u)); ++y)
      entries[c.arrow_id(u) + "@" + tgt.base(c.tgt(u))[y]] = matrix_to_json(k.entry(u, y));
  Json j{{"regime", to_string(k.regime())}, {"entries", entries}};
  if (k.has_bias()) j["bias"] = object_matrices_to_json(k.bias(), c);
  if (k.probe()) j["probe"] = probe_to_json(*k.probe(), *k.source());
  return j;
}

CategoryKernel kernel_from_json(const Json& j, FunctorPtr source, FunctorPtr target) {
  return guarded("kernel", [&] {
    CategoryKernel k(source, target, regime_from_string(j.value("regime", std::string("unconstrained"))));
    const auto& c = k.category();
    const auto& tgt = *target;
    if (j.contains("entries"))
      for (const auto& [key, m] : j.at("entries").items()) {
        const auto at = key.rfind('@');
        if (at == std::string::npos) malformed("kernel entry keys are 'arrow@point', got '" + key + "'", key);
        const auto u = c.arrow_index(std::string_view(key).substr(0, at));
        const auto y = tgt.point_index(c.tgt(u), std::string_view(key).substr(at + 1));
        k.set_entry(u, y,
                    matrix_from_json(m, Eigen::Index(tgt.fiber_dim(c.tgt(u))),
                                     Eigen::Index(source->fiber_dim(c.src(u))), "kernel[" + key + "]"));
      }
    if (j.contains("bias")) {
      ObjectMap<Matrix> bias(c.object_count());
      for (auto a : c.objects()) bias[a] = Matrix::Zero(Eigen::Index(tgt.base_size(a)), Eigen::Index(tgt.fiber_dim(a)));
      for (const auto& [name, m] : j.at("bias").items()) {
        const auto a = c.object(name);
        bias[a] = matrix_from_json(m, Eigen::Index(tgt.base_size(a)), Eigen::Index(tgt.fiber_dim(a)), "bias[" + name + "]");
      }
      k.set_bias(std::move(bias));
    }
    if (j.contains("probe")) k.set_probe(probe_from_json(j.at("probe"), *source));
    return k;
  });
}

Json basis_to_json(const ParameterBasis& basis, Regime regime, const std::vector<ObjectMap<Matrix>>& biases,
                   const std::vector<ScalarChannel>& channels, const FiniteCategory& c) {
  Json kernels = Json::array();
  for (const auto& k : basis.kernels) kernels.push_back(kernel_to_json(k));
  Json b = Json::array(), ch = Json::array();
  for (const auto& x : biases) b.push_back(object_matrices_to_json(x, c));
  for (const auto& x : channels) ch.push_back(object_matrices_to_json(x, c));
  return {{"regime", to_string(regime)},       {"kernel_count", basis.kernels.size()},
          {"rank", basis.rank},                {"singular_values", basis.singular_values},
          {"kernels", kernels},                {"biases", b},
          {"channels", ch}};
}

std::vector<CategoryKernel> basis_kernels_from_json(const Json& j, FunctorPtr source, FunctorPtr target) {
  std::vector<CategoryKernel> out;
  for (const auto& k : require(j, "kernels", "basis")) out.push_back(kernel_from_json(k, source, target));
  return out;
}

Json provenance_to_json(const ConstraintSystem& sys) {
  return {{"kind", to_string(sys.kind)},
          {"rows", sys.row_count()},
          {"unknowns", sys.unknown_count()},
          {"support", sys.layout.support() == KernelSupport::all_arrows ? "all_arrows" : "identity_only"},
          {"provenance", sys.provenance_json()}};
}

// ---- networks ----

Json network_to_json(const NetworkSpec& net) {
  FunctorTable table;
  Json body = network_body(net, table);
  return {{"functors", table.to_json()}, {"input", body.at("input")}, {"layers", body.at("layers")}};
}

NetworkSpec network_from_json(const Json& j, const CategoryPtr& cat, const std::filesystem::path& base_dir) {
  return guarded("network", [&] {
    FunctorResolver fr(require(j, "functors", "network"), cat, base_dir);
    auto net = network_body_from_json(j, fr);
    net.typecheck();
    return net;
  });
}

Json objectwise_map_to_json(const ObjectwiseMap& m) {
  FunctorTable table;
  Json maps = maps_to_json(m, table);
  return {{"functors", table.to_json()}, {"maps", maps}};
}

ObjectwiseMap objectwise_map_from_json(const Json& j, FunctorPtr input, FunctorPtr output,
                                       const std::filesystem::path& base_dir) {
  return guarded("objectwise map", [&] {
    FunctorResolver fr(j.value("functors", Json::object()), input->category_ptr(), base_dir);
    return maps_from_json(require(j, "maps", "objectwise map"), std::move(input), std::move(output), &fr);
  });
}

// ---- complexes ----

CWComplex complex_from_json(const Json& j) {
  return guarded("complex", [&] {
    std::vector<Cell> cells;
    for (const auto& c : require(j, "cells", "complex")) cells.push_back({c.at("id").get<std::string>(), c.at("dim").get<std::size_t>()});
    std::vector<std::pair<std::string, std::string>> faces;
    for (const auto& f : require(j, "faces", "complex")) {
      if (!f.is_array() || f.size() != 2) malformed("face entries are [face, cell]", f);
      faces.emplace_back(f[0].get<std::string>(), f[1].get<std::string>());
    }
    return CWComplex(std::move(cells), std::move(faces));
  });
}

Json complex_to_json(const CWComplex& k) {
  Json cells = Json::array(), faces = Json::array();
  for (const auto& c : k.cells()) cells.push_back({{"id", c.id}, {"dim", c.dim}});
  for (const auto& [f, c] : k.faces()) faces.push_back({f, c});
  return {{"cells", cells}, {"faces", faces}};
}

// ---- experiments ----

ExperimentConfig experiment_config_from_json(const Json& j) {
  return guarded("experiment", [&] {
    ExperimentConfig e;
    e.name = j.value("name", e.name);
    e.category = require(j, "category", "experiment").get<std::string>();
    e.x = require(j, "x", "experiment").get<std::string>();
    e.y = j.value("y", std::string());
    if (j.contains("graded_dims")) e.graded_dims = j.at("graded_dims").get<std::map<std::string, std::size_t>>();
    if (e.y.empty() == e.graded_dims.empty()) malformed("experiment needs exactly one of 'y' and 'graded_dims'");
    e.probe = j.value("probe", e.probe);
    if (e.probe != "identity" && e.probe != "tau") malformed("probe must be 'identity' or 'tau'", e.probe);
    if (j.contains("family")) e.family = target_family_from_string(j.at("family").get<std::string>());
    e.target_seed = j.value("target_seed", e.target_seed);
    if (j.contains("grid")) {
      e.grid.clear();
      for (const auto& g : j.at("grid")) e.grid.push_back({g.at(0).get<std::size_t>(), g.at(1).get<std::size_t>()});
    }
    if (j.contains("seeds")) e.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    e.samples = j.value("samples", e.samples);
    e.sample_seed = j.value("sample_seed", e.sample_seed);
    e.eqv_samples = j.value("eqv_samples", e.eqv_samples);
    if (j.contains("budget")) {
      const auto& b = j.at("budget");
      e.budget.iterations = b.value("iterations", e.budget.iterations);
      e.budget.damping = b.value("damping", e.budget.damping);
      e.budget.tol = b.value("tol", e.budget.tol);
    }
    if (j.contains("activation")) e.activation = Activation::from_string(j.at("activation").get<std::string>());
    return e;
  });
}

Json experiment_config_to_json(const ExperimentConfig& e) {
  Json grid = Json::array();
  for (const auto& g : e.grid) grid.push_back({g.carriers, g.width});
  Json j{{"name", e.name},
         {"category", e.category},
         {"x", e.x},
         {"probe", e.probe},
         {"family", to_string(e.family)},
         {"target_seed", e.target_seed},
         {"grid", grid},
         {"seeds", e.seeds},
         {"samples", e.samples},
         {"sample_seed", e.sample_seed},
         {"eqv_samples", e.eqv_samples},
         {"budget", {{"iterations", e.budget.iterations}, {"damping", e.budget.damping}, {"tol", e.budget.tol}}},
         {"activation", to_string(e.activation)}};
  if (!e.y.empty()) j["y"] = e.y;
  else j["graded_dims"] = e.graded_dims;
  return j;
}

Json uat_experiment_to_json(const UatExperiment& e) {
  Json curve = Json::array();
  for (const auto& p : e.result.curve)
    curve.push_back({{"carriers", p.arch.carriers},
                     {"width", p.arch.width},
                     {"sup_error", p.sup_error},
                     {"best_error", p.best_error},
                     {"eqv_residual", p.eqv_residual},
                     {"train_loss", p.train_loss},
                     {"iterations", p.iterations},
                     {"converged", p.converged},
                     {"status", p.status},
                     {"seconds", p.seconds}});
  return {{"name", e.name}, {"seed", e.seed}, {"samples", e.sample_count}, {"best", e.result.best}, {"curve", curve}};
}

UatExperiment uat_experiment_from_json(const Json& j) {
  return guarded("experiment result", [&] {
    UatExperiment e;
    e.name = j.at("name").get<std::string>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.sample_count = j.at("samples").get<std::size_t>();
    e.result.best = j.value("best", std::size_t{0});
    for (const auto& p : j.at("curve")) {
      FitPoint pt;
      pt.arch = {p.at("carriers").get<std::size_t>(), p.at("width").get<std::size_t>()};
      pt.sup_error = p.at("sup_error").get<double>();
      pt.best_error = p.at("best_error").get<double>();
      pt.eqv_residual = p.at("eqv_residual").get<double>();
      pt.train_loss = p.value("train_loss", 0.0);
      pt.iterations = p.value("iterations", std::size_t{0});
      pt.converged = p.value("converged", true);
      pt.status = p.value("status", std::string());
      pt.seconds = p.value("seconds", 0.0);
      e.result.curve.push_back(pt);
    }
    return e;
  });
}

}  // namespace cenn
