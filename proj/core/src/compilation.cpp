#include "cenn/compilation.hpp"

#include <algorithm>

namespace cenn {

std::string to_string(RetractionFlavor f) {
  return f == RetractionFlavor::haar_groupoid ? "haar_groupoid" : "thin_graded";
}

Retraction build_haar_retraction(const FunctorPtr& y) {
  const auto& c = y->category();
  for (auto u : c.arrows()) {
    if (!c.inverse(u))
      throw Error(ErrorKind::not_a_groupoid, "compilation",
                  "arrow '" + c.arrow_id(u) + "' has no inverse", c.arrow_id(u));
    if (!(c.weight(u) > 0.0))
      throw Error(ErrorKind::zero_weight, "compilation",
                  "Haar averaging needs positive weights; '" + c.arrow_id(u) + "' has none", c.arrow_id(u));
  }
  CategoryKernel k(y, y, Regime::IN_bundle);
  ObjectMap<double> norm(c.object_count(), 0.0);
  for (auto a : c.objects())
    for (auto u : c.incoming(a)) norm[a] += c.weight(u);
  for (auto u : c.arrows()) {
    const auto a = c.tgt(u);
    const Matrix r = y->transport(*c.inverse(u)) / norm[a];
    for (std::size_t p = 0; p < y->base_size(a); ++p) k.set_entry(u, p, r);
  }
  return Retraction{std::move(k), RetractionFlavor::haar_groupoid, std::move(norm), std::nullopt};
}

namespace {

/// d ≤ a in a thin category.
bool below(const FiniteCategory& c, ObjectIndex d, ObjectIndex a) { return !c.hom(d, a).empty(); }

GradedData graded_layout(const FiniteCategory& c, const ObjectMap<std::size_t>& dims) {
  GradedData g;
  g.summand_dims = dims;
  g.blocks = ObjectMap<std::vector<GradedBlock>>(c.object_count());
  for (auto a : c.objects()) {
    std::size_t offset = 0;
    for (auto e : c.objects())
      if (below(c, e, a)) {
        g.blocks[a].push_back({e, offset, dims[e]});
        offset += dims[e];
      }
  }
  return g;
}

std::size_t graded_dim(const GradedData& g, ObjectIndex a) {
  std::size_t n = 0;
  for (const auto& b : g.blocks[a]) n += b.size;
  return n;
}

const GradedBlock* find_block(const GradedData& g, ObjectIndex a, ObjectIndex e) {
  for (const auto& b : g.blocks[a])
    if (b.summand == e) return &b;
  return nullptr;
}

}  // namespace

GradedTarget build_graded_target(const CategoryPtr& cat, const ObjectMap<std::size_t>& summand_dims) {
  const auto& c = *cat;
  if (!c.is_thin())
    throw Error(ErrorKind::not_thin, "compilation", "graded targets need a thin category");
  if (summand_dims.size() != c.object_count())
    throw Error(ErrorKind::shape_mismatch, "compilation", "summand dimensions must cover every object");
  GradedData g = graded_layout(c, summand_dims);

  ObjectMap<std::size_t> fiber(c.object_count());
  for (auto a : c.objects()) fiber[a] = graded_dim(g, a);
  ArrowMap<Matrix> trunc(c.arrow_count());
  g.inclusion = ArrowMap<Matrix>(c.arrow_count());
  for (auto u : c.arrows()) {
    const auto d = c.src(u);
    const auto a = c.tgt(u);
    // Truncation E_Y(a) → E_Y(d): keep the summands U(e), e ≤ d.
    Matrix t = Matrix::Zero(Eigen::Index(fiber[d]), Eigen::Index(fiber[a]));
    for (const auto& bd : g.blocks[d]) {
      const auto* ba = find_block(g, a, bd.summand);
      for (std::size_t i = 0; i < bd.size; ++i) t(Eigen::Index(bd.offset + i), Eigen::Index(ba->offset + i)) = 1.0;
    }
    trunc[u] = std::move(t);
    // Inclusion E_Y(d) → E_Y(a): the top summand U(d) only.
    Matrix e = Matrix::Zero(Eigen::Index(fiber[a]), Eigen::Index(fiber[d]));
    const auto* top_d = find_block(g, d, d);
    const auto* top_a = find_block(g, a, d);
    for (std::size_t i = 0; i < top_d->size; ++i)
      e(Eigen::Index(top_a->offset + i), Eigen::Index(top_d->offset + i)) = 1.0;
    g.inclusion[u] = std::move(e);
  }
  auto y = share(FeatureFunctor::pointwise(cat, fiber, std::move(trunc)));

  CategoryKernel k(y, y, Regime::IN_bundle);
  for (auto u : c.arrows()) {
    if (!(c.weight(u) > 0.0))
      throw Error(ErrorKind::zero_weight, "compilation",
                  "graded retraction needs positive weights; '" + c.arrow_id(u) + "' has none", c.arrow_id(u));
    k.set_entry(u, 0, g.inclusion[u] / c.weight(u));
  }
  Retraction r{std::move(k), RetractionFlavor::thin_graded, ObjectMap<double>(c.object_count(), 1.0), std::move(g)};
  return GradedTarget{y, std::move(r)};
}

Retraction build_retraction(const FunctorPtr& y) {
  const auto& c = y->category();
  if (c.is_groupoid()) return build_haar_retraction(y);
  if (c.is_thin()) {
    // Recover U(e) from fiber differences and accept only if the functor is exactly the graded one.
    // Lower sets grow strictly along the order, so sorting by their size is a linear extension.
    std::vector<ObjectIndex> order(c.objects().begin(), c.objects().end());
    auto lower_size = [&](ObjectIndex a) {
      return std::ranges::count_if(c.objects(), [&](ObjectIndex e) { return below(c, e, a); });
    };
    std::ranges::stable_sort(order, {}, lower_size);
    ObjectMap<std::size_t> dims(c.object_count(), 0);
    for (auto a : order) {
      std::size_t lower = 0;
      for (auto e : c.objects())
        if (e != a && below(c, e, a)) lower += dims[e];
      if (y->fiber_dim(a) < lower)
        throw Error(ErrorKind::no_retraction, "compilation",
                    "fiber at '" + c.object_name(a) + "' is smaller than its lower set's summands",
                    c.object_name(a));
      dims[a] = y->fiber_dim(a) - lower;
    }
    auto graded = build_graded_target(y->category_ptr(), dims);
    if (*graded.functor == *y) {
      CategoryKernel k(y, y, Regime::IN_bundle);
      k.set_coefficients(graded.retraction.kernel.coefficients());
      graded.retraction.kernel = std::move(k);
      return graded.retraction;
    }
    throw Error(ErrorKind::no_retraction, "compilation",
                "thin category target is not a lower-set graded functor; no retraction constructor available");
  }
  throw Error(ErrorKind::no_retraction, "compilation",
              "no retraction constructor available for categories that are neither groupoids nor thin");
}

GradedLawReport check_graded_laws(const Retraction& r) {
  GradedLawReport rep;
  if (!r.graded) return rep;
  const auto& y = *r.functor();
  const auto& c = y.category();
  const auto& g = *r.graded;
  for (auto w : c.arrows()) {
    const auto a = c.src(w);
    const auto cc = c.tgt(w);
    for (auto ud : c.incoming(cc)) {
      const auto d = c.src(ud);
      const Matrix lhs = y.transport(w) * g.inclusion[ud];
      if (below(c, d, a)) {
        const auto da = c.hom(d, a).front();
        if (!(lhs == g.inclusion[da])) ++rep.nat_failures;
      } else if (!lhs.isZero(0.0)) {
        ++rep.ann_failures;
      }
    }
  }
  for (auto a : c.objects()) {
    Matrix sum = Matrix::Zero(Eigen::Index(y.fiber_dim(a)), Eigen::Index(y.fiber_dim(a)));
    for (auto u : c.incoming(a)) sum += g.inclusion[u] * y.transport(u);
    if (!(sum == Matrix::Identity(sum.rows(), sum.cols()))) ++rep.poi_failures;
  }
  return rep;
}

NetworkSpec compile_equivariant(const Retraction& r, const ObjectwiseMap& g, const FunctorPtr& x) {
  if (!same_functor(g.input, x))
    throw Error(ErrorKind::type_mismatch, "compilation", "objectwise map does not read the input functor");
  const auto& c = x->category();
  for (auto b : c.objects()) {
    const bool needed = std::ranges::any_of(c.arrows(), [&](ArrowIndex u) {
      return c.src(u) == b && c.weight(u) > 0.0;
    });
    if (needed && !g.has(b))
      throw Error(ErrorKind::malformed_input, "compilation",
                  "objectwise map missing at '" + c.object_name(b) + "'", c.object_name(b));
    if (g.output->fiber_dim(b) != r.functor()->fiber_dim(b) || g.output->base_size(b) != r.functor()->base_size(b))
      throw Error(ErrorKind::shape_mismatch, "compilation",
                  "objectwise map lands in the wrong fiber at '" + c.object_name(b) + "'", c.object_name(b));
  }
  ObjectwiseMap gy = g;
  gy.output = r.kernel.source();
  NetworkSpec net{x, {LiftLayer{x}, ComponentwiseLiftLayer{std::move(gy)}, BundleConvLayer{r.kernel, true}}};
  net.typecheck();
  return net;
}

NetworkSpec compile_equivariant(const Retraction& r, const NetworkSpec& g) {
  ObjectwiseMap m(g.input, g.output());
  auto frag = std::make_shared<const NetworkSpec>(g);
  for (auto b : g.input->category().objects()) m.stages[b] = std::vector<Stage>{FragmentStage{frag}};
  return compile_equivariant(r, m, g.input);
}

double check_retraction(const Retraction& r, const std::vector<Section>& samples) {
  const auto& y = r.functor();
  double res = 0.0;
  for (const auto& h : samples)
    for (auto a : y->category().objects()) {
      if (!h.has(a)) continue;
      const Matrix back = bundle_conv_forward(r.kernel, bundle_lift(y, h, a));
      res = std::max(res, sup_norm(back - h.at(a)));
    }
  return res;
}

StabilityBound stability_bound(const Retraction& r, const ObjectwiseMap& g, const ObjectwiseMap& h,
                               const std::vector<Section>& samples) {
  const auto& x = *g.input;
  const auto& c = x.category();
  StabilityBound out;
  for (auto a : c.objects()) {
    double mass = 0.0;
    for (auto u : c.incoming(a)) {
      double gu = 0.0;
      for (std::size_t y = 0; y < r.functor()->base_size(a); ++y) gu = std::max(gu, operator_norm(r.kernel.entry(u, y)));
      mass += c.weight(u) * gu;
    }
    out.kernel_mass = std::max(out.kernel_mass, mass);
  }
  for (const auto& s : samples)
    for (auto a : c.objects()) {
      if (!s.has(a)) continue;
      for (auto u : c.incoming(a)) {
        if (!(c.weight(u) > 0.0)) continue;
        const auto b = c.src(u);
        const Matrix t = x.apply(u, s.at(a));
        out.map_gap = std::max(out.map_gap, sup_norm(g.apply(b, t) - h.apply(b, t)));
      }
    }
  out.bound = out.kernel_mass * out.map_gap;
  return out;
}

}  // namespace cenn
