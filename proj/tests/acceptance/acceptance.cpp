// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <cenn/builders.hpp>
#include <cenn/compilation.hpp>
#include <cenn/constraints.hpp>
#include <cenn/equivariance.hpp>
#include <cenn/uat.hpp>

#include "iso_oracle.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using namespace cenn;

namespace {

// Tolerances and budgets.
constexpr double kNaturalityTol = 1e-9;
constexpr double kStructuralSeconds = 10.0;
constexpr std::size_t kStructuralSamples = 200;
constexpr double kSteerTol = 1e-9;
constexpr std::size_t kSteerConfigs = 20;
constexpr double kRetractionTol = 1e-9;
constexpr std::size_t kRetractionSamples = 100;
constexpr double kProjectionTol = 1e-9;
constexpr std::size_t kProjectionFamilies = 10;
constexpr std::size_t kProjectionSamples = 100;
constexpr double kLipschitzSlack = 1e-9;
constexpr std::size_t kLipschitzPairs = 1000;
constexpr double kUatTol = 1e-2;
constexpr double kUatInClassTol = 1e-6;
constexpr double kUatEqvTol = 1e-9;
constexpr double kUatSeconds = 60.0;
constexpr std::size_t kUatSamples = 64;
constexpr std::size_t kIsoMaxCells = 12;
constexpr double kGradTol = 1e-4;
constexpr std::size_t kGradPoints = 20;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s | %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Runs a criterion; an exception counts as failure with its message.
void criterion(int id, const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    report(id, ok, what, detail);
  } catch (const std::exception& e) {
    report(id, false, what, std::string("exception: ") + e.what());
  }
}

CategoryKernel random_combination(const std::vector<CategoryKernel>& basis, Rng& rng, Regime regime) {
  if (basis.empty()) throw std::runtime_error("empty admissible basis");
  std::normal_distribution<double> d;
  CategoryKernel k = basis.front();
  k *= 0.0;
  for (const auto& b : basis) {
    CategoryKernel t = b;
    t *= d(rng);
    k += t;
  }
  k.set_regime(regime);
  return k;
}

ObjectMap<Matrix> random_field(const std::vector<ObjectMap<Matrix>>& basis, Rng& rng) {
  std::normal_distribution<double> d;
  ObjectMap<Matrix> out = basis.front();
  for (auto& m : out) m.setZero();
  for (const auto& b : basis) {
    const double c = d(rng);
    for (std::size_t a = 0; a < out.size(); ++a) out[ObjectIndex{a}] += c * b[ObjectIndex{a}];
  }
  return out;
}

struct Setting {
  std::string name;
  FunctorPtr x;
  FunctorPtr y;
};

CategoryPtr make(const CategorySpec& s) { return std::make_shared<const FiniteCategory>(FiniteCategory::from_spec(s)); }

// ---- 1 ----

std::pair<bool, std::string> structural_suite() {
  const auto t0 = Clock::now();
  const auto c2 = FiniteGroup::cyclic(2);
  std::vector<Setting> settings;
  {
    auto s = build_group_category(c2, GroupAction::trivial(c2), regular_rep(c2), sign_rep(c2));
    settings.push_back({"C2 group", s.x, s.y});
  }
  {
    auto ag = build_action_groupoid(c2, GroupAction::swap(c2));
    settings.push_back({"C2 swap groupoid", action_groupoid_functor(ag, c2, regular_rep(c2)),
                        action_groupoid_functor(ag, c2, sign_rep(c2))});
  }
  {
    auto d = diamond_lattice();
    settings.push_back({"diamond", constant_functor(d, ObjectMap<std::size_t>(d->object_count(), 2)),
                        build_graded_target(d, ObjectMap<std::size_t>(d->object_count(), 1)).functor});
  }
  {
    auto f = build_face_category(CWComplex::path_graph(4), false);
    settings.push_back({"path faces", constant_functor(f, ObjectMap<std::size_t>(f->object_count(), 2)),
                        constant_functor(f, ObjectMap<std::size_t>(f->object_count(), 1))});
  }
  {
    auto ng = build_neighbourhood_groupoid(CWComplex::cycle_graph(3), 1);
    auto nf = build_neighbourhood_functors(ng, 1, 1);
    settings.push_back({"triangle neighbourhood", nf.x, nf.y});
  }

  double worst = 0.0;
  std::string where;
  Rng rng(2024);
  for (const auto& s : settings) {
    const auto z = s.x;  // hidden functor
    auto k1 = random_combination(solve_parameter_space(assemble_in_constraints(s.x, z, Regime::IN)).kernels, rng, Regime::IN);
    auto k2 = random_combination(solve_parameter_space(assemble_in_constraints(z, s.y, Regime::IN)).kernels, rng, Regime::IN);
    if (auto b = solve_natural_bias(*z); !b.empty()) k1.set_bias(random_field(b, rng));
    if (auto b = solve_natural_bias(*s.y); !b.empty()) k2.set_bias(random_field(b, rng));
    const auto channels = solve_scalar_channels(*z);
    if (channels.empty()) return {false, s.name + " has no natural scalar channel"};
    const auto channel = random_field(channels, rng);
    NetworkSpec net{s.x,
                    {ConvLayer{k1}, GateLayer{z, Activation{ActivationKind::tanh}, {GateBlock{0, GateBlock::npos, channel}}},
                     ConvLayer{k2}}};
    const auto r = check_equivariance(net, random_sections(s.x, kStructuralSamples, 7), kNaturalityTol);
    if (r.max_residual >= worst) {
      worst = r.max_residual;
      where = s.name;
    }
  }
  const double secs = since(t0);
  return {worst <= kNaturalityTol && secs <= kStructuralSeconds,
          "max residual " + num(worst) + " (" + where + ") <= " + num(kNaturalityTol) + " over " +
              std::to_string(settings.size()) + " settings x " + std::to_string(kStructuralSamples) +
              " sections; runtime " + num(secs) + " s <= " + num(kStructuralSeconds) + " s"};
}

// ---- 2 ----

struct Family {
  std::string name;
  CategoryPtr cat;
  std::vector<FunctorPtr> functors;
};

std::vector<Family> oracle_families() {
  std::vector<Family> out;
  auto groups = [&](const FiniteGroup& g, const GroupAction& act, const std::string& name, bool regular) {
    const auto cat = group_category(g);
    std::vector<Representation> reps{trivial_rep(g), sign_rep(g), direct_sum(trivial_rep(g), sign_rep(g))};
    if (regular) reps.push_back(regular_rep(g));
    Family f{name, cat, {}};
    for (const auto& r : reps) f.functors.push_back(group_functor(cat, g, act, r));
    out.push_back(std::move(f));
  };
  const auto c2 = FiniteGroup::cyclic(2), c3 = FiniteGroup::cyclic(3), s3 = FiniteGroup::symmetric(3);
  groups(c2, GroupAction::trivial(c2), "C2 trivial action", true);
  groups(c2, GroupAction::swap(c2), "C2 swap action", true);
  groups(c3, GroupAction::trivial(c3), "C3 trivial action", false);
  groups(c3, GroupAction::natural(c3, 3), "C3 rotation", false);
  groups(s3, GroupAction::trivial(s3), "S3 trivial action", false);
  groups(s3, GroupAction::natural(s3, 3), "S3 natural action", false);

  {
    auto ag = build_action_groupoid(c2, GroupAction::swap(c2));
    Family f{"C2 swap groupoid", ag.category, {}};
    for (const auto& r : {trivial_rep(c2), sign_rep(c2), regular_rep(c2)})
      f.functors.push_back(action_groupoid_functor(ag, c2, r));
    out.push_back(std::move(f));
  }

  auto thin = [&](const std::string& name, CategoryPtr cat) {
    Family f{name, cat, {}};
    const auto n = cat->object_count();
    Rng rng(n * 31 + cat->arrow_count());
    std::uniform_int_distribution<std::size_t> dim(0, 2);
    for (std::size_t d : {1, 2}) f.functors.push_back(constant_functor(cat, ObjectMap<std::size_t>(n, d)));
    ObjectMap<std::size_t> mixed(n);
    for (auto& v : mixed) v = dim(rng);
    f.functors.push_back(constant_functor(cat, mixed));
    // Graded targets need positive weights.
    if (std::ranges::all_of(cat->arrows(), [&](ArrowIndex u) { return cat->weight(u) > 0.0; }))
      f.functors.push_back(build_graded_target(cat, ObjectMap<std::size_t>(n, 1)).functor);
    // Graded functors with fibers above 2 are outside the class.
    std::erase_if(f.functors, [&](const FunctorPtr& z) {
      return std::ranges::any_of(cat->objects(), [&](ObjectIndex a) { return z->fiber_dim(a) > 2; });
    });
    out.push_back(std::move(f));
  };
  thin("chain2", chain_poset(2));
  thin("chain3", chain_poset(3));
  thin("path2 faces", build_face_category(CWComplex::path_graph(2), false));
  {
    auto s = chain_poset(2)->to_spec();
    s.weights["0<=1"] = 0.5;
    s.weights["1<=1"] = 0.0;
    thin("weighted chain2", make(s));
  }
  {
    // Monoid {e, g} with g idempotent, acting by an idempotent projection.
    CategorySpec s;
    s.objects = {"*"};
    s.arrows = {{"e", "*", "*"}, {"g", "*", "*"}};
    s.identities = {{"*", "e"}};
    s.composition = {{"e", "e", "e"}, {"e", "g", "g"}, {"g", "e", "g"}, {"g", "g", "g"}};
    auto cat = make(s);
    Family f{"idempotent monoid", cat, {}};
    for (std::size_t n : {1, 2}) {
      ArrowMap<Matrix> l(2);
      l[cat->arrow_index("e")] = Matrix::Identity(Eigen::Index(n), Eigen::Index(n));
      Matrix p = Matrix::Zero(Eigen::Index(n), Eigen::Index(n));
      p(0, 0) = 1.0;
      l[cat->arrow_index("g")] = p;
      f.functors.push_back(make_functor(FeatureFunctor::pointwise(cat, ObjectMap<std::size_t>(1, n), l)));
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::pair<bool, std::string> oracle_equivalence() {
  std::size_t cases = 0, mismatches = 0, skipped = 0;
  std::string first;
  for (const auto& fam : oracle_families()) {
    if (fam.cat->arrow_count() > 8) continue;
    for (const auto& z : fam.functors)
      for (const auto& zp : fam.functors)
        for (auto regime : {Regime::IN, Regime::IN_bundle, Regime::IN_probe}) {
          std::optional<ProbeFamily> sigma;
          if (regime == Regime::IN_probe) {
            try {
              sigma = ProbeFamily::identity(*z);
            } catch (const Error&) {
              sigma = ProbeFamily::from_tau(*z);
            }
          }
          const auto n = KernelLayout(z, zp).size();
          if (n == 0) {
            ++skipped;
            continue;
          }
          const auto solved = solve_parameter_space(assemble_in_constraints(z, zp, regime, sigma)).kernels.size();
          const auto brute = oracle::admissible_dimension(z, zp, regime, sigma);
          ++cases;
          if (solved != brute) {
            ++mismatches;
            if (first.empty())
              first = fam.name + " " + to_string(regime) + ": " + std::to_string(solved) + " vs " + std::to_string(brute);
          }
        }
  }
  return {mismatches == 0 && cases > 0, std::to_string(cases) + " systems, " + std::to_string(mismatches) +
                                            " dimension mismatches (exact match required)" +
                                            (first.empty() ? "" : "; first: " + first) + "; " +
                                            std::to_string(skipped) + " pairs without unknowns"};
}

// ---- 3 ----

std::pair<bool, std::string> steerability_in_in() {
  Rng rng(33);
  const std::vector<FiniteGroup> groups{FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::symmetric(3)};
  std::uniform_int_distribution<int> pick_group(0, 2), pick_rep(0, 2), pick_action(0, 2);
  std::size_t kernels = 0, passing = 0;
  double worst_in = 0.0;
  for (std::size_t cfg = 0; cfg < kSteerConfigs; ++cfg) {
    const auto& g = groups[std::size_t(pick_group(rng))];
    const int ai = pick_action(rng);
    const auto act = ai == 0 ? GroupAction::trivial(g)
                     : ai == 1 ? GroupAction::regular(g)
                               : (g.order() == 2 ? GroupAction::swap(g) : GroupAction::natural(g, 3));
    auto rep = [&](int i) { return i == 0 ? trivial_rep(g) : i == 1 ? sign_rep(g) : regular_rep(g); };
    const auto s = build_group_category(g, act, rep(pick_rep(rng)), rep(pick_rep(rng)));
    const auto basis = solve_parameter_space(assemble_steerability_constraints(s.x, s.y)).kernels;
    const auto in = assemble_in_constraints(s.x, s.y, Regime::IN);
    std::vector<CategoryKernel> candidates = basis;
    if (!basis.empty()) candidates.push_back(random_combination(basis, rng, Regime::pointwise_steerable));
    for (const auto& k : candidates) {
      ++kernels;
      if (check_pointwise_steerability(k) > kSteerTol) continue;
      ++passing;
      worst_in = std::max(worst_in, in.residual(k));
    }
  }
  return {worst_in <= kSteerTol && passing == kernels && kernels > 0,
          std::to_string(passing) + "/" + std::to_string(kernels) + " steerable kernels over " +
              std::to_string(kSteerConfigs) + " configurations; max IN residual " + num(worst_in) +
              " <= " + num(kSteerTol)};
}

// ---- 4 ----

std::pair<bool, std::string> retraction_identities() {
  double worst = 0.0;
  std::size_t law_failures = 0;
  for (const auto& g : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::symmetric(3)}) {
    const auto cat = group_category(g);
    const auto y = group_functor(cat, g, GroupAction::regular(g), direct_sum(regular_rep(g), sign_rep(g)));
    const auto r = build_haar_retraction(y);
    worst = std::max(worst, check_retraction(r, random_sections(y, kRetractionSamples, 5)));
  }
  Rng rng(44);
  std::bernoulli_distribution edge(0.4);
  std::uniform_int_distribution<std::size_t> dim(0, 2);
  for (std::size_t n : {4, 5, 6}) {
    std::vector<std::string> elems;
    for (std::size_t i = 0; i < n; ++i) elems.push_back("p" + std::to_string(i));
    std::vector<std::pair<std::string, std::string>> rel;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (edge(rng)) rel.emplace_back(elems[i], elems[j]);
    const auto cat = build_poset_category(elems, rel);
    ObjectMap<std::size_t> dims(n);
    for (auto& d : dims) d = dim(rng);
    dims[ObjectIndex{0}] = 1;
    const auto gt = build_graded_target(cat, dims);
    worst = std::max(worst, check_retraction(gt.retraction, random_sections(gt.functor, kRetractionSamples, 6)));
    if (!check_graded_laws(gt.retraction).ok()) ++law_failures;
  }
  return {worst <= kRetractionTol && law_failures == 0,
          "max |R(Delta h) - h| " + num(worst) + " <= " + num(kRetractionTol) +
              " (Haar C2/C3/S3, graded on 3 random posets); exact graded-law failures " + std::to_string(law_failures)};
}

// ---- 5 ----

std::vector<std::pair<Retraction, FunctorPtr>> compile_settings() {
  std::vector<std::pair<Retraction, FunctorPtr>> out;
  const auto c2 = FiniteGroup::cyclic(2);
  const auto s3 = FiniteGroup::symmetric(3);
  {
    auto s = build_group_category(c2, GroupAction::trivial(c2), sign_rep(c2), sign_rep(c2));
    out.emplace_back(build_retraction(s.y), s.x);
  }
  {
    auto s = build_group_category(s3, GroupAction::natural(s3, 3), regular_rep(s3), sign_rep(s3));
    out.emplace_back(build_retraction(s.y), s.x);
  }
  {
    auto ag = build_action_groupoid(c2, GroupAction::swap(c2));
    out.emplace_back(build_retraction(action_groupoid_functor(ag, c2, regular_rep(c2))),
                     action_groupoid_functor(ag, c2, sign_rep(c2)));
  }
  for (const auto& cat : {chain_poset(3), diamond_lattice()}) {
    const auto n = cat->object_count();
    out.emplace_back(build_graded_target(cat, ObjectMap<std::size_t>(n, 1)).retraction,
                     constant_functor(cat, ObjectMap<std::size_t>(n, 2)));
  }
  return out;
}

std::pair<bool, std::string> projection_lemma() {
  const auto settings = compile_settings();
  double worst = 0.0;
  for (std::size_t seed = 0; seed < kProjectionFamilies; ++seed) {
    const auto& [r, x] = settings[seed % settings.size()];
    const auto family = seed % 2 ? TargetFamily::affine : TargetFamily::affine_tanh;
    const auto g = sample_equivariant_target(r, x, seed, family);
    const auto again = compile_equivariant(r, g);
    worst = std::max(worst, max_difference(g, again, random_sections(x, kProjectionSamples, 100 + seed)));
  }
  return {worst <= kProjectionTol, "max |compile(R, G) - G| " + num(worst) + " <= " + num(kProjectionTol) + " over " +
                                       std::to_string(kProjectionFamilies) + " natural families x " +
                                       std::to_string(kProjectionSamples) + " samples"};
}

// ---- 6 ----

std::pair<bool, std::string> lipschitz_soundness() {
  const auto c2 = FiniteGroup::cyclic(2);
  const auto s3 = FiniteGroup::symmetric(3);
  std::vector<CategoryKernel> kernels;
  Rng rng(66);
  std::normal_distribution<double> d;
  auto random_kernel = [&](FunctorPtr x, FunctorPtr y) {
    CategoryKernel k(x, y, Regime::unconstrained);
    Vector v(Eigen::Index(k.coefficient_count()));
    for (auto& c : v) c = d(rng);
    k.set_coefficients(v);
    return k;
  };
  {
    auto s = build_group_category(c2, GroupAction::swap(c2), regular_rep(c2), sign_rep(c2));
    kernels.push_back(random_combination(solve_parameter_space(assemble_in_constraints(s.x, s.y, Regime::IN)).kernels, rng, Regime::IN));
    kernels.push_back(random_kernel(s.x, s.y));
  }
  {
    auto s = build_group_category(s3, GroupAction::natural(s3, 3), regular_rep(s3), direct_sum(trivial_rep(s3), sign_rep(s3)));
    kernels.push_back(random_kernel(s.x, s.y));
  }
  {
    auto spec = chain_poset(3)->to_spec();
    std::uniform_real_distribution<double> w(0.0, 2.0);
    for (auto& [id, v] : spec.weights) v = w(rng);
    auto cat = make(spec);
    const auto n = cat->object_count();
    kernels.push_back(random_kernel(constant_functor(cat, ObjectMap<std::size_t>(n, 2)),
                                    build_graded_target(cat, ObjectMap<std::size_t>(n, 1)).functor));
  }
  {
    auto ng = build_neighbourhood_groupoid(CWComplex::cycle_graph(4), 1);
    auto nf = build_neighbourhood_functors(ng, 2, 1);
    kernels.push_back(random_kernel(nf.x, nf.y));
  }

  double worst_ratio = 0.0;  // measured quotient over its bound
  double worst_excess = -1.0;
  std::uniform_real_distribution<double> scale(-3.0, 1.0);
  for (const auto& k : kernels) {
    const auto& x = k.source();
    const auto& c = k.category();
    ObjectMap<double> bound(c.object_count());
    for (auto a : c.objects()) bound[a] = compute_l1_bound(k, a).lipschitz;
    for (std::size_t p = 0; p < kLipschitzPairs; ++p) {
      const auto s = random_section(x, rng);
      Section t(x);
      const double eps = std::pow(10.0, scale(rng));
      const auto delta = random_section(x, rng);
      for (auto a : c.objects()) t.set(a, s.at(a) + eps * delta.at(a));
      const auto ys = conv_forward(k, s), yt = conv_forward(k, t);
      for (auto a : c.objects()) {
        const double in = sup_norm(s.at(a) - t.at(a));
        if (in == 0.0) continue;
        const double q = sup_norm(ys.at(a) - yt.at(a)) / in;
        worst_excess = std::max(worst_excess, q - bound[a]);
        if (bound[a] > 0.0) worst_ratio = std::max(worst_ratio, q / bound[a]);
      }
    }
  }
  return {worst_excess <= kLipschitzSlack,
          "max quotient - bound " + num(worst_excess) + " <= " + num(kLipschitzSlack) + " (max quotient/bound " +
              num(worst_ratio) + ") over " + std::to_string(kernels.size()) + " conv layers x " +
              std::to_string(kLipschitzPairs) + " pairs"};
}

// ---- 7 ----

std::pair<bool, std::string> uat_decay() {
  const auto t0 = Clock::now();
  const auto c2 = FiniteGroup::cyclic(2);
  auto sign = build_group_category(c2, GroupAction::trivial(c2), sign_rep(c2), sign_rep(c2));
  auto chain = chain_poset(3);
  auto chain_x = constant_functor(chain, ObjectMap<std::size_t>(3, 2));
  auto graded = build_graded_target(chain, ObjectMap<std::size_t>(3, 1));

  struct Case {
    std::string name;
    Retraction r;
    FunctorPtr x;
    TargetFamily family;
    double tol;
  };
  const std::vector<Case> cases{
      {"C2 sign", build_retraction(sign.y), sign.x, TargetFamily::affine_tanh, kUatTol},
      {"chain graded", graded.retraction, chain_x, TargetFamily::affine_tanh, kUatTol},
      {"C2 sign in-class", build_retraction(sign.y), sign.x, TargetFamily::affine, kUatInClassTol},
      {"chain graded in-class", graded.retraction, chain_x, TargetFamily::affine, kUatInClassTol},
  };
  bool ok = true;
  std::string detail;
  double worst_eqv = 0.0;
  for (const auto& cs : cases) {
    const UatProblem p{cs.r, cs.x, ProbeFamily::identity(*cs.x), sample_equivariant_target(cs.r, cs.x, 0, cs.family),
                       random_sections(cs.x, kUatSamples, 1)};
    const auto res = fit_cenn(p, default_capacity_grid(), FitBudget{}, 3);
    bool monotone = true;
    for (std::size_t i = 1; i < res.curve.size(); ++i)
      monotone = monotone && res.curve[i].best_error <= res.curve[i - 1].best_error;
    for (const auto& pt : res.curve) worst_eqv = std::max(worst_eqv, pt.eqv_residual);
    const double final_error = res.curve.back().best_error;
    ok = ok && monotone && final_error <= cs.tol;
    detail += cs.name + " " + num(res.curve.front().best_error) + " -> " + num(final_error) + " <= " + num(cs.tol) +
              (monotone ? "" : " (not monotone)") + "; ";
  }
  const double secs = since(t0);
  ok = ok && worst_eqv <= kUatEqvTol && secs <= kUatSeconds;
  return {ok, detail + "max eqv residual " + num(worst_eqv) + " <= " + num(kUatEqvTol) + "; runtime " + num(secs) +
                  " s <= " + num(kUatSeconds) + " s"};
}

// ---- 8 ----

std::pair<bool, std::string> rooted_isomorphisms() {
  std::vector<CWComplex> complexes;
  for (std::size_t n = 2; n <= 6; ++n) complexes.push_back(CWComplex::path_graph(n));
  for (std::size_t n = 3; n <= 6; ++n) complexes.push_back(CWComplex::cycle_graph(n));
  for (std::size_t n = 3; n <= 5; ++n) complexes.push_back(CWComplex::polygon(n));
  complexes.push_back(CWComplex::graph(4, {{0, 1}, {0, 2}, {0, 3}}));                  // star
  complexes.push_back(CWComplex::graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));  // K4
  complexes.push_back(CWComplex::graph(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}}));          // tree
  complexes.push_back(CWComplex::graph(4, {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {3, 2}}));  // two triangles

  std::size_t pairs = 0, mismatches = 0, patches = 0;
  for (const auto& k : complexes) {
    if (k.size() > kIsoMaxCells) continue;
    // Every radius up to the complex size covers every distinct patch.
    for (std::size_t radius = 0; radius <= k.size(); ++radius) {
      std::vector<RootedPatch> ps;
      for (std::size_t r = 0; r < k.size(); ++r) ps.push_back(extract_patch(k, r, radius));
      patches += ps.size();
      for (const auto& p1 : ps)
        for (const auto& p2 : ps) {
          ++pairs;
          if (enumerate_rooted_isomorphisms(p1, p2) != oracle::all_rooted_isomorphisms(p1, p2)) ++mismatches;
        }
      if (std::ranges::all_of(ps, [&](const RootedPatch& p) { return p.size() == k.size(); })) break;
    }
  }

  const auto k3 = CWComplex::cycle_graph(3);
  std::size_t vertex_pairs = 0, wrong_counts = 0;
  for (std::size_t a = 0; a < k3.size(); ++a)
    for (std::size_t b = 0; b < k3.size(); ++b) {
      if (k3.cell(a).dim != 0 || k3.cell(b).dim != 0) continue;
      ++vertex_pairs;
      if (enumerate_rooted_isomorphisms(extract_patch(k3, a, 1), extract_patch(k3, b, 1)).size() != 2) ++wrong_counts;
    }
  return {mismatches == 0 && wrong_counts == 0 && vertex_pairs == 9,
          std::to_string(mismatches) + " mismatches over " + std::to_string(pairs) + " patch pairs (" +
              std::to_string(complexes.size()) + " complexes <= " + std::to_string(kIsoMaxCells) +
              " cells); K3 radius-1 vertex pairs with != 2 isomorphisms: " + std::to_string(wrong_counts) + "/" +
              std::to_string(vertex_pairs)};
}

// ---- 9 ----

std::pair<bool, std::string> gradient_check_all() {
  double worst = 0.0;
  std::size_t archs = 0;
  std::uint64_t seed = 900;
  for (const auto& arch : default_capacity_grid())
    for (auto kind : {ActivationKind::tanh, ActivationKind::softplus}) {
      worst = std::max(worst, gradient_check(arch, Activation{kind}, 2, 3, kGradPoints, seed++));
      ++archs;
    }
  return {worst <= kGradTol, "max relative error " + num(worst) + " <= " + num(kGradTol) + " over " +
                                 std::to_string(archs) + " architectures x " + std::to_string(kGradPoints) + " points"};
}

}  // namespace

int main() {
  criterion(1, "structural equivariance of conv-gate-conv networks", structural_suite);
  criterion(2, "solver nullspace dimension equals brute-force oracle", oracle_equivalence);
  criterion(3, "pointwise steerable kernels satisfy the IN system", steerability_in_in);
  criterion(4, "retraction identities", retraction_identities);
  criterion(5, "compiling a natural family reproduces it", projection_lemma);
  criterion(6, "conv Lipschitz quotients within the L1 bound", lipschitz_soundness);
  criterion(7, "approximation error decays over the capacity grid", uat_decay);
  criterion(8, "rooted isomorphisms agree with exhaustive search", rooted_isomorphisms);
  criterion(9, "fit-loss gradients match central differences", gradient_check_all);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
