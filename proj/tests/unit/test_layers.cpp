#include <doctest.h>

#include "fixtures.hpp"

#include <cmath>

using namespace cenn;

namespace {

/// Sum of the basis kernels with distinct weights, so no admissible direction is skipped.
CategoryKernel generic_kernel(const ParameterBasis& b, Regime regime) {
  REQUIRE_FALSE(b.kernels.empty());
  CategoryKernel k = b.kernels.front();
  k *= 0.0;
  for (std::size_t i = 0; i < b.kernels.size(); ++i) {
    CategoryKernel t = b.kernels[i];
    t *= 0.3 + 0.7 * double(i);
    k += t;
  }
  k.set_regime(regime);
  return k;
}

ScalarChannel natural_channel(const FeatureFunctor& f) {
  auto channels = solve_scalar_channels(f);
  REQUIRE_FALSE(channels.empty());
  return channels.front();
}

}  // namespace

TEST_CASE("category convolution on C2 by hand") {
  auto s = fx::c2_sign_sign();
  auto k = fx::scalar_kernel(s.x, s.y, {{"e", 2.0}, {"g", 0.5}}, Regime::IN);
  Section x(s.x);
  const auto a = s.category->object("*");
  x.set(a, fx::scalar(3.0));
  // 2·3 + 0.5·(−1)·3
  CHECK(conv_forward(k, x).at(a)(0, 0) == doctest::Approx(4.5));
  ObjectMap<Matrix> bias(1, fx::scalar(1.0));
  k.set_bias(bias);
  CHECK(conv_forward(k, x).at(a)(0, 0) == doctest::Approx(5.5));
}

TEST_CASE("convolution with admissible kernels is equivariant") {
  const auto c2 = fx::c2();
  const auto s3 = FiniteGroup::symmetric(3);
  std::vector<std::pair<FunctorPtr, FunctorPtr>> cases;
  auto a = build_group_category(c2, GroupAction::swap(c2), regular_rep(c2), sign_rep(c2));
  cases.emplace_back(a.x, a.y);
  auto b = build_group_category(s3, GroupAction::natural(s3, 3), regular_rep(s3), sign_rep(s3));
  cases.emplace_back(b.x, b.y);
  auto chain = chain_poset(3);
  cases.emplace_back(constant_functor(chain, fx::dims(*chain, 2)), constant_functor(chain, fx::dims(*chain, 1)));
  for (const auto& [x, y] : cases) {
    auto k = generic_kernel(solve_parameter_space(assemble_in_constraints(x, y, Regime::IN)), Regime::IN);
    auto biases = solve_natural_bias(*y);
    if (!biases.empty()) k.set_bias(biases.front());
    NetworkSpec net{x, {ConvLayer{k}}};
    auto report = check_equivariance(net, random_sections(x, 20, 11));
    CHECK(report.max_residual < 1e-9);
  }
}

TEST_CASE("unconstrained kernels break equivariance") {
  auto s = fx::c2_setting(trivial_rep(fx::c2()), sign_rep(fx::c2()));
  auto k = fx::scalar_kernel(s.x, s.y, {{"e", 1.0}, {"g", 1.0}}, Regime::IN);
  NetworkSpec net{s.x, {ConvLayer{k}}};
  auto report = check_equivariance(net, random_sections(s.x, 5, 1));
  CHECK(report.max_residual > 0.1);
  REQUIRE(report.witness() != nullptr);
  CHECK(s.category->arrow_id(report.witness()->arrow) == "g");
}

TEST_CASE("convolution rejects bundle kernels") {
  auto s = fx::c2_sign_sign();
  CategoryKernel k(s.x, s.y, Regime::IN_bundle);
  Section x(s.x);
  x.set(s.category->object("*"), fx::scalar(1.0));
  try {
    conv_forward(k, x);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::regime_mismatch);
  }
}

TEST_CASE("gates with natural channels are equivariant") {
  const auto g = FiniteGroup::symmetric(3);
  auto s = build_group_category(g, GroupAction::natural(g, 3), regular_rep(g), regular_rep(g));
  for (auto kind : {ActivationKind::relu, ActivationKind::tanh, ActivationKind::softplus, ActivationKind::leaky_relu}) {
    GateLayer layer{s.x, Activation{kind, 0.1}, {GateBlock{0, GateBlock::npos, natural_channel(*s.x)}}};
    auto report = check_equivariance(Layer{layer}, s.x, random_sections(s.x, 10, 5));
    CHECK(report.max_residual < 1e-12);
  }
  GateLayer bad{s.x, Activation{}, {GateBlock{0, GateBlock::npos, coordinate_channel(*s.x, 0)}}};
  CHECK(check_equivariance(Layer{bad}, s.x, random_sections(s.x, 10, 5)).max_residual > 1e-3);
}

TEST_CASE("gate scales each block by its own channel") {
  auto s = fx::c2_setting(trivial_rep(fx::c2(), 2), trivial_rep(fx::c2(), 2));
  const auto a = s.category->object("*");
  Section z(s.x);
  z.set(a, fx::row({-1.0, 2.0}));
  std::vector<GateBlock> blocks{{0, 1, coordinate_channel(*s.x, 1)}, {1, 1, coordinate_channel(*s.x, 0)}};
  auto out = gate_forward(Activation{ActivationKind::relu}, blocks, z);
  CHECK(out.at(a)(0, 0) == doctest::Approx(-2.0));  // -1 · relu(2)
  CHECK(out.at(a)(0, 1) == doctest::Approx(0.0));   // 2 · relu(-1)
}

TEST_CASE("activations") {
  for (auto name : {"relu", "leaky_relu", "tanh", "softplus"}) {
    auto a = Activation::from_string(name, 0.2);
    CHECK(to_string(a) == name);
    for (double t : {-1.3, -0.2, 0.4, 2.0}) {
      const double fd = (a(t + 1e-6) - a(t - 1e-6)) / 2e-6;
      CHECK(a.derivative(t) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  CHECK(Activation::from_string("leaky_relu", 0.2).lipschitz() == 1.0);
  CHECK_THROWS_AS(Activation::from_string("sigmoid"), Error);
}

TEST_CASE("bundle lift and reindexing") {
  auto chain = chain_poset(2);
  auto z = constant_functor(chain, fx::dims(*chain, 1));
  const auto top = chain->object("1");
  Section x(z);
  x.set(chain->object("0"), fx::scalar(5.0));
  x.set(top, fx::scalar(7.0));
  auto h = bundle_lift(z, x, top);
  REQUIRE(h.components.size() == 2);
  CHECK(h.at(chain->arrow_index("0<=1"))(0, 0) == 7.0);
  CHECK(h.at(chain->arrow_index("1<=1"))(0, 0) == 7.0);
  auto r = bundle_reindex(chain->arrow_index("0<=1"), h);
  CHECK(r.object == chain->object("0"));
  REQUIRE(r.components.size() == 1);
  CHECK(r.components[0](0, 0) == 7.0);
}

TEST_CASE("bundle convolution with admissible kernels is equivariant") {
  const auto c2 = fx::c2();
  auto s = build_group_category(c2, GroupAction::swap(c2), regular_rep(c2), regular_rep(c2));
  auto k = generic_kernel(solve_parameter_space(assemble_in_constraints(s.x, s.y, Regime::IN_bundle)),
                          Regime::IN_bundle);
  NetworkSpec net{s.x, {LiftLayer{s.x}, BundleConvLayer{k}}};
  net.typecheck();
  CHECK(check_equivariance(net, random_sections(s.x, 10, 2)).max_residual < 1e-9);

  // σ = id admits nonzero probe kernels only where the base action is trivial.
  auto t = fx::c2_setting(regular_rep(c2), regular_rep(c2));
  auto sigma = ProbeFamily::identity(*t.x);
  auto kp = generic_kernel(solve_parameter_space(assemble_in_constraints(t.x, t.y, Regime::IN_probe, sigma)),
                           Regime::IN_probe);
  kp.set_probe(sigma);
  NetworkSpec pnet{t.x, {LiftLayer{t.x}, BundleConvLayer{kp}}};
  CHECK(check_equivariance(pnet, random_sections(t.x, 10, 2)).max_residual < 1e-9);
  CHECK(solve_parameter_space(assemble_in_constraints(s.x, s.y, Regime::IN_probe, ProbeFamily::identity(*s.x)))
            .kernels.empty());

  CategoryKernel orphan(s.x, s.y, Regime::IN_probe);
  NetworkSpec onet{s.x, {LiftLayer{s.x}, BundleConvLayer{orphan}}};
  CHECK_THROWS_AS(network_forward(onet, random_sections(s.x, 1, 0).front()), Error);
}

TEST_CASE("objectwise maps") {
  auto s = fx::c2_setting(trivial_rep(fx::c2(), 2), trivial_rep(fx::c2()));
  const auto a = s.category->object("*");
  Matrix w(1, 2);
  w << 1, -2;
  Vector b(1);
  b << 0.5;
  auto m = ObjectwiseMap::affine(s.x, s.y, ObjectMap<Matrix>(1, w), ObjectMap<Vector>(1, b));
  CHECK(m.apply(a, fx::row({3.0, 1.0}))(0, 0) == doctest::Approx(1.5));
  CHECK(m.lipschitz_bound(a).value() == doctest::Approx(3.0));
  m.stages[a]->push_back(ActivationStage{Activation{ActivationKind::tanh}});
  m.stages[a]->push_back(ClipStage{0.5});
  CHECK(m.apply(a, fx::row({3.0, 1.0}))(0, 0) == doctest::Approx(0.5));
  CHECK(m.lipschitz_bound(a).value() == doctest::Approx(3.0));
  auto id = ObjectwiseMap::identity(s.x);
  CHECK(id.apply(a, fx::row({3.0, 1.0})) == fx::row({3.0, 1.0}));
  auto z = ObjectwiseMap::zero(s.x, s.y);
  CHECK(z.apply(a, fx::row({3.0, 1.0}))(0, 0) == 0.0);
}

TEST_CASE("networks compose and typecheck") {
  const auto g = FiniteGroup::symmetric(3);
  auto s = build_group_category(g, GroupAction::natural(g, 3), regular_rep(g), regular_rep(g));
  auto k1 = generic_kernel(solve_parameter_space(assemble_in_constraints(s.x, s.y, Regime::IN)), Regime::IN);
  auto t = group_functor(s.category, g, GroupAction::natural(g, 3), trivial_rep(g));
  auto k2 = generic_kernel(solve_parameter_space(assemble_in_constraints(s.y, t, Regime::IN)), Regime::IN);
  NetworkSpec net{s.x,
                  {ConvLayer{k1}, GateLayer{s.y, Activation{}, {GateBlock{0, GateBlock::npos, natural_channel(*s.y)}}},
                   ConvLayer{k2}}};
  net.typecheck();
  CHECK(same_functor(net.output(), t));
  CHECK(check_equivariance(net, random_sections(s.x, 10, 9)).max_residual < 1e-9);

  NetworkSpec wrong{t, {ConvLayer{k1}}};
  try {
    wrong.typecheck();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::type_mismatch);
  }
  NetworkSpec bundle_end{s.x, {LiftLayer{s.x}}};
  CHECK(bundle_end.output_is_bundle());
  CHECK_THROWS_AS(network_forward(bundle_end, random_sections(s.x, 1, 0).front()), Error);
}

TEST_CASE("empty network is the identity") {
  auto s = fx::c2_sign_sign();
  NetworkSpec net{s.x, {}};
  auto x = random_sections(s.x, 1, 4).front();
  CHECK(network_forward(net, x) == x);
}

TEST_CASE("objectwise network evaluation matches the section form") {
  auto chain = chain_poset(3);
  auto z = constant_functor(chain, fx::dims(*chain, 1));
  auto k = generic_kernel(solve_parameter_space(assemble_in_constraints(z, z, Regime::IN)), Regime::IN);
  NetworkSpec net{z, {ConvLayer{k}}};
  auto x = random_sections(z, 1, 8).front();
  auto full = network_forward(net, x);
  for (auto a : chain->objects()) CHECK(sup_norm(full.at(a) - network_forward(net, a, x.at(a))) < 1e-12);
}
