#include <doctest.h>

#include <cenn/io.hpp>

#include "fixtures.hpp"

#include <filesystem>

using namespace cenn;

namespace {

const ObjectIndex star{0};

/// Serialize, parse the text back, then deserialize: exercises the exact bytes written.
Json reparse(const Json& j) { return Json::parse(j.dump()); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::malformed_input;
}

}  // namespace

TEST_CASE("category documents round trip") {
  for (const auto& c : {fx::make(fx::c2_spec()), diamond_lattice(), group_category(FiniteGroup::symmetric(3))}) {
    const auto again = category_from_json(reparse(category_to_json(*c)));
    CHECK(*again == *c);
  }
}

TEST_CASE("category documents accept arrow triples and default weights") {
  const auto j = Json::parse(R"({
    "objects": ["*"],
    "arrows": [["e", "*", "*"], ["g", "*", "*"]],
    "identities": {"*": "e"},
    "composition": [["e","e","e"], ["e","g","g"], ["g","e","g"], ["g","g","e"]]
  })");
  const auto c = category_from_json(j);
  CHECK(c->arrow_count() == 2);
  CHECK(c->weight(c->arrow_index("g")) == 1.0);
  CHECK(validate_category(*c).ok());
}

TEST_CASE("malformed category documents") {
  CHECK(kind_of([] { category_spec_from_json(Json::parse(R"({"objects": ["*"]})")); }) == ErrorKind::malformed_input);
  CHECK(kind_of([] {
          category_spec_from_json(Json::parse(
              R"({"objects": ["*"], "arrows": [], "identities": {}, "composition": [["e", "e"]]})"));
        }) == ErrorKind::malformed_input);
  CHECK(kind_of([] { category_spec_from_json(Json::parse(R"({"objects": 3, "arrows": [], "identities": {}, "composition": []})")); }) ==
        ErrorKind::malformed_input);
}

TEST_CASE("functor and section documents round trip") {
  const auto g = FiniteGroup::symmetric(3);
  const auto s = build_group_category(g, GroupAction::natural(g, 3), regular_rep(g), sign_rep(g));
  const auto x = functor_from_json(reparse(functor_to_json(*s.x)), s.category);
  CHECK(*x == *s.x);
  CHECK(validate_functor(*s.category, *x).ok());

  const auto sec = random_sections(x, 1, 3).front();
  const auto back = section_from_json(reparse(section_to_json(sec)), x);
  CHECK(back == sec);
}

TEST_CASE("functor defaults for one-point bases") {
  const auto c = fx::make(fx::c2_spec());
  const auto f = functor_from_json(Json::parse(R"({"fiber_dim": {"*": 1}, "L": {"g": [[-1]]}})"), c);
  CHECK(f->base_size(star) == 1);
  CHECK(f->transport(c->arrow_index("e"))(0, 0) == 1.0);
  CHECK(f->transport(c->arrow_index("g"))(0, 0) == -1.0);
  CHECK(validate_functor(*c, *f).ok());
}

TEST_CASE("malformed functor and section documents") {
  const auto c = fx::make(fx::c2_spec());
  CHECK(kind_of([&] { functor_from_json(Json::parse(R"({"fiber_dim": {"*": 1}, "L": {"h": [[1]]}})"), c); }) ==
        ErrorKind::unknown_arrow);
  CHECK(kind_of([&] { functor_from_json(Json::parse(R"({"fiber_dim": {"*": 2}, "L": {"g": [[1]]}})"), c); }) ==
        ErrorKind::shape_mismatch);
  CHECK(kind_of([&] { functor_from_json(Json::parse(R"({"L": {}})"), c); }) == ErrorKind::malformed_input);
  CHECK(kind_of([&] {
          functor_from_json(Json::parse(R"({"base": {"*": ["p", "q"]}, "fiber_dim": {"*": 1}})"), c);
        }) == ErrorKind::malformed_input);

  const auto f = fx::c2_sign_sign().x;
  CHECK(kind_of([&] { section_from_json(Json::parse(R"({"*": [[1, 2]]})"), f); }) == ErrorKind::shape_mismatch);
  CHECK(kind_of([&] { section_from_json(Json::parse(R"({"nowhere": [[1]]})"), f); }) == ErrorKind::unknown_object);
  CHECK(kind_of([&] { section_from_json(Json::parse(R"({"*": [["a"]]})"), f); }) == ErrorKind::malformed_input);
}

TEST_CASE("kernel documents use arrow@point keys and keep bias and probe") {
  const auto g = fx::c2();
  const auto s = build_group_category(g, GroupAction::swap(g), regular_rep(g), regular_rep(g));
  auto basis = solve_parameter_space(assemble_in_constraints(s.x, s.y, Regime::IN));
  REQUIRE_FALSE(basis.kernels.empty());
  auto k = basis.kernels.front();
  const auto biases = solve_natural_bias(*s.y);
  REQUIRE_FALSE(biases.empty());
  k.set_bias(biases.front());
  k.set_probe(ProbeFamily::from_tau(*s.x));

  const Json j = reparse(kernel_to_json(k));
  CHECK(j.at("regime") == "IN");
  CHECK(j.at("entries").size() == 2 * s.y->base_size(star));
  CHECK(j.at("entries").contains("g@" + s.y->base(star)[0]));

  const auto back = kernel_from_json(j, s.x, s.y);
  CHECK(back.coefficients() == k.coefficients());
  CHECK(back.bias()[star] == k.bias()[star]);
  CHECK(back.probe() == k.probe());
  CHECK(back.regime() == Regime::IN);

  CHECK(kind_of([&] { kernel_from_json(Json::parse(R"({"entries": {"g": [[1]]}})"), s.x, s.y); }) ==
        ErrorKind::malformed_input);
  CHECK(kind_of([&] { kernel_from_json(Json::parse(R"({"regime": "bogus"})"), s.x, s.y); }) ==
        ErrorKind::malformed_input);
}

TEST_CASE("basis bundle and provenance sidecar") {
  const auto s = fx::c2_setting(trivial_rep(fx::c2()), sign_rep(fx::c2()));
  const auto sys = assemble_in_constraints(s.x, s.y, Regime::IN);
  const auto basis = solve_parameter_space(sys);
  const Json j = reparse(basis_to_json(basis, Regime::IN, solve_natural_bias(*s.y), solve_scalar_channels(*s.y),
                                       *s.category));
  CHECK(j.at("kernel_count") == 1);
  const auto ks = basis_kernels_from_json(j, s.x, s.y);
  REQUIRE(ks.size() == 1);
  CHECK((ks[0].coefficients() - basis.kernels[0].coefficients()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(j.at("biases").empty());  // no natural bias into the sign representation

  const Json p = provenance_to_json(sys);
  CHECK(p.at("rows") == sys.row_count());
  CHECK(p.at("unknowns") == sys.unknown_count());
  CHECK(p.at("kind") == "IN");
}

TEST_CASE("compiled networks round trip and evaluate identically") {
  auto s = fx::c2_sign_sign();
  auto r = build_retraction(s.y);
  const auto net = sample_equivariant_target(r, s.x, 4, TargetFamily::affine_tanh);
  const Json j = reparse(network_to_json(net));
  const auto back = network_from_json(j, s.category);
  CHECK(network_to_json(back) == j);
  for (const auto& x : random_sections(s.x, 10, 2)) CHECK(network_forward(back, x) == network_forward(net, x));
}

TEST_CASE("fitted networks with fragments round trip") {
  auto chain = chain_poset(3);
  auto x = constant_functor(chain, fx::dims(*chain, 2));
  auto gt = build_graded_target(chain, fx::dims(*chain, 1));
  UatProblem p{gt.retraction, x, ProbeFamily::identity(*x),
               sample_equivariant_target(gt.retraction, x, 0, TargetFamily::affine_tanh), random_sections(x, 8, 1)};
  const auto res = fit_cenn(p, {{2, 4}}, FitBudget{20}, 1, 5);
  const auto& net = res.best_network();
  const auto back = network_from_json(reparse(network_to_json(net)), chain);
  for (const auto& s : random_sections(x, 5, 8)) CHECK(network_forward(back, s) == network_forward(net, s));
}

TEST_CASE("networks read functors and kernels from files") {
  const auto dir = std::filesystem::temp_directory_path() / "cenn_io_test";
  std::filesystem::create_directories(dir);
  auto s = fx::c2_sign_sign();
  write_json_file(dir / "x.json", functor_to_json(*s.x));
  const auto k = fx::scalar_kernel(s.x, s.y, {{"e", 0.5}, {"g", -0.25}}, Regime::IN);
  write_json_file(dir / "k.json", kernel_to_json(k));
  const Json doc{{"functors", {{"X", "x.json"}}},
                 {"input", "X"},
                 {"layers", {{{"type", "conv"}, {"source", "X"}, {"target", "X"}, {"kernel", "k.json"}}}}};
  const auto net = network_from_json(doc, s.category, dir);
  const Matrix y = network_forward(net, star, fx::scalar(2.0));
  CHECK(y(0, 0) == doctest::Approx(0.5 * 2.0 + (-0.25) * (-2.0)));

  CHECK(kind_of([&] { read_json_file(dir / "missing.json"); }) == ErrorKind::malformed_input);
  write_text_file(dir / "bad.json", "{not json");
  CHECK(kind_of([&] { read_json_file(dir / "bad.json"); }) == ErrorKind::malformed_input);
  std::filesystem::remove_all(dir);
}

TEST_CASE("network documents are type checked") {
  auto s = fx::c2_sign_sign();
  auto two = share(FeatureFunctor::scalar(*s.x, 2));
  Json doc = network_to_json(NetworkSpec{s.x, {LiftLayer{s.x}}});
  doc["functors"]["f1"] = functor_to_json(*two);
  doc["input"] = "f1";
  CHECK(kind_of([&] { network_from_json(doc, s.category); }) == ErrorKind::type_mismatch);
  doc["layers"][0]["type"] = "mystery";
  CHECK(kind_of([&] { network_from_json(doc, s.category); }) == ErrorKind::malformed_input);
}

TEST_CASE("objectwise map documents") {
  auto s = fx::c2_sign_sign();
  auto m = random_objectwise_map(s.x, s.y, TargetFamily::affine_tanh, 3);
  m.stages[star]->push_back(ClipStage{0.5});
  const auto back = objectwise_map_from_json(reparse(objectwise_map_to_json(m)), s.x, s.y);
  const Matrix f = fx::scalar(0.3);
  CHECK(back.apply(star, f) == m.apply(star, f));
}

TEST_CASE("complex documents round trip") {
  const auto k = CWComplex::polygon(4);
  const auto back = complex_from_json(reparse(complex_to_json(k)));
  CHECK(back.size() == k.size());
  CHECK(back.covers() == k.covers());
  CHECK(kind_of([] { complex_from_json(Json::parse(R"({"cells": [{"id": "v", "dim": 0}], "faces": [["v", "w"]]})")); }) ==
        ErrorKind::invalid_complex);
}

TEST_CASE("experiment configuration") {
  const auto j = Json::parse(R"({
    "name": "chain", "category": "cat.json", "x": "x.json", "graded_dims": {"0": 1, "1": 1},
    "grid": [[1, 0], [2, 4]], "seeds": [3, 4], "budget": {"iterations": 50}, "family": "affine"
  })");
  const auto e = experiment_config_from_json(j);
  CHECK(e.grid.size() == 2);
  CHECK(e.grid[1] == UatArchitecture{2, 4});
  CHECK(e.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(e.budget.iterations == 50);
  CHECK(e.family == TargetFamily::affine);
  CHECK(experiment_config_from_json(experiment_config_to_json(e)).grid == e.grid);

  Json both = j;
  both["y"] = "y.json";
  CHECK(kind_of([&] { experiment_config_from_json(both); }) == ErrorKind::malformed_input);
}

TEST_CASE("experiment results round trip for reports") {
  UatExperiment e{"demo", 2, 16, {}};
  e.result.curve.push_back({{1, 0}, 0.5, 0.5, 0.0, 0.1, 0, true, "converged", 0.01});
  e.result.curve.push_back({{1, 4}, 0.25, 0.25, 0.0, 0.01, 12, true, "tolerance", 0.02});
  const auto back = uat_experiment_from_json(reparse(uat_experiment_to_json(e)));
  CHECK(uat_report({back}).csv == uat_report({e}).csv);
}
