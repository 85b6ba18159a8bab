#include "cli.hpp"

#include <CLI11.hpp>
#include <cenn/io.hpp>

#include <chrono>
#include <future>

namespace cenn::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_input(const std::string& message, Json witness = nullptr) {
  throw Error(ErrorKind::malformed_input, "cli", message, std::move(witness));
}

struct Context {
  std::string command;
  std::vector<std::string> inputs;
  Json config = Json::object();
  std::vector<std::string> outputs;
  Json result = Json::object();
  int status = 0;
};

CategoryPtr load_category(Context& ctx, const std::string& path) {
  ctx.inputs.push_back(path);
  return category_from_json(read_json_file(path));
}

FunctorPtr load_functor(Context& ctx, const std::string& path, const CategoryPtr& cat) {
  ctx.inputs.push_back(path);
  return functor_from_json(read_json_file(path), cat);
}

NetworkSpec load_network(Context& ctx, const std::string& path, const CategoryPtr& cat) {
  ctx.inputs.push_back(path);
  return network_from_json(read_json_file(path), cat, fs::path(path).parent_path());
}

void emit(Context& ctx, const fs::path& path, const Json& doc) {
  write_json_file(path, doc);
  ctx.outputs.push_back(path.string());
}

void emit_text(Context& ctx, const fs::path& path, std::string_view text) {
  write_text_file(path, text);
  ctx.outputs.push_back(path.string());
}

ProbeFamily probe_by_name(const std::string& name, const FeatureFunctor& f) {
  if (name == "tau") return ProbeFamily::from_tau(f);
  if (name == "identity") return ProbeFamily::identity(f);
  return probe_from_json(read_json_file(name), f);
}

// ---- build specs ----

FiniteGroup group_from_json(const Json& j) {
  if (j.contains("cyclic")) return FiniteGroup::cyclic(j.at("cyclic").get<std::size_t>());
  if (j.contains("symmetric")) return FiniteGroup::symmetric(j.at("symmetric").get<std::size_t>());
  if (j.contains("table"))
    return FiniteGroup(j.at("names").get<std::vector<std::string>>(), j.at("table").get<std::vector<std::vector<std::size_t>>>());
  bad_input("group spec needs 'cyclic', 'symmetric' or 'names' + 'table'", j);
}

GroupAction action_from_json(const Json& j, const FiniteGroup& g) {
  GroupAction a;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "trivial") a = GroupAction::trivial(g);
    else if (s == "regular") a = GroupAction::regular(g);
    else if (s == "swap") a = GroupAction::swap(g);
    else bad_input("unknown action '" + s + "'", s);
  } else if (j.contains("natural")) {
    a = GroupAction::natural(g, j.at("natural").get<std::size_t>());
  } else if (j.contains("trivial")) {
    a = GroupAction::trivial(g, j.at("trivial").get<std::vector<std::string>>());
  } else {
    a = GroupAction{j.at("points").get<std::vector<std::string>>(), j.at("act").get<std::vector<std::vector<std::size_t>>>()};
  }
  a.validate(g);
  return a;
}

Representation rep_from_json(const Json& j, const FiniteGroup& g) {
  Representation r;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "trivial") r = trivial_rep(g);
    else if (s == "sign") r = sign_rep(g);
    else if (s == "regular") r = regular_rep(g);
    else bad_input("unknown representation '" + s + "'", s);
  } else if (j.contains("trivial")) {
    r = trivial_rep(g, j.at("trivial").get<std::size_t>());
  } else if (j.contains("sum")) {
    r = rep_from_json(j.at("sum").at(0), g);
    for (std::size_t i = 1; i < j.at("sum").size(); ++i) r = direct_sum(r, rep_from_json(j.at("sum").at(i), g));
  } else if (j.contains("matrices")) {
    for (const auto& m : j.at("matrices")) r.push_back(matrix_from_json(m, -1, -1, "representation"));
  } else {
    bad_input("representation spec needs 'trivial', 'sign', 'regular', 'sum' or 'matrices'", j);
  }
  validate_representation(g, r);
  return r;
}

ObjectMap<std::size_t> dims_from_json(const Json& j, const FiniteCategory& c) {
  ObjectMap<std::size_t> d(c.object_count(), 0);
  if (j.is_number_integer()) {
    for (auto a : c.objects()) d[a] = j.get<std::size_t>();
    return d;
  }
  for (const auto& [name, v] : j.items()) d[c.object(name)] = v.get<std::size_t>();
  return d;
}

CWComplex complex_spec(const Json& j) {
  if (j.contains("complex")) return complex_from_json(j.at("complex"));
  if (j.contains("path_graph")) return CWComplex::path_graph(j.at("path_graph").get<std::size_t>());
  if (j.contains("cycle_graph")) return CWComplex::cycle_graph(j.at("cycle_graph").get<std::size_t>());
  if (j.contains("polygon")) return CWComplex::polygon(j.at("polygon").get<std::size_t>());
  bad_input("complex spec needs 'complex', 'path_graph', 'cycle_graph' or 'polygon'", j);
}

struct Built {
  CategoryPtr category;
  FunctorPtr x;
  FunctorPtr y;
  std::optional<CWComplex> complex;
};

Built build_from_spec(const Json& j) {
  const auto kind = j.value("kind", std::string());
  Built b;
  if (kind == "group" || kind == "action_groupoid") {
    const auto g = group_from_json(j.at("group"));
    const auto act = action_from_json(j.value("action", Json("trivial")), g);
    const auto rx = rep_from_json(j.value("x", Json("trivial")), g);
    const auto ry = rep_from_json(j.value("y", Json("trivial")), g);
    if (kind == "group") {
      const auto s = build_group_category(g, act, rx, ry);
      b = {s.category, s.x, s.y, std::nullopt};
    } else {
      const auto ag = build_action_groupoid(g, act);
      b = {ag.category, action_groupoid_functor(ag, g, rx), action_groupoid_functor(ag, g, ry), std::nullopt};
    }
  } else if (kind == "poset" || kind == "face_category") {
    if (kind == "poset") {
      if (j.contains("chain")) b.category = chain_poset(j.at("chain").get<std::size_t>());
      else if (j.value("diamond", false)) b.category = diamond_lattice();
      else
        b.category = build_poset_category(j.at("elements").get<std::vector<std::string>>(),
                                          j.at("relation").get<std::vector<std::pair<std::string, std::string>>>());
    } else {
      b.complex = complex_spec(j);
      b.category = build_face_category(*b.complex, j.value("bottom", false));
    }
    b.x = constant_functor(b.category, dims_from_json(j.value("x_dims", Json(1)), *b.category));
    b.y = build_graded_target(b.category, dims_from_json(j.value("graded_dims", Json(1)), *b.category)).functor;
  } else if (kind == "neighbourhood") {
    b.complex = complex_spec(j);
    const auto ng = build_neighbourhood_groupoid(*b.complex, j.value("radius", std::size_t{1}));
    const auto f = build_neighbourhood_functors(ng, j.value("d_x", std::size_t{1}), j.value("d_y", std::size_t{1}));
    b = {ng.category, f.x, f.y, b.complex};
  } else {
    bad_input("build kind must be group, action_groupoid, poset, face_category or neighbourhood", kind);
  }
  return b;
}

// ---- subcommands ----

void cmd_validate(Context& ctx, const std::string& cat_path, const std::vector<std::string>& functors,
                  const std::string& measure) {
  auto cat = load_category(ctx, cat_path);
  const auto rc = validate_category(*cat);
  bool ok = rc.ok();
  ctx.result["category"] = rc.to_json();
  if (!measure.empty()) {
    const auto rm = check_measure_properties(*cat, measure_mode_from_string(measure));
    ok = ok && rm.ok();
    ctx.result["measure"] = rm.to_json();
    ctx.config["measure"] = measure;
  }
  Json fr = Json::object();
  for (const auto& p : functors) {
    const auto r = validate_functor(*cat, *load_functor(ctx, p, cat));
    ok = ok && r.ok();
    fr[p] = r.to_json();
  }
  if (!functors.empty()) ctx.result["functors"] = fr;
  ctx.result["valid"] = ok;
  ctx.status = ok ? 0 : 1;
}

void cmd_solve(Context& ctx, const std::string& regime_name, const std::string& cat_path, const std::string& x_path,
               const std::string& y_path, double tol, const std::string& support, const std::string& probe,
               const std::string& out) {
  auto cat = load_category(ctx, cat_path);
  auto x = load_functor(ctx, x_path, cat);
  auto y = load_functor(ctx, y_path, cat);
  const auto regime = regime_from_string(regime_name);
  if (support != "all" && support != "identity") bad_input("support must be 'all' or 'identity'", support);
  const auto sup = support == "all" ? KernelSupport::all_arrows : KernelSupport::identity_only;
  std::optional<ProbeFamily> sigma;
  if (regime == Regime::IN_probe) sigma = probe_by_name(probe.empty() ? "tau" : probe, *x);

  ConstraintSystem sys = [&] {
    switch (regime) {
      case Regime::IN:
      case Regime::IN_bundle:
      case Regime::IN_probe: return assemble_in_constraints(x, y, regime, sigma, sup);
      case Regime::pointwise_steerable: return assemble_steerability_constraints(x, y);
      case Regime::unconstrained: break;
    }
    bad_input("the unconstrained regime has no constraint system", regime_name);
  }();
  const auto basis = solve_parameter_space(sys, tol);
  const auto biases = solve_natural_bias(*y, tol);
  const auto channels = solve_scalar_channels(*y, tol);

  const fs::path out_path = out;
  fs::path sidecar = out_path;
  sidecar.replace_extension(".provenance.json");
  emit(ctx, out_path, basis_to_json(basis, regime, biases, channels, *cat));
  emit(ctx, sidecar, provenance_to_json(sys));
  ctx.config.update({{"regime", regime_name}, {"tol", tol}, {"support", support}});
  if (sigma) ctx.config["probe"] = probe.empty() ? "tau" : probe;
  ctx.result = {{"kernel_count", basis.kernels.size()}, {"rank", basis.rank},
                {"rows", sys.row_count()},               {"unknowns", sys.unknown_count()},
                {"bias_count", biases.size()},           {"channel_count", channels.size()}};
}

void cmd_forward(Context& ctx, const std::string& net_path, const std::string& cat_path, const std::string& in_path,
                 const std::string& out) {
  auto cat = load_category(ctx, cat_path);
  auto net = load_network(ctx, net_path, cat);
  ctx.inputs.push_back(in_path);
  const auto x = section_from_json(read_json_file(in_path), net.input);
  const auto y = network_forward(net, x);
  emit(ctx, out, section_to_json(y));
  ctx.result = {{"layers", net.layers.size()}};
}

void cmd_check_eqv(Context& ctx, const std::string& net_path, const std::string& cat_path, std::size_t samples,
                   double tol, std::uint64_t seed) {
  auto cat = load_category(ctx, cat_path);
  auto net = load_network(ctx, net_path, cat);
  const auto rep = check_equivariance(net, random_sections(net.input, samples, seed), tol);
  ctx.config.update({{"samples", samples}, {"tol", tol}, {"seed", seed}});
  ctx.result = rep.to_json(*cat);
  ctx.result["ok"] = rep.ok();
  ctx.status = rep.ok() ? 0 : 1;
}

void cmd_compile(Context& ctx, const std::string& cat_path, const std::string& x_path, const std::string& y_path,
                 const std::string& g_path, std::optional<std::uint64_t> random_seed, const std::string& family,
                 const std::string& out) {
  auto cat = load_category(ctx, cat_path);
  auto x = load_functor(ctx, x_path, cat);
  auto y = load_functor(ctx, y_path, cat);
  const auto r = build_retraction(y);
  ObjectwiseMap g;
  if (!g_path.empty() == random_seed.has_value()) bad_input("compile needs exactly one of a map file and --random");
  if (random_seed) {
    g = random_objectwise_map(x, r.functor(), target_family_from_string(family), *random_seed, 1.5);
    ctx.config.update({{"random", *random_seed}, {"family", family}});
  } else {
    ctx.inputs.push_back(g_path);
    g = objectwise_map_from_json(read_json_file(g_path), x, r.functor(), fs::path(g_path).parent_path());
  }
  const auto net = compile_equivariant(r, g, x);
  emit(ctx, out, network_to_json(net));
  ctx.result = {{"retraction", to_string(r.flavor)}, {"layers", net.layers.size()}};
}

void cmd_build(Context& ctx, const std::string& spec_path, const std::string& out_dir) {
  ctx.inputs.push_back(spec_path);
  const auto spec = read_json_file(spec_path);
  const auto b = [&] {
    try {
      return build_from_spec(spec);
    } catch (const Json::exception& e) {
      bad_input(std::string("build spec: ") + e.what());
    }
  }();
  const fs::path dir = out_dir;
  emit(ctx, dir / "category.json", category_to_json(*b.category));
  emit(ctx, dir / "x.json", functor_to_json(*b.x));
  emit(ctx, dir / "y.json", functor_to_json(*b.y));
  if (b.complex) emit(ctx, dir / "complex.json", complex_to_json(*b.complex));
  ctx.config["kind"] = spec.value("kind", std::string());
  ctx.result = {{"objects", b.category->object_count()}, {"arrows", b.category->arrow_count()},
                {"valid", validate_category(*b.category).ok()}};
}

void cmd_fit(Context& ctx, const std::string& config_path, const std::string& out_dir) {
  ctx.inputs.push_back(config_path);
  const auto cfg = experiment_config_from_json(read_json_file(config_path));
  const fs::path base = fs::path(config_path).parent_path();
  auto cat = load_category(ctx, (base / cfg.category).string());
  auto x = load_functor(ctx, (base / cfg.x).string(), cat);
  Retraction r = [&] {
    if (!cfg.y.empty()) return build_retraction(load_functor(ctx, (base / cfg.y).string(), cat));
    ObjectMap<std::size_t> dims(cat->object_count(), 0);
    for (const auto& [name, d] : cfg.graded_dims) dims[cat->object(name)] = d;
    return build_graded_target(cat, dims).retraction;
  }();
  const auto sigma = cfg.probe == "tau" ? ProbeFamily::from_tau(*x) : ProbeFamily::identity(*x);
  const UatProblem problem{r, x, sigma, sample_equivariant_target(r, x, cfg.target_seed, cfg.family),
                           random_sections(x, cfg.samples, cfg.sample_seed), cfg.activation};

  // Seeds are independent fits; each is single-threaded and deterministic.
  std::vector<std::future<FitResult>> jobs;
  for (auto seed : cfg.seeds)
    jobs.push_back(std::async(std::launch::async, [&, seed] {
      return fit_cenn(problem, cfg.grid, cfg.budget, seed, cfg.eqv_samples);
    }));
  std::vector<UatExperiment> experiments;
  for (std::size_t i = 0; i < jobs.size(); ++i)
    experiments.push_back({cfg.name + "/seed" + std::to_string(cfg.seeds[i]), cfg.seeds[i], cfg.samples, jobs[i].get()});

  const fs::path dir = out_dir;
  const auto report = uat_report(experiments);
  emit_text(ctx, dir / "uat.csv", report.csv);
  emit_text(ctx, dir / "report.md", report.markdown);
  Json results = Json::array();
  for (const auto& e : experiments) {
    results.push_back(uat_experiment_to_json(e));
    emit(ctx, dir / ("network_seed" + std::to_string(e.seed) + ".json"), network_to_json(e.result.best_network()));
  }
  emit(ctx, dir / "results.json", results);
  ctx.config = experiment_config_to_json(cfg);
  Json summary = Json::array();
  for (const auto& e : experiments) {
    const auto& last = e.result.curve.back();
    summary.push_back({{"experiment", e.name}, {"best_error", last.best_error}, {"best", e.result.best}});
  }
  ctx.result = {{"experiments", summary}};
}

void cmd_report(Context& ctx, const std::vector<std::string>& inputs, const std::string& out, const std::string& csv) {
  std::vector<UatExperiment> experiments;
  for (const auto& p : inputs) {
    ctx.inputs.push_back(p);
    const auto j = read_json_file(p);
    if (j.is_array())
      for (const auto& e : j) experiments.push_back(uat_experiment_from_json(e));
    else
      experiments.push_back(uat_experiment_from_json(j));
  }
  const auto rep = uat_report(experiments);
  emit_text(ctx, out, rep.markdown);
  if (!csv.empty()) emit_text(ctx, csv, rep.csv);
  ctx.result = {{"experiments", experiments.size()}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"Category-equivariant network engine", "cenn"};
  app.require_subcommand(1);
  Context ctx;

  std::string cat, x, y, net, in, output, regime, support = "all", probe, g, family = "affine_tanh", csv, measure;
  std::vector<std::string> files;
  double tol = 1e-9, rank_tol = 1e-10;
  std::size_t samples = 100;
  std::uint64_t seed = 0, random_seed = 0;

  auto* validate = app.add_subcommand("validate", "Check category axioms and functor laws");
  validate->add_option("category", cat, "category document")->required();
  validate->add_option("functors", files, "functor documents to check against the category");
  validate->add_option("--measure", measure, "also check measure properties: nsp, left_coherent, bi_coherent");

  auto* solve = app.add_subcommand("solve", "Solve admissible kernels, biases and channels");
  solve->add_option("--regime", regime, "IN, IN_bundle, IN_probe or pointwise_steerable")->required();
  solve->add_option("category", cat)->required();
  solve->add_option("source", x)->required();
  solve->add_option("target", y)->required();
  solve->add_option("--tol", rank_tol, "relative rank cutoff");
  solve->add_option("--support", support, "all or identity");
  solve->add_option("--probe", probe, "tau, identity or a probe document (IN_probe)");
  solve->add_option("-o,--output", output, "basis file; a .provenance.json sidecar is written next to it")
      ->default_val("basis.json");

  auto* forward = app.add_subcommand("forward", "Run a network on a section");
  forward->add_option("network", net)->required();
  forward->add_option("category", cat)->required();
  forward->add_option("section", in)->required();
  forward->add_option("-o,--output", output)->default_val("output.json");

  auto* eqv = app.add_subcommand("check-eqv", "Fuzz a network for naturality");
  eqv->add_option("network", net)->required();
  eqv->add_option("category", cat)->required();
  eqv->add_option("--samples", samples);
  eqv->add_option("--tol", tol);
  eqv->add_option("--seed", seed);

  auto* compile = app.add_subcommand("compile", "Compile an objectwise map into an equivariant network");
  compile->add_option("category", cat)->required();
  compile->add_option("source", x)->required();
  compile->add_option("target", y)->required();
  compile->add_option("map", g, "objectwise map document");
  auto* random_opt = compile->add_option("--random", random_seed, "compile a seeded random map instead");
  compile->add_option("--family", family, "affine or affine_tanh (with --random)");
  compile->add_option("-o,--output", output)->default_val("network.json");

  auto* build = app.add_subcommand("build", "Build category and functor documents from a spec");
  build->add_option("spec", in)->required();
  build->add_option("-o,--output", output, "output directory")->default_val(".");

  auto* fit = app.add_subcommand("fit", "Fit equivariant networks over a capacity grid");
  fit->add_option("config", in)->required();
  fit->add_option("-o,--output", output, "run directory")->default_val("run");

  auto* report = app.add_subcommand("report", "Render fit results as Markdown");
  report->add_option("results", files)->required();
  report->add_option("-o,--output", output)->default_val("report.md");
  report->add_option("--csv", csv, "also write the CSV table");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << Json{{"error", {{"kind", "malformed_input"}, {"module", "cli"}, {"message", e.what()}, {"witness", nullptr}}}}.dump()
        << "\n";
    return 2;
  }

  try {
    if (validate->parsed()) {
      ctx.command = "validate";
      cmd_validate(ctx, cat, files, measure);
    } else if (solve->parsed()) {
      ctx.command = "solve";
      cmd_solve(ctx, regime, cat, x, y, rank_tol, support, probe, output);
    } else if (forward->parsed()) {
      ctx.command = "forward";
      cmd_forward(ctx, net, cat, in, output);
    } else if (eqv->parsed()) {
      ctx.command = "check-eqv";
      cmd_check_eqv(ctx, net, cat, samples, tol, seed);
    } else if (compile->parsed()) {
      ctx.command = "compile";
      cmd_compile(ctx, cat, x, y, g, random_opt->count() ? std::optional(random_seed) : std::nullopt, family, output);
    } else if (build->parsed()) {
      ctx.command = "build";
      cmd_build(ctx, in, output);
    } else if (fit->parsed()) {
      ctx.command = "fit";
      cmd_fit(ctx, in, output);
    } else if (report->parsed()) {
      ctx.command = "report";
      cmd_report(ctx, files, output, csv);
    }
  } catch (const Error& e) {
    err << e.to_json().dump() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    err << Error(ErrorKind::malformed_input, "cli", e.what()).to_json().dump() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << Error(ErrorKind::malformed_input, "cli", e.what(), e.path1().string()).to_json().dump() << "\n";
    return 2;
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const Json manifest{{"command", ctx.command},   {"inputs", ctx.inputs},        {"config", ctx.config},
                      {"outputs", ctx.outputs},   {"wall_clock_seconds", secs}, {"engine_version", engine_version}};
  if (ctx.command == "fit" || ctx.command == "build") {
    Json stored = manifest;
    stored.erase("wall_clock_seconds");  // keep the stored manifest byte-stable across reruns
    write_json_file(fs::path(output) / "manifest.json", stored);
  }
  out << Json{{"manifest", manifest}, {"result", ctx.result}}.dump(2) << "\n";
  return ctx.status;
}

}  // namespace cenn::cli
