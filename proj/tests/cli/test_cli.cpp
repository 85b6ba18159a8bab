#include <doctest.h>

#include <cenn/io.hpp>

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cenn;
namespace fs = std::filesystem;

namespace {

const fs::path samples = CENN_SAMPLES_DIR;

struct Run {
  int code;
  Json out;
  Json err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  Run r{code, nullptr, nullptr};
  if (!out.str().empty() && out.str().front() == '{') r.out = Json::parse(out.str());
  if (!err.str().empty()) r.err = Json::parse(err.str());
  return r;
}

std::string sample(const std::string& rel) { return (samples / rel).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("validate accepts C2 and reports broken identities") {
  auto ok = run({"validate", sample("c2/category.json"), sample("c2/sign.json")});
  CHECK(ok.code == 0);
  CHECK(ok.out.at("result").at("valid") == true);
  CHECK(ok.out.at("manifest").at("command") == "validate");
  CHECK(ok.out.at("manifest").at("engine_version") == cli::engine_version);

  auto bad = run({"validate", sample("c2/broken.json")});
  CHECK(bad.code == 1);
  CHECK(bad.out.at("result").at("category").at("valid") == false);
}

TEST_CASE("solve on C2 trivial to sign writes one kernel and a provenance sidecar") {
  TempDir t("cenn_cli_solve");
  auto r = run({"solve", "--regime", "IN", sample("c2/category.json"), sample("c2/trivial.json"), sample("c2/sign.json"),
                "-o", t / "basis.json"});
  REQUIRE(r.code == 0);
  CHECK(r.out.at("result").at("kernel_count") == 1);
  const auto basis = read_json_file(t / "basis.json");
  CHECK(basis.at("kernels").size() == 1);
  const auto prov = read_json_file(t / "basis.provenance.json");
  CHECK(prov.at("kind") == "IN");
  CHECK(prov.at("unknowns") == 2);
}

TEST_CASE("compile, check-eqv and forward on C2 sign") {
  TempDir t("cenn_cli_compile");
  auto c = run({"compile", sample("c2/category.json"), sample("c2/sign.json"), sample("c2/sign.json"),
                sample("c2/map.json"), "-o", t / "net.json"});
  REQUIRE(c.code == 0);
  CHECK(c.out.at("result").at("retraction") == "haar_groupoid");

  auto e = run({"check-eqv", t / "net.json", sample("c2/category.json"), "--samples", "100", "--tol", "1e-9"});
  CHECK(e.code == 0);
  CHECK(e.out.at("result").at("max_residual").get<double>() <= 1e-9);
  CHECK(e.out.at("result").at("per_arrow").size() == 2);

  auto f = run({"forward", t / "net.json", sample("c2/category.json"), sample("c2/section.json"), "-o", t / "y.json"});
  REQUIRE(f.code == 0);
  // Haar average of tanh(1.5 x + 0.25) against its sign-flipped copy at x = 0.75.
  const double expected = 0.5 * (std::tanh(1.5 * 0.75 + 0.25) - std::tanh(-1.5 * 0.75 + 0.25));
  CHECK(read_json_file(t / "y.json").at("*").at(0).at(0).get<double>() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("check-eqv fails on a non-equivariant network") {
  TempDir t("cenn_cli_noneqv");
  const auto cat = category_from_json(read_json_file(sample("c2/category.json")));
  const auto sign = functor_from_json(read_json_file(sample("c2/sign.json")), cat);
  const auto triv = functor_from_json(read_json_file(sample("c2/trivial.json")), cat);
  CategoryKernel k(sign, triv, Regime::unconstrained);
  k.set_entry(cat->arrow_index("e"), 0, Matrix::Constant(1, 1, 1.0));
  write_json_file(t / "net.json", network_to_json(NetworkSpec{sign, {ConvLayer{k}}}));
  auto e = run({"check-eqv", t / "net.json", sample("c2/category.json")});
  CHECK(e.code == 1);
  CHECK(e.out.at("result").at("ok") == false);
}

TEST_CASE("build emits documents that validate") {
  TempDir t("cenn_cli_build");
  for (const auto* spec : {"c2_swap_groupoid", "s3_natural", "diamond", "chain3", "path_faces", "triangle_neighbourhood"}) {
    CAPTURE(spec);
    const auto dir = t / spec;
    auto b = run({"build", sample(std::string("specs/") + spec + ".json"), "-o", dir});
    REQUIRE(b.code == 0);
    auto v = run({"validate", dir + "/category.json", dir + "/x.json", dir + "/y.json"});
    CHECK(v.code == 0);
    CHECK(fs::exists(dir + "/manifest.json"));
  }
}

TEST_CASE("fit and report are deterministic") {
  TempDir t("cenn_cli_fit");
  const Json cfg{{"name", "c2"},
                 {"category", sample("c2/category.json")},
                 {"x", sample("c2/sign.json")},
                 {"y", sample("c2/sign.json")},
                 {"grid", {{1, 0}, {1, 4}}},
                 {"seeds", {1, 2}},
                 {"samples", 16},
                 {"eqv_samples", 10}};
  write_json_file(t / "cfg.json", cfg);
  auto a = run({"fit", t / "cfg.json", "-o", t / "a"});
  auto b = run({"fit", t / "cfg.json", "-o", t / "b"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(slurp(t / "a/uat.csv") == slurp(t / "b/uat.csv"));
  CHECK(slurp(t / "a/network_seed1.json") == slurp(t / "b/network_seed1.json"));
  CHECK(a.out.at("result").at("experiments").size() == 2);

  auto r = run({"report", t / "a/results.json", "-o", t / "r.md", "--csv", t / "r.csv"});
  CHECK(r.code == 0);
  CHECK(slurp(t / "r.csv") == slurp(t / "a/uat.csv"));
  CHECK(slurp(t / "r.md").find("## c2/seed2") != std::string::npos);

  auto e = run({"check-eqv", t / "a/network_seed1.json", sample("c2/category.json")});
  CHECK(e.code == 0);
}

TEST_CASE("malformed input exits 2 with error JSON") {
  auto missing = run({"validate", sample("c2/none.json")});
  CHECK(missing.code == 2);
  CHECK(missing.err.at("error").at("kind") == "malformed_input");

  auto no_sub = run({});
  CHECK(no_sub.code == 2);

  auto bad_regime = run({"solve", "--regime", "XX", sample("c2/category.json"), sample("c2/trivial.json"),
                         sample("c2/sign.json"), "-o", (fs::temp_directory_path() / "cenn_unused.json").string()});
  CHECK(bad_regime.code == 2);
  CHECK(bad_regime.err.at("error").contains("module"));

  auto bad_arg = run({"check-eqv", "--samples", "many"});
  CHECK(bad_arg.code == 2);
}
