#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "support.hpp"

using namespace hydrolim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hydrolim_experiment_tests" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

ExperimentConfig small() {
  ExperimentConfig c;
  c.nx = c.ny = c.nz = 8;
  c.dt = 1e-3;
  c.T = 0.02;
  c.eps_list = {0.2, 0.1, 0.05};
  c.record_every = 5;
  return c;
}

json base_json() { return {{"version", 1}, {"grid", 8}, {"dt", 1e-3}, {"T", 0.02}, {"eps_list", {0.2, 0.1, 0.05}}}; }

}  // namespace

TEST_CASE("Experiment configuration", "[experiment]") {
  SECTION("round trip through JSON") {
    ExperimentConfig c = small();
    c.ic = IcKind::ill_prepared;
    c.scheme = Scheme::imex_euler;
    const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
  }
  SECTION("grid as a triple") {
    json j = base_json();
    j["grid"] = {8, 12, 16};
    const auto c = ExperimentConfig::from_json(j);
    CHECK(c.grid() == Grid(8, 12, 16));
  }
  SECTION("rejections") {
    auto rejects = [](json j) { CHECK_THROWS_AS(ExperimentConfig::from_json(j), InvalidInput); };
    json j = base_json();
    j["dtt"] = 1.0;
    rejects(j);
    j = base_json();
    j.erase("version");
    rejects(j);
    j = base_json();
    j["version"] = 2;
    rejects(j);
    j = base_json();
    j["eps_list"] = {0.1, 0.2, 0.05};
    rejects(j);
    j = base_json();
    j["eps_list"] = {1.5, 0.1};
    rejects(j);
    j = base_json();
    j["T"] = 0.0205;
    rejects(j);
    j = base_json();
    j["ic"] = {{"kind", "sloppy"}};
    rejects(j);
    j = base_json();
    j["ic"] = {{"amplitud", 1.0}};
    rejects(j);
    j = base_json();
    j["grid"] = 7;
    rejects(j);
    j = base_json();
    j["dt"] = "fast";
    rejects(j);
  }
  SECTION("missing file") { CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json"), InvalidInput); }
}

TEST_CASE("Degenerate experiments", "[experiment]") {
  SECTION("zero amplitude and zero horizon") {
    ExperimentConfig c = small();
    c.amplitude = 0.0;
    c.T = 0.0;
    const auto dir = scratch("degenerate");
    const RunSummary s = run_experiment(c, dir, 1);
    for (const auto& r : s.runs) {
      CHECK(r.completed);
      CHECK(r.records == 1);
      CHECK(r.sup("delta_sigma_v_l2") == 0.0);
      CHECK(r.sup("delta_w_l2") == 0.0);
    }
    for (const auto& r : s.rates) {
      CHECK_FALSE(r.fit);
      CHECK(!r.note.empty());
    }
  }
  SECTION("two eps values give aggregates but no rates") {
    ExperimentConfig c = small();
    c.eps_list = {0.2, 0.1};
    const RunSummary s = run_experiment(c, scratch("two"), 1);
    REQUIRE(s.runs.size() == 2);
    CHECK(s.runs[0].sup("E") > 0.0);
    for (const auto& r : s.rates) CHECK_FALSE(r.fit);
  }
}

TEST_CASE("Experiment outputs", "[experiment]") {
  const ExperimentConfig c = small();
  const auto a = scratch("a"), b = scratch("b");
  const RunSummary s = run_experiment(c, a, 2);
  run_experiment(c, b, 1);

  SECTION("one CSV per eps with the fixed header") {
    for (double eps : c.eps_list) {
      const auto p = a / csv_name(eps);
      REQUIRE(fs::exists(p));
      const std::string text = slurp(p);
      CHECK(text.rfind("time,E,D,E1,D1,delta_sigma_l2,delta_v_l2,delta_v_h1,delta_w_l2,dz_sigma_h2,dz_dt_sigma_l2,"
                       "avg_delta_sigma_l2,fluct_delta_sigma_l2\n",
                       0) == 0);
      CHECK(read_csv(p).size() == 5);
    }
    CHECK(fs::exists(a / "summary.json"));
  }
  SECTION("byte-identical CSV on repeated runs") {
    for (double eps : c.eps_list) CHECK(slurp(a / csv_name(eps)) == slurp(b / csv_name(eps)));
  }
  SECTION("rates recomputed from CSV match the summary") {
    const RunSummary r = rates_from_directory(a);
    REQUIRE(r.runs.size() == s.runs.size());
    for (std::size_t i = 0; i < r.runs.size(); ++i)
      for (const auto& [name, n] : s.runs[i].norms) {
        CHECK_THAT(r.runs[i].sup(name), WithinRel(n.sup, 1e-12) || WithinAbs(n.sup, 1e-300));
        CHECK_THAT(r.runs[i].l2(name), WithinRel(n.l2, 1e-12) || WithinAbs(n.l2, 1e-300));
      }
    REQUIRE(r.rates.size() == s.rates.size());
    for (std::size_t i = 0; i < r.rates.size(); ++i) {
      REQUIRE(bool(s.rates[i].fit) == bool(r.rates[i].fit));
      if (s.rates[i].fit) CHECK_THAT(r.rates[i].fit->slope, WithinAbs(s.rates[i].fit->slope, 1e-12));
    }
    const json j = json::parse(slurp(a / "summary.json"));
    CHECK_THAT(j["runs"][1]["aggregates"]["E"]["sup"].get<double>(), WithinRel(s.runs[1].sup("E"), 1e-15));
  }
  SECTION("well-prepared offsets shrink with eps") {
    CHECK(s.runs[0].sup("delta_sigma_v_l2") > s.runs[1].sup("delta_sigma_v_l2"));
    CHECK(s.runs[1].sup("delta_sigma_v_l2") > s.runs[2].sup("delta_sigma_v_l2"));
    REQUIRE(s.rate("delta_sigma_v:sup").fit);
    CHECK(s.rate("delta_sigma_v:sup").fit->slope > 0.85);
  }
}

TEST_CASE("A diverging eps does not stop the sweep", "[experiment]") {
  ExperimentConfig c;
  c.nx = c.ny = c.nz = 8;
  c.dt = 0.02;
  c.T = 1.0;
  c.eps_list = {0.5, 0.2, 0.1, 0.05};
  c.ic = IcKind::ill_prepared;
  c.amplitude = 8.0;
  c.record_every = 10;
  const auto dir = scratch("diverge");
  const RunSummary s = run_experiment(c, dir, 1);
  REQUIRE(s.runs.size() == 4);
  int failed = 0;
  for (const auto& r : s.runs) {
    CHECK(fs::exists(dir / csv_name(r.eps)));
    if (!r.completed) {
      ++failed;
      CHECK(r.failure.find("non-finite") != std::string::npos);
    }
  }
  CHECK(failed >= 1);
  CHECK(failed < 4);
}

TEST_CASE("Final checkpoints resume the sweep", "[experiment][checkpoint]") {
  ExperimentConfig c = small();
  c.checkpoint = true;
  c.eps_list = {0.1};
  const auto dir = scratch("ckpt");
  run_experiment(c, dir, 1);
  const CfState last = checkpoint_read(dir / "eps_0.1.hlim");
  CHECK_THAT(last.time, WithinAbs(c.T, 1e-12));
  CHECK(last.epsilon == 0.1);

  CfIntegrator it(last.grid(), 0.1, c.stepper());
  it.prime(checkpoint_read(dir / "eps_0.1.prev.hlim"));
  CfState next = last;
  it.advance(next);
  CHECK(next.sigma.all_finite());
}
