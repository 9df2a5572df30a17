// hydrolim: eps-sweep driver for the scaled compressible system and its
// hydrostatic limit.
//
//   hydrolim run <config.json> [--out DIR] [--threads N] [--quiet]
//   hydrolim rates <run-dir>
//   hydrolim oracle
//   hydrolim check
//
// HYDROLIM_OUT overrides --out, which overrides the config's "out".

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "hydrolim/hydrolim.hpp"

namespace {

using namespace hydrolim;

struct Options {
  std::string config;
  std::string out;
  std::string dir;
  int threads = 0;
  bool quiet = false;
};

void print_rates(const RunSummary& s) {
  std::printf("%-18s %8s %9s %10s %7s\n", "rate", "target", "slope", "residual", "points");
  for (const auto& r : s.rates) {
    if (r.fit) {
      std::printf("%-18s %8.4f %9.4f %10.2e %7zu\n", r.name.c_str(), r.target, r.fit->slope, r.fit->max_residual,
                  r.fit->used);
    } else {
      std::printf("%-18s %8.4f %9s  (%s)\n", r.name.c_str(), r.target, "-", r.note.c_str());
    }
  }
  std::printf("sup_t E max/min over eps: %.4f\n", s.sup_E_ratio());
}

int cmd_run(const Options& o) {
  ExperimentConfig cfg = ExperimentConfig::load(o.config);
  std::string out = cfg.out;
  if (!o.out.empty()) out = o.out;
  if (const char* env = std::getenv("HYDROLIM_OUT"); env && *env) out = env;
  ProgressFn progress;
  if (!o.quiet) progress = [](const std::string& m) { std::fprintf(stderr, "%s\n", m.c_str()); };
  const RunSummary s = run_experiment(cfg, out, o.threads, progress);
  if (!o.quiet) {
    for (const auto& r : s.runs) {
      std::printf("eps %-8s %s  sup E %.4e  sup |dsigma|+|dv| %.4e  sup |dw| %.4e  (%.1f s)\n",
                  short_double(r.eps).c_str(), r.completed ? "ok    " : "FAILED", r.sup("E"),
                  r.sup("delta_sigma_v_l2"), r.sup("delta_w_l2"), r.wall_seconds);
    }
    print_rates(s);
    std::printf("output: %s\n", out.c_str());
  }
  for (const auto& r : s.runs)
    if (!r.completed) return 1;
  return 0;
}

int cmd_rates(const Options& o) {
  const RunSummary s = rates_from_directory(o.dir);
  print_rates(s);
  // The recomputed rates must agree with the stored ones.
  std::ifstream is(std::filesystem::path(o.dir) / "summary.json");
  const nlohmann::json j = nlohmann::json::parse(is);
  int mismatches = 0;
  for (const auto& stored : j.at("rates")) {
    const RateEntry& r = s.rate(stored.at("name").get<std::string>());
    if (r.fit && stored.contains("slope") && std::abs(stored.at("slope").get<double>() - r.fit->slope) > 1e-12) {
      std::fprintf(stderr, "rate %s: summary.json has %.17g, CSV gives %.17g\n", r.name.c_str(),
                   stored.at("slope").get<double>(), r.fit->slope);
      ++mismatches;
    }
  }
  return mismatches ? 1 : 0;
}

int cmd_oracle() {
  constexpr double pi = std::numbers::pi;
  std::printf("vertical mode (0,0,1): lambda^2 + pi^2 lambda + pi^2/eps^2 = 0\n");
  std::printf("%6s %22s %22s %12s %10s\n", "eps", "re lambda", "im lambda", "|closed|", "residual");
  bool ok = true;
  for (double eps : {0.2, 0.1, 0.05}) {
    const oracle::ModeEigen e = oracle::mode_eigen({0, 0, 1}, eps);
    const auto roots = oracle::vertical_roots(1, eps);
    for (std::size_t i = 0; i < e.values.size(); ++i) {
      const double diff = std::abs(e.values[i] - roots[i]);
      ok = ok && diff <= 1e-10 && e.residual <= 1e-12;
      std::printf("%6.3f %22.15f %22.15f %12.2e %10.2e\n", eps, e.values[i].real(), e.values[i].imag(), diff,
                  e.residual);
    }
  }
  std::printf("closed form at eps = 0.1: %.10f +- %.10f i\n", -pi * pi / 2, pi / 2 * std::sqrt(400 - pi * pi));
  return ok ? 0 : 1;
}

int cmd_check() {
  int failures = 0;
  auto line = [&](const char* name, bool pass, const std::string& detail) {
    std::printf("%s  %-34s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    failures += !pass;
  };
  char buf[256];

  {
    std::vector<double> err;
    for (double dt : {1e-2, 5e-3, 2.5e-3}) err.push_back(verify::linear_sector_error(dt, {0, 0, 1}, 0.1));
    const auto ord = verify::observed_orders(err);
    std::snprintf(buf, sizeof buf, "orders %.3f %.3f", ord[0], ord[1]);
    line("linear sector order (cnab2)", std::min(ord[0], ord[1]) >= 1.8, buf);
  }
  {
    const auto r = verify::structural_invariants(Grid(16), 0.1, 2.5e-4, 100);
    std::snprintf(buf, sizeof buf, "%.2e", r.parity_leak);
    line("parity leakage", r.parity_leak <= 1e-12, buf);
    std::snprintf(buf, sizeof buf, "%.2e", r.mass_drift);
    line("mass drift", r.mass_drift <= 1e-8, buf);
    std::snprintf(buf, sizeof buf, "%.2e (bound %.1e)", r.w_mismatch, 10 * 2.5e-4);
    line("w from continuity", r.w_mismatch <= 10 * 2.5e-4, buf);
  }
  {
    double worst = 0.0;
    for (unsigned seed = 0; seed < 3; ++seed) {
      const CfState s = verify::random_state(Grid(16), 4, 0.1 + 0.1 * seed, 100 + 7 * seed, 0.3);
      worst = std::max(worst, mixed_wave_residual(s).relative());
    }
    std::snprintf(buf, sizeof buf, "%.2e", worst);
    line("damped wave identity", worst <= 1e-8, buf);
  }
  {
    const auto r = verify::cpe_invariants(Grid(16), 1e-3, 50);
    std::snprintf(buf, sizeof buf, "%.2e", r.max_lid);
    line("hydrostatic wp(., 1) = 0", r.max_lid <= 1e-12, buf);
    std::vector<double> err;
    for (double dt : {1e-2, 5e-3, 2.5e-3}) err.push_back(verify::manufactured_cpe_error(dt));
    const auto ord = verify::observed_orders(err);
    std::snprintf(buf, sizeof buf, "orders %.3f %.3f", ord[0], ord[1]);
    line("manufactured hydrostatic order", std::min(ord[0], ord[1]) >= 1.8, buf);
  }
  {
    const auto dir = std::filesystem::temp_directory_path() / "hydrolim_check";
    const double d = verify::restart_difference(Grid(16), 0.1, 1e-3, 20, 10, dir);
    std::filesystem::remove_all(dir);
    std::snprintf(buf, sizeof buf, "%.2e", d);
    line("checkpoint restart", d <= 1e-14, buf);
  }
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eps-sweep laboratory for the scaled compressible system and its hydrostatic limit"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "run an eps sweep from a JSON config");
  run->add_option("config,--config", o.config, "config file");
  run->add_option("--out", o.out, "output directory (HYDROLIM_OUT overrides)");
  run->add_option("--threads", o.threads, "worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
  run->add_flag("--quiet", o.quiet, "print nothing on success");

  auto* rates = app.add_subcommand("rates", "recompute aggregates and rates from a run directory");
  rates->add_option("dir", o.dir, "run directory")->required();

  app.add_subcommand("oracle", "eigenvalue table of the linear model");
  app.add_subcommand("check", "invariant self-test at desk scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      if (o.config.empty()) {
        std::fprintf(stderr, "run: a config file is required\n%s", run->help().c_str());
        return 2;
      }
      return cmd_run(o);
    }
    if (*rates) return cmd_rates(o);
    if (app.got_subcommand("oracle")) return cmd_oracle();
    if (app.got_subcommand("check")) return cmd_check();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
