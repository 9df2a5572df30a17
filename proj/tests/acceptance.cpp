// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "hydrolim/hydrolim.hpp"

namespace {

using namespace hydrolim;
namespace fs = std::filesystem;

int failures = 0;

void report(int id, const char* what, bool pass, const std::string& detail) {
  std::printf("criterion %d  %s  %-36s %s\n", id, pass ? "PASS" : "FAIL", what, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void eigenvalues() {
  double worst = 0.0, worst_res = 0.0;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto e = oracle::mode_eigen({0, 0, 1}, eps);
    const auto roots = oracle::vertical_roots(1, eps);
    for (std::size_t i = 0; i < 2; ++i) worst = std::max(worst, std::abs(e.values[i] - roots[i]));
    worst_res = std::max(worst_res, e.residual);
  }
  report(1, "mode eigenvalues vs closed form", worst <= 1e-10,
         fmt("max |diff| %.2e, max residual %.2e", worst, worst_res));
}

void linear_order() {
  std::vector<double> err;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) err.push_back(verify::linear_sector_error(dt, {0, 0, 1}, 0.1));
  const auto ord = verify::observed_orders(err);
  report(2, "linear sector order", std::min(ord[0], ord[1]) >= 1.8,
         fmt("errors %.2e %.2e %.2e, orders %.3f %.3f", err[0], err[1], err[2], ord[0], ord[1]));
}

void damped_wave() {
  double worst = 0.0;
  const Grid g(32);
  for (unsigned seed = 0; seed < 20; ++seed) {
    const CfState s = verify::random_state(g, 6, 0.05 + 0.01 * seed, 1000 + 11 * seed, 0.3);
    worst = std::max(worst, mixed_wave_residual(s).relative());
  }
  report(3, "damped wave identity, 20 states", worst <= 1e-8, fmt("max relative residual %.2e", worst));
}

void structural() {
  const double dt = 2.5e-4;
  const auto r = verify::structural_invariants(Grid(32), 0.1, dt, 100);
  const bool pass = r.parity_leak <= 1e-12 && r.mass_drift <= 1e-8 && r.w_mismatch <= 10 * dt;
  report(4, "parity, mass, w from continuity", pass,
         fmt("leak %.2e, mass drift %.2e, w mismatch %.2e", r.parity_leak, r.mass_drift, r.w_mismatch));
}

void reference_sweep(const fs::path& root) {
  ExperimentConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  const RunSummary s = run_experiment(cfg, root / "reference");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto slope = [&](const char* name) {
    const auto& r = s.rate(name);
    return r.fit ? r.fit->slope : -1.0;
  };
  bool completed = true;
  for (const auto& r : s.runs) completed = completed && r.completed;
  const double sv = slope("delta_sigma_v:sup"), w = slope("delta_w:sup"), w2 = slope("delta_w:l2");
  report(5, "convergence rates", completed && sv >= 0.85 && w >= 0.55 && w2 >= 0.65,
         fmt("slopes sigma,v %.3f  w sup %.3f  w L2 %.3f (%.0f s)", sv, w, w2, wall));
  const double ratio = s.sup_E_ratio(), dz = slope("dz_sigma_h2:sup");
  report(6, "uniform energy, vertical balance", completed && ratio <= 2.0 && dz >= 0.9,
         fmt("sup E ratio %.3f, d_z sigma slope %.3f", ratio, dz));
}

void hydrostatic() {
  const auto r = verify::cpe_invariants(Grid(32), 1e-3, 100);
  std::vector<double> err;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) err.push_back(verify::manufactured_cpe_error(dt));
  const auto ord = verify::observed_orders(err);
  report(7, "hydrostatic invariants and order",
         r.max_lid <= 1e-12 && r.max_dz_sigma == 0.0 && std::min(ord[0], ord[1]) >= 1.8,
         fmt("lid %.2e, d_z sigma %.1e, orders %.3f %.3f", r.max_lid, r.max_dz_sigma, ord[0], ord[1]));
}

void reproducibility(const fs::path& root) {
  const double d = verify::restart_difference(Grid(16), 0.1, 1e-3, 40, 20, root / "restart");
  ExperimentConfig cfg;
  cfg.nx = cfg.ny = cfg.nz = 16;
  cfg.T = 0.05;
  cfg.eps_list = {0.2, 0.1};
  run_experiment(cfg, root / "repeat_a");
  run_experiment(cfg, root / "repeat_b");
  bool same = true;
  for (double eps : cfg.eps_list)
    same = same && slurp(root / "repeat_a" / csv_name(eps)) == slurp(root / "repeat_b" / csv_name(eps));
  report(8, "restart and determinism", d <= 1e-14 && same,
         fmt("restart max diff %.2e, CSVs %s", d, same ? "identical" : "differ"));
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "hydrolim_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  try {
    eigenvalues();
    linear_order();
    damped_wave();
    structural();
    reference_sweep(root);
    hydrostatic();
    reproducibility(root);
  } catch (const std::exception& e) {
    std::printf("aborted: %s\n", e.what());
    return 1;
  }
  fs::remove_all(root);
  std::printf("%s\n", failures ? "acceptance FAILED" : "acceptance passed");
  return failures ? 1 : 0;
}
