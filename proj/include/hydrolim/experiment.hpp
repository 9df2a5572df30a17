#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hydrolim/checkpoint.hpp"
#include "hydrolim/cf_solver.hpp"
#include "hydrolim/cpe_solver.hpp"
#include "hydrolim/diagnostics.hpp"
#include "hydrolim/model_state.hpp"

namespace hydrolim {

enum class IcKind {
  well_prepared,           // O(eps) offset, d_z sigma0 = 0
  well_prepared_vertical,  // O(eps) offset, d_z sigma0 = O(eps)
  ill_prepared,            // O(1) offset
};

inline const char* ic_name(IcKind k) {
  switch (k) {
    case IcKind::well_prepared: return "well-prepared";
    case IcKind::well_prepared_vertical: return "well-prepared-vertical";
    case IcKind::ill_prepared: return "ill-prepared";
  }
  return "?";
}

inline const char* scheme_name(Scheme s) { return s == Scheme::cnab2 ? "cnab2" : "imex-euler"; }

/// Parameters of one eps sweep. Serialized as JSON with a mandatory
/// `version` field; unknown keys are rejected.
struct ExperimentConfig {
  static constexpr int current_version = 1;

  int nx = 32, ny = 32, nz = 32;
  double dt = 2.5e-4;
  double T = 0.25;
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  IcKind ic = IcKind::well_prepared;
  double amplitude = 1.0;       // perturbation amplitude of the CF data
  double base_amplitude = 0.25;  // amplitude of the hydrostatic reference state
  Scheme scheme = Scheme::cnab2;
  bool dealias = true;
  int record_every = 10;
  bool checkpoint = false;  // write the final CF states (current and previous step)
  std::string out = "hydrolim_out";

  Grid grid() const { return Grid(nx, ny, nz); }

  long steps() const { return std::lround(T / dt); }

  StepperConfig stepper() const {
    StepperConfig c;
    c.dt = dt;
    c.scheme = scheme;
    c.dealias = dealias;
    return c;
  }

  void validate() const {
    (void)grid();
    if (!(dt > 0.0)) throw InvalidInput("config: dt must be positive");
    if (!(T >= 0.0)) throw InvalidInput("config: T must be nonnegative");
    if (std::abs(double(steps()) * dt - T) > 1e-9 * std::max(T, dt)) {
      throw InvalidInput("config: T must be a whole number of steps dt");
    }
    if (eps_list.empty()) throw InvalidInput("config: eps_list is empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
      if (!(eps_list[i] > 0.0 && eps_list[i] < 1.0)) throw InvalidInput("config: every eps must lie in (0, 1)");
      if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw InvalidInput("config: eps_list must be strictly decreasing");
    }
    if (!(amplitude >= 0.0) || !(base_amplitude >= 0.0)) throw InvalidInput("config: amplitudes must be nonnegative");
    if (record_every < 1) throw InvalidInput("config: record_every must be at least 1");
  }

  nlohmann::json to_json() const {
    return {{"version", current_version},
            {"grid", {nx, ny, nz}},
            {"dt", dt},
            {"T", T},
            {"eps_list", eps_list},
            {"ic", {{"kind", ic_name(ic)}, {"amplitude", amplitude}, {"base_amplitude", base_amplitude}}},
            {"scheme", scheme_name(scheme)},
            {"dealias", dealias},
            {"record_every", record_every},
            {"checkpoint", checkpoint},
            {"out", out}};
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
    static const std::set<std::string> known{"version", "grid",   "dt",           "T",          "eps_list", "ic",
                                             "scheme",  "dealias", "record_every", "checkpoint", "out"};
    for (const auto& [key, value] : j.items()) {
      if (!known.count(key)) throw InvalidInput("config: unknown key '" + key + "'");
    }
    if (!j.contains("version")) throw InvalidInput("config: missing 'version'");
    if (j.at("version") != current_version) throw InvalidInput("config: unsupported version " + j.at("version").dump());

    ExperimentConfig c;
    try {
      if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.is_number_integer()) {
          c.nx = c.ny = c.nz = g.get<int>();
        } else if (g.is_array() && g.size() == 3) {
          c.nx = g[0].get<int>();
          c.ny = g[1].get<int>();
          c.nz = g[2].get<int>();
        } else {
          throw InvalidInput("config: grid must be an integer or [nx, ny, nz]");
        }
      }
      if (j.contains("dt")) c.dt = j.at("dt").get<double>();
      if (j.contains("T")) c.T = j.at("T").get<double>();
      if (j.contains("eps_list")) c.eps_list = j.at("eps_list").get<std::vector<double>>();
      if (j.contains("ic")) {
        const auto& ic = j.at("ic");
        if (!ic.is_object()) throw InvalidInput("config: ic must be an object");
        for (const auto& [key, value] : ic.items()) {
          if (key != "kind" && key != "amplitude" && key != "base_amplitude") {
            throw InvalidInput("config: unknown key 'ic." + key + "'");
          }
        }
        if (ic.contains("kind")) {
          const auto kind = ic.at("kind").get<std::string>();
          if (kind == "well-prepared") c.ic = IcKind::well_prepared;
          else if (kind == "well-prepared-vertical") c.ic = IcKind::well_prepared_vertical;
          else if (kind == "ill-prepared") c.ic = IcKind::ill_prepared;
          else throw InvalidInput("config: unknown ic kind '" + kind + "'");
        }
        if (ic.contains("amplitude")) c.amplitude = ic.at("amplitude").get<double>();
        if (ic.contains("base_amplitude")) c.base_amplitude = ic.at("base_amplitude").get<double>();
      }
      if (j.contains("scheme")) {
        const auto s = j.at("scheme").get<std::string>();
        if (s == "cnab2") c.scheme = Scheme::cnab2;
        else if (s == "imex-euler") c.scheme = Scheme::imex_euler;
        else throw InvalidInput("config: unknown scheme '" + s + "'");
      }
      if (j.contains("dealias")) c.dealias = j.at("dealias").get<bool>();
      if (j.contains("record_every")) c.record_every = j.at("record_every").get<int>();
      if (j.contains("checkpoint")) c.checkpoint = j.at("checkpoint").get<bool>();
      if (j.contains("out")) c.out = j.at("out").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
  }

  static ExperimentConfig load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("config file not found: " + path.string());
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput("config: malformed JSON in " + path.string() + ": " + e.what());
    }
    return from_json(j);
  }
};

/// CSV columns, one row per recorded time.
inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "time",       "E",           "D",          "E1",          "D1",
      "delta_sigma_l2", "delta_v_l2", "delta_v_h1", "delta_w_l2", "dz_sigma_h2",
      "dz_dt_sigma_l2", "avg_delta_sigma_l2", "fluct_delta_sigma_l2"};
  return cols;
}

inline std::array<double, 13> record_row(const DiagnosticsRecord& r) {
  const DeltaNorms& d = r.delta;
  return {r.time,           r.E,          r.D,          r.E1,          r.D1,
          d.delta_sigma_l2, d.delta_v_l2, d.delta_v_h1, d.delta_w_l2, d.dz_sigma_h2,
          d.dz_dt_sigma_l2, d.avg_delta_sigma_l2, d.fluct_delta_sigma_l2};
}

inline DiagnosticsRecord row_record(const std::array<double, 13>& v) {
  DiagnosticsRecord r;
  r.time = v[0];
  r.E = v[1];
  r.D = v[2];
  r.E1 = v[3];
  r.D1 = v[4];
  r.delta = {v[5], v[6], v[7], v[8], v[9], v[10], v[11], v[12]};
  return r;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Shortest round-trip spelling, used in file names.
inline std::string short_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_name(double eps) { return "eps_" + short_double(eps) + ".csv"; }

inline void write_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& records) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidInput("cannot write " + path.string());
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : records) {
    const auto row = record_row(r);
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  if (!os) throw InvalidInput("failed writing " + path.string());
}

inline std::vector<DiagnosticsRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot read " + path.string());
  std::string line;
  std::getline(is, line);
  std::string expected;
  for (std::size_t i = 0; i < csv_columns().size(); ++i) expected += (i ? "," : "") + csv_columns()[i];
  if (line != expected) throw InvalidInput("unexpected CSV header in " + path.string());
  std::vector<DiagnosticsRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<double, 13> v{};
    std::stringstream ss(line);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(ss, cell, ',')) {
      if (i >= v.size()) throw InvalidInput("too many CSV cells in " + path.string());
      v[i++] = std::stod(cell);
    }
    if (i != v.size()) throw InvalidInput("too few CSV cells in " + path.string());
    out.push_back(row_record(v));
  }
  return out;
}

/// Supremum and L2-in-time (trapezoid over the recorded samples).
struct TimeNorms {
  double sup = 0.0;
  double l2 = 0.0;
};

inline TimeNorms time_norms(const std::vector<DiagnosticsRecord>& rs, const std::function<double(const DiagnosticsRecord&)>& f) {
  TimeNorms n;
  double integral = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double v = f(rs[i]);
    n.sup = std::max(n.sup, v);
    if (i > 0) {
      const double u = f(rs[i - 1]);
      integral += 0.5 * (rs[i].time - rs[i - 1].time) * (u * u + v * v);
    }
  }
  n.l2 = std::sqrt(integral);
  return n;
}

/// Aggregates of one eps run.
struct EpsSummary {
  double eps = 0.0;
  bool completed = false;
  std::string failure;  // empty when completed
  double wall_seconds = 0.0;
  std::size_t records = 0;
  double final_time = 0.0;
  std::map<std::string, TimeNorms> norms;

  static EpsSummary from_records(double eps, const std::vector<DiagnosticsRecord>& rs) {
    EpsSummary s;
    s.eps = eps;
    s.records = rs.size();
    s.final_time = rs.empty() ? 0.0 : rs.back().time;
    auto add = [&](const std::string& name, auto fn) { s.norms[name] = time_norms(rs, fn); };
    add("E", [](const DiagnosticsRecord& r) { return r.E; });
    add("D", [](const DiagnosticsRecord& r) { return r.D; });
    add("E1", [](const DiagnosticsRecord& r) { return r.E1; });
    add("D1", [](const DiagnosticsRecord& r) { return r.D1; });
    add("delta_sigma_v_l2", [](const DiagnosticsRecord& r) { return r.delta.delta_sigma_l2 + r.delta.delta_v_l2; });
    add("delta_sigma_l2", [](const DiagnosticsRecord& r) { return r.delta.delta_sigma_l2; });
    add("delta_v_l2", [](const DiagnosticsRecord& r) { return r.delta.delta_v_l2; });
    add("delta_v_h1", [](const DiagnosticsRecord& r) { return r.delta.delta_v_h1; });
    add("delta_w_l2", [](const DiagnosticsRecord& r) { return r.delta.delta_w_l2; });
    add("dz_sigma_h2", [](const DiagnosticsRecord& r) { return r.delta.dz_sigma_h2; });
    add("dz_dt_sigma_l2", [](const DiagnosticsRecord& r) { return r.delta.dz_dt_sigma_l2; });
    add("avg_delta_sigma_l2", [](const DiagnosticsRecord& r) { return r.delta.avg_delta_sigma_l2; });
    add("fluct_delta_sigma_l2", [](const DiagnosticsRecord& r) { return r.delta.fluct_delta_sigma_l2; });
    return s;
  }

  double sup(const std::string& name) const { return norms.at(name).sup; }
  double l2(const std::string& name) const { return norms.at(name).l2; }
};

/// A fitted convergence rate against its target exponent.
struct RateEntry {
  std::string name;       // e.g. "delta_w_l2:l2"
  std::string quantity;   // column aggregate
  bool sup_in_time = true;
  double target = 1.0;
  std::optional<RateFit> fit;
  std::string note;  // reason when no fit is reported
};

struct RunSummary {
  ExperimentConfig config;
  std::vector<EpsSummary> runs;
  std::vector<RateEntry> rates;
  double cpe_wall_seconds = 0.0;

  /// max/min of sup_t E over the completed runs.
  double sup_E_ratio() const {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& r : runs) {
      if (!r.completed) continue;
      const double v = r.sup("E");
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
    return first || lo == 0.0 ? 1.0 : hi / lo;
  }

  const RateEntry& rate(const std::string& name) const {
    for (const auto& r : rates)
      if (r.name == name) return r;
    throw InvalidInput("no rate named " + name);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config"] = config.to_json();
    j["cpe_wall_seconds"] = cpe_wall_seconds;
    j["sup_E_ratio"] = sup_E_ratio();
    j["runs"] = nlohmann::json::array();
    for (const auto& r : runs) {
      nlohmann::json e{{"eps", r.eps},
                       {"completed", r.completed},
                       {"failure", r.failure},
                       {"wall_seconds", r.wall_seconds},
                       {"records", r.records},
                       {"final_time", r.final_time},
                       {"csv", csv_name(r.eps)}};
      for (const auto& [name, n] : r.norms) e["aggregates"][name] = {{"sup", n.sup}, {"l2", n.l2}};
      j["runs"].push_back(e);
    }
    j["rates"] = nlohmann::json::array();
    for (const auto& r : rates) {
      nlohmann::json e{{"name", r.name}, {"quantity", r.quantity}, {"norm", r.sup_in_time ? "sup" : "l2"},
                       {"target", r.target}};
      if (r.fit) {
        e["slope"] = r.fit->slope;
        e["intercept"] = r.fit->intercept;
        e["max_residual"] = r.fit->max_residual;
        e["points"] = r.fit->used;
      } else {
        e["note"] = r.note;
      }
      j["rates"].push_back(e);
    }
    return j;
  }
};

/// Rates of the convergence theorem: (sigma, v) in Linf L2 and v in
/// L2 H1 at order 1, w at 2/3 in Linf L2 and 3/4 in L2 L2, and d_z sigma
/// in Linf H2 at order 1.
inline std::vector<RateEntry> fit_rates(const std::vector<EpsSummary>& runs) {
  std::vector<RateEntry> out{
      {"delta_sigma_v:sup", "delta_sigma_v_l2", true, 1.0, {}, {}},
      {"delta_v_h1:l2", "delta_v_h1", false, 1.0, {}, {}},
      {"delta_w:sup", "delta_w_l2", true, 2.0 / 3.0, {}, {}},
      {"delta_w:l2", "delta_w_l2", false, 0.75, {}, {}},
      {"dz_sigma_h2:sup", "dz_sigma_h2", true, 1.0, {}, {}},
  };
  std::size_t completed = 0;
  for (const auto& r : runs) completed += r.completed;
  for (auto& e : out) {
    if (completed < 3) {
      e.note = "rates need at least 3 completed eps values (have " + std::to_string(completed) + ")";
      continue;
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : runs) {
      if (!r.completed) continue;
      pts.emplace_back(r.eps, e.sup_in_time ? r.sup(e.quantity) : r.l2(e.quantity));
    }
    try {
      e.fit = fit_rate(pts);
    } catch (const InvalidInput& ex) {
      e.note = ex.what();
    }
  }
  return out;
}

using ProgressFn = std::function<void(const std::string&)>;

namespace detail {

inline CfState initial_cf(const ExperimentConfig& c, const CpeState& cpe0, double eps) {
  switch (c.ic) {
    case IcKind::well_prepared: return make_well_prepared_ic(cpe0, eps, c.amplitude);
    case IcKind::well_prepared_vertical: return make_well_prepared_ic_vertical(cpe0, eps, c.amplitude);
    case IcKind::ill_prepared: return make_illprepared_ic(cpe0, eps, c.amplitude);
  }
  throw InvalidInput("unknown ic kind");
}

inline bool is_record_step(long step, long steps, int every) { return step % every == 0 || step == steps; }

}  // namespace detail

/// Runs the hydrostatic reference once and one CF trajectory per eps,
/// recording diagnostics every `record_every` steps and at the final step.
/// eps runs are independent and are spread over `threads` workers
/// (0 = hardware concurrency). A diverging run is reported, not fatal.
inline RunSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, int threads = 0,
                                 const ProgressFn& progress = {}) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const Grid g = cfg.grid();
  const StepperConfig sc = cfg.stepper();
  const long steps = cfg.steps();
  const double tol = 0.5 * cfg.dt;
  using clock = std::chrono::steady_clock;

  RunSummary summary;
  summary.config = cfg;

  // Hydrostatic reference, snapshotted at the record steps.
  const auto t0 = clock::now();
  std::vector<CpeState> snaps;
  CpeState cpe = default_cpe_initial(g, cfg.base_amplitude);
  const CpeState cpe0 = cpe;
  snaps.push_back(cpe);
  {
    CpeIntegrator it(sc);
    for (long s = 1; s <= steps; ++s) {
      it.advance(cpe);
      if (detail::is_record_step(s, steps, cfg.record_every)) snaps.push_back(cpe);
    }
  }
  summary.cpe_wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  if (progress) progress("reference run: " + std::to_string(steps) + " steps");

  const std::size_t n = cfg.eps_list.size();
  summary.runs.resize(n);
  std::mutex report;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      const double eps = cfg.eps_list[i];
      const auto start = clock::now();
      std::vector<DiagnosticsRecord> records;
      std::string failure;
      CfState cf = detail::initial_cf(cfg, cpe0, eps);
      CfState previous = cf;
      try {
        CfIntegrator it(g, eps, sc);
        records.push_back(make_record(cf, snaps[0], tol));
        std::size_t snap = 1;
        for (long s = 1; s <= steps; ++s) {
          previous = cf;
          it.advance(cf);
          if (detail::is_record_step(s, steps, cfg.record_every)) records.push_back(make_record(cf, snaps[snap++], tol));
        }
      } catch (const DivergenceError& e) {
        failure = e.what();
      }
      write_csv(out_dir / csv_name(eps), records);
      if (cfg.checkpoint && failure.empty()) {
        checkpoint_write(cf, out_dir / ("eps_" + short_double(eps) + ".hlim"));
        checkpoint_write(previous, out_dir / ("eps_" + short_double(eps) + ".prev.hlim"));
      }
      EpsSummary es = EpsSummary::from_records(eps, records);
      es.completed = failure.empty();
      es.failure = failure;
      es.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
      std::lock_guard lock(report);
      summary.runs[i] = std::move(es);
      if (progress) {
        progress("eps = " + short_double(eps) + (failure.empty() ? ": done" : ": FAILED (" + failure + ")"));
      }
    }
  };

  unsigned nthreads = threads > 0 ? unsigned(threads) : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, unsigned(n));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  summary.rates = fit_rates(summary.runs);
  std::ofstream js(out_dir / "summary.json", std::ios::trunc);
  js << summary.to_json().dump(2) << '\n';
  if (!js) throw InvalidInput("failed writing summary.json");
  return summary;
}

/// Recomputes aggregates and rates from the CSV files of a finished run.
/// The eps list and completion flags come from summary.json.
inline RunSummary rates_from_directory(const std::filesystem::path& dir) {
  std::ifstream is(dir / "summary.json");
  if (!is) throw InvalidInput("no summary.json in " + dir.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed summary.json: ") + e.what());
  }
  RunSummary s;
  s.config = ExperimentConfig::from_json(j.at("config"));
  for (const auto& r : j.at("runs")) {
    const double eps = r.at("eps").get<double>();
    EpsSummary es = EpsSummary::from_records(eps, read_csv(dir / r.at("csv").get<std::string>()));
    es.completed = r.at("completed").get<bool>();
    es.failure = r.at("failure").get<std::string>();
    es.wall_seconds = r.at("wall_seconds").get<double>();
    s.runs.push_back(std::move(es));
  }
  s.cpe_wall_seconds = j.value("cpe_wall_seconds", 0.0);
  s.rates = fit_rates(s.runs);
  return s;
}

}  // namespace hydrolim
