#include "taxis/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "taxis/errors.hpp"

namespace taxis {

namespace {

constexpr const char* kConfigMarker = "# ---- config ----";

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g10(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::filesystem::path snapshot_path(const std::filesystem::path& dir, char c, std::uint64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c_%08llu.fld", c, static_cast<unsigned long long>(step));
  return dir / buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write " + p.string());
  return os;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os = open_out(p);
  os << text;
  if (!os) throw Error("write failed for " + p.string());
}

std::string gate_line(const GateResult& g) {
  std::string s = g.pass ? "pass" : "fail";
  for (const std::string& f : g.failures) s += "; " + f;
  if (g.knife_edge) s += "; knife-edge margin";
  return s;
}

} // namespace

const char* status_name(RunStatus s) {
  switch (s) {
  case RunStatus::Completed: return "completed";
  case RunStatus::ValidationFailed: return "validation_failed";
  case RunStatus::GateRejected: return "gate_rejected";
  case RunStatus::Aborted: return "aborted";
  }
  return "?";
}

int RunResult::exit_code() const {
  switch (status) {
  case RunStatus::Completed: return report.all_passed() ? 0 : 1;
  case RunStatus::ValidationFailed:
  case RunStatus::GateRejected: return 1;
  case RunStatus::Aborted: return 2;
  }
  return 2;
}

std::string manifest_text(const Config& c, const std::string& status, bool hypotheses_met) {
  const std::string ini = to_ini(c);
  const GateOutcome gates = evaluate_gates(c);
  std::ostringstream os;
  os << "config_sha1 = " << content_hash(ini) << '\n';
  os << "status = " << status << '\n';
  os << "hypotheses = " << (hypotheses_met ? "met" : "unmet") << '\n';
  os << "gate_global = " << gate_line(gates.gate1) << '\n';
  os << "gate_eventual = " << gate_line(gates.gate2) << '\n';
  os << kConfigMarker << '\n' << ini;
  return os.str();
}

Config config_from_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw ConfigError("cannot read manifest " + manifest.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::size_t at = text.find(std::string(kConfigMarker) + "\n");
  if (at == std::string::npos) throw ConfigError("manifest has no config echo");
  return parse_config(std::string_view(text).substr(at + std::string(kConfigMarker).size() + 1));
}

RunResult run(const Config& config, const RunOptions& options) {
  RunResult res;
  try {
    validate_config(config);
  } catch (const ConfigError& e) {
    res.status = RunStatus::ValidationFailed;
    res.message = e.what();
    return res;
  }
  res.gates = evaluate_gates(config);
  res.hypotheses_met = res.gates.gate1.pass;
  if (!res.gates.gate1.pass && !options.force) {
    res.status = RunStatus::GateRejected;
    res.message = "hypotheses unmet: " + gate_line(res.gates.gate1);
    return res;
  }

  const Grid g = make_grid(config);
  const ModelParams params = make_params(config);
  const InitialData init = make_initial(config, g);
  const StepControl control = make_control(config);
  const bool armed = res.gates.gate2.pass;
  MonitorSuite suite(g, params, init, make_monitor_settings(config, armed));
  std::optional<WeakFormEvaluator> weak;
  if (options.weak_form && config.t_end > 0.0)
    weak.emplace(g, params, standard_basis(config.t_end, g.lx(), g.ly()));

  namespace fs = std::filesystem;
  const bool io = options.write_outputs;
  res.out_dir = options.out_dir.empty() ? fs::path(config.out_dir) : options.out_dir;
  std::ofstream mon_csv, ts_csv;
  if (io) {
    fs::create_directories(res.out_dir);
    for (const auto& entry : fs::directory_iterator(res.out_dir))
      if (entry.path().extension() == ".fld") fs::remove(entry.path());
    fs::remove(res.out_dir / "failure.txt");
    write_text(res.out_dir / "manifest.txt", manifest_text(config, "running", res.hypotheses_met));
    mon_csv = open_out(res.out_dir / "monitors.csv");
    ts_csv = open_out(res.out_dir / "timeseries.csv");
    mon_csv << "t,check_name,value,bound,margin,pass\n";
    ts_csv << "t,dt,int_u,int_v,int_w,max_u,max_v,max_w,clamp_count\n";
  }

  State state = initial_state(init);
  StepDiagnostics diag;

  auto snapshot = [&](const State& s) {
    if (!io) return;
    write_fld(snapshot_path(res.out_dir, 'u', s.step_index), g, s.t, s.u);
    write_fld(snapshot_path(res.out_dir, 'v', s.step_index), g, s.t, s.v);
    write_fld(snapshot_path(res.out_dir, 'w', s.step_index), g, s.t, s.w);
  };
  auto record = [&](const State& s, double dt, bool final_row) {
    const auto entries = suite.observe(s, dt);
    if (weak) weak->add(s.t, s.u, s.v, s.w);
    if (options.observer) options.observer(s, diag, dt);
    if (!io) return;
    ts_csv << g10(s.t) << ',' << g10(dt) << ',' << g10(integrate(s.u, g)) << ','
           << g10(integrate(s.v, g)) << ',' << g10(integrate(s.w, g)) << ',' << g10(norm_linf(s.u))
           << ',' << g10(norm_linf(s.v)) << ',' << g10(norm_linf(s.w)) << ',' << diag.clamp_count
           << '\n';
    const bool on_cadence = s.step_index % config.cadence == 0 || final_row;
    for (const MonitorEntry& e : entries) {
      if (!on_cadence && e.verdict != Verdict::Fail) continue;
      mon_csv << g10(e.t) << ',' << e.name << ',' << g10(e.value) << ',' << g10(e.bound) << ','
              << g10(e.margin) << ',' << verdict_name(e.verdict) << '\n';
    }
  };

  const double t_end = config.t_end;
  const double t_eps = 1e-12 * std::max(1.0, t_end);
  try {
    record(state, 0.0, t_end <= t_eps);
    snapshot(state);
    while (state.t < t_end - t_eps) {
      double dt = control.adaptive ? suggest_dt(state, params, g, control) : control.dt_max;
      const double remaining = t_end - state.t;
      // avoid leaving a sliver shorter than a small fraction of the step
      if (remaining < dt * (1.0 + 1e-6)) dt = remaining;
      state = step(state, params, dt, g, control, &diag);
      if (state.t > t_end - t_eps) state.t = t_end;
      res.steps += 1;
      res.min_dt = res.steps == 1 ? dt : std::min(res.min_dt, dt);
      res.max_dt = std::max(res.max_dt, dt);
      res.clamp_events += diag.clamp_count;
      res.max_clamp = std::max(res.max_clamp, diag.max_clamp);
      res.max_mass_defect_u = std::max(res.max_mass_defect_u, std::abs(diag.mass_defect_u));
      res.max_mass_defect_v = std::max(res.max_mass_defect_v, std::abs(diag.mass_defect_v));
      const bool last = state.t >= t_end - t_eps;
      record(state, dt, last);
      if (config.snapshot_every > 0 && (state.step_index % config.snapshot_every == 0 || last))
        snapshot(state);
    }
    res.status = RunStatus::Completed;
  } catch (const Error& e) {
    res.status = RunStatus::Aborted;
    res.message = e.what();
    if (io) {
      std::ostringstream os;
      os << "error = " << e.what() << "\nt = " << g17(state.t) << "\nstep = " << state.step_index
         << "\nlast_dt = " << g17(res.max_dt) << '\n';
      write_text(res.out_dir / "failure.txt", os.str());
      snapshot(state);
    }
  }

  res.final_state = state;
  res.report = suite.finish();
  if (weak) {
    try {
      res.weak = weak->results();
    } catch (const StructuralError&) {
      // aborted runs end before the supports of the basis close
      res.weak.clear();
    }
    res.min_mass_slack = weak->min_mass_slack();
  }

  if (io) {
    mon_csv.flush();
    ts_csv.flush();
    std::ofstream sum = open_out(res.out_dir / "summary.csv");
    sum << "check_name,evaluations,failures,worst_margin,worst_t,last_value\n";
    for (const auto& [name, s] : res.report.checks)
      sum << name << ',' << s.evaluations << ',' << s.failures << ',' << g10(s.worst_margin) << ','
          << g10(s.worst_t) << ',' << g10(s.last_value) << '\n';
    const DecayResult& d = res.report.decay;
    sum << "decay_detected," << (d.detected ? 1 : 0) << ",0," << g10(d.t_detect) << ",,"
        << g10(d.tail_w + d.tail_consumption) << '\n';
    const RegularityReport& r = res.report.regularity;
    if (r.evaluated)
      sum << "eventually_regular," << (r.regularized ? 1 : 0) << ",0," << g10(r.t_from) << ",,\n";
    if (weak && !res.weak.empty()) {
      std::ofstream wf = open_out(res.out_dir / "weakform.csv");
      write_weakform_csv(wf, res.weak, res.min_mass_slack);
    }
    write_text(res.out_dir / "manifest.txt",
               manifest_text(config, status_name(res.status), res.hypotheses_met));
  }
  return res;
}

} // namespace taxis
