#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "taxis/config.hpp"
#include "taxis/errors.hpp"
#include "taxis/presets.hpp"
#include "taxis/run.hpp"
#include "taxis/studies.hpp"
#include "taxis/weakform.hpp"

namespace {

using namespace taxis;

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Config resolve(const std::string& config_path, const std::string& preset_name) {
  if (!config_path.empty() && !preset_name.empty())
    throw ConfigError("give either --config or --preset, not both");
  if (!preset_name.empty()) return preset(preset_name).config;
  if (config_path.empty()) throw ConfigError("one of --config or --preset is required");
  return load_config(config_path);
}

void print_gate(std::ostream& os, const char* label, const GateResult& r) {
  os << label << ": " << (r.pass ? "pass" : "fail") << "  (alpha margin " << g(r.alpha_margin)
     << ", min-condition margin " << g(r.min_cond_margin) << ", beta margin " << g(r.beta_margin)
     << ")" << (r.knife_edge ? "  knife-edge" : "") << '\n';
  for (const std::string& f : r.failures) os << "  - " << f << '\n';
}

std::ostream* open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  return &file;
}

int cmd_run(const std::string& cfg, const std::string& pre, bool force, const std::string& out,
            double t_end) {
  Config c = resolve(cfg, pre);
  if (t_end >= 0.0) c.t_end = t_end;
  RunOptions opt;
  opt.force = force;
  if (!out.empty()) opt.out_dir = out;
  const RunResult r = run(c, opt);
  std::cout << "status: " << status_name(r.status) << '\n';
  if (!r.message.empty()) std::cout << "message: " << r.message << '\n';
  if (r.status == RunStatus::Completed || r.status == RunStatus::Aborted) {
    std::cout << "steps: " << r.steps << "  dt range: [" << g(r.min_dt) << ", " << g(r.max_dt)
              << "]  clamp events: " << r.clamp_events << '\n';
    for (const auto& [name, s] : r.report.checks)
      if (s.failures > 0 || std::isfinite(s.worst_margin))
        std::cout << "  " << name << ": failures " << s.failures << ", worst margin "
                  << g(s.worst_margin) << " at t=" << g(s.worst_t) << '\n';
    if (r.report.decay.hypotheses_met && r.gates.gate2.pass)
      std::cout << "decay_detected=" << (r.report.decay.detected ? "true" : "false")
                << " T=" << g(r.report.decay.t_detect)
                << " eventually_regular=" << (r.report.regularity.regularized ? "true" : "false")
                << '\n';
    std::cout << "output: " << r.out_dir.string() << '\n';
  }
  return r.exit_code();
}

int cmd_gate(const std::string& cfg, const std::string& pre) {
  const Config c = resolve(cfg, pre);
  const GateOutcome o = evaluate_gates(c);
  print_gate(std::cout, "global solvability gate", o.gate1);
  print_gate(std::cout, "eventual regularity gate", o.gate2);
  return o.gate1.pass ? 0 : 1;
}

std::vector<std::size_t> parse_levels(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoul(tok));
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

int cmd_mms(const std::string& levels, const std::string& triple, double t_end, double factor,
            const std::string& out) {
  MmsOptions opt;
  opt.levels = parse_levels(levels);
  opt.triple = triple;
  opt.t_end = t_end;
  opt.dt_factor = factor;
  const MmsStudy s = run_mms(opt);
  std::ofstream file;
  std::ostream& os = *open_or_stdout(out, file);
  os << "nx,h,dt,steps,l2_u,l2_v,l2_w,linf_u,linf_v,linf_w,order_l2_u,order_l2_v,order_l2_w,"
        "order_linf_u,order_linf_v,order_linf_w,seconds\n";
  for (std::size_t k = 0; k < s.levels.size(); ++k) {
    const MmsLevel& l = s.levels[k];
    os << l.nx << ',' << g(l.h) << ',' << g(l.dt) << ',' << l.steps;
    for (double e : l.err_l2) os << ',' << g(e);
    for (double e : l.err_linf) os << ',' << g(e);
    for (int c = 0; c < 6; ++c) {
      os << ',';
      if (k == 0) continue;
      if (s.exact) {
        os << "exact";
        continue;
      }
      os << g(c < 3 ? s.order_l2[k - 1][c] : s.order_linf[k - 1][c - 3]);
    }
    os << ',' << g(l.seconds) << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& cfg, const std::string& pre, const std::string& eps_list,
              double t_end, const std::string& out) {
  Config c = resolve(cfg, pre);
  if (t_end >= 0.0) c.t_end = t_end;
  const EpsilonSweep s = sweep_epsilon(c, parse_list(eps_list));
  std::ofstream file;
  std::ostream& os = *open_or_stdout(out, file);
  os << "eps_a,eps_b,l2_u,l1_v,l2_w\n";
  for (std::size_t k = 0; k < s.diff_u.size(); ++k)
    os << g(s.eps[k]) << ',' << g(s.eps[k + 1]) << ',' << g(s.diff_u[k]) << ','
       << g(s.diff_v[k]) << ',' << g(s.diff_w[k]) << '\n';
  return 0;
}

int cmd_verify_weak(const std::string& traj_dir, const std::string& out) {
  const TrajectoryHandle traj = TrajectoryHandle::open(traj_dir);
  const Config c = config_from_manifest(std::filesystem::path(traj_dir) / "manifest.txt");
  const ModelParams params = make_params(c);
  const double t_end = traj.entries().back().t;
  WeakFormEvaluator eval(traj.grid(), params, standard_basis(t_end, c.lx, c.ly));
  traj.stream(eval);
  const auto rows = eval.results();
  std::ofstream file;
  std::ostream& os = *open_or_stdout(out, file);
  write_weakform_csv(os, rows, eval.min_mass_slack());
  bool ok = eval.min_mass_slack() >= -kMassSlackTolerance;
  for (const WeakResult& r : rows) ok = ok && r.pass;
  return ok ? 0 : 1;
}

int cmd_preset(const std::string& action, const std::string& name) {
  if (action == "list") {
    for (const std::string& n : preset_names()) std::cout << n << "  " << preset(n).description << '\n';
    return 0;
  }
  if (action == "show") {
    if (name.empty()) throw ConfigError("preset show needs a name");
    std::cout << to_ini(preset(name).config);
    return 0;
  }
  throw ConfigError("preset action must be list or show");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured-grid simulator for a forager-exploiter taxis cascade"};
  app.require_subcommand(1);

  std::string cfg, pre, out, levels = "32,64,128", triple = "cosine", eps = "0.1,0.01,0.001,0.0001";
  std::string traj, action, name;
  bool force = false;
  double t_end = -1.0, mms_t_end = 0.1, factor = 1.0;

  auto* run_cmd = app.add_subcommand("run", "Integrate a config or preset and write outputs");
  run_cmd->add_option("--config", cfg, "INI config file");
  run_cmd->add_option("--preset", pre, "Preset name");
  run_cmd->add_flag("--force", force, "Run even when the parameter gate fails");
  run_cmd->add_option("--out", out, "Output directory (overrides [output] dir)");
  run_cmd->add_option("--t-end", t_end, "Override the end time");

  auto* gate_cmd = app.add_subcommand("gate", "Check the parameter gates");
  gate_cmd->add_option("--config", cfg, "INI config file");
  gate_cmd->add_option("--preset", pre, "Preset name");

  auto* mms_cmd = app.add_subcommand("mms", "Manufactured-solution convergence table");
  mms_cmd->add_option("--levels", levels, "Comma-separated ascending nx values");
  mms_cmd->add_option("--triple", triple, "constant | forager | cosine | coupled");
  mms_cmd->add_option("--t-end", mms_t_end, "End time");
  mms_cmd->add_option("--dt-factor", factor, "dt = factor * h^2");
  mms_cmd->add_option("--out", out, "CSV output file (default stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep-epsilon", "Consecutive differences over an epsilon list");
  sweep_cmd->add_option("--config", cfg, "INI config file");
  sweep_cmd->add_option("--preset", pre, "Preset name");
  sweep_cmd->add_option("--eps", eps, "Comma-separated descending epsilon values");
  sweep_cmd->add_option("--t-end", t_end, "Override the end time");
  sweep_cmd->add_option("--out", out, "CSV output file (default stdout)");

  auto* weak_cmd = app.add_subcommand("verify-weak", "Weak-form residuals of a recorded run");
  weak_cmd->add_option("--traj", traj, "Run directory with snapshots and manifest.txt")->required();
  weak_cmd->add_option("--out", out, "CSV output file (default stdout)");

  auto* preset_cmd = app.add_subcommand("preset", "List presets or print one as INI");
  preset_cmd->add_option("action", action, "list | show")->required();
  preset_cmd->add_option("name", name, "Preset name for show");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return cmd_run(cfg, pre, force, out, t_end);
    if (*gate_cmd) return cmd_gate(cfg, pre);
    if (*mms_cmd) return cmd_mms(levels, triple, mms_t_end, factor, out);
    if (*sweep_cmd) return cmd_sweep(cfg, pre, eps, t_end, out);
    if (*weak_cmd) return cmd_verify_weak(traj, out);
    if (*preset_cmd) return cmd_preset(action, name);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
