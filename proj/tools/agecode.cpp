// Command-line front end: solve, sweep, select, and simulate workflows over a
// JSON config with flag overrides. All emitted floats carry 12 significant
// digits so repeated runs diff cleanly.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "agecode/age.hpp"
#include "agecode/io.hpp"
#include "agecode/pmf.hpp"
#include "agecode/policy.hpp"
#include "agecode/search.hpp"
#include "agecode/simulate.hpp"
#include "agecode/solver.hpp"

namespace {

using agecode::format_double;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;
constexpr int kExitPartial = 3;

struct Options {
  std::string config_path;
  std::string pmf_path;
  std::string lengths_path;
  std::string family;
  int n = 0;
  double zipf_s = 0.0;
  std::string policy = "highest-k";
  int k = 0;  // 0 means unset
  double alpha = -1.0;
  double empty_len = -1.0;
  double lambda = 1.0;
  int k_min = 0;
  int k_max = 0;
  std::vector<double> alpha_grid;
  std::vector<double> c_grid;
  long long cycles = 1000000;
  unsigned long long seed = 1;
  int jobs = 1;
  std::string out_dir = ".";
  bool normalize_pmf = false;
  bool emit_plot_data = false;
  double trajectory = 0.0;  // horizon; 0 disables the trajectory cross-check
  bool record_events = false;
  int top_n = 10;
  agecode::SolverSettings settings;
};

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string json_number_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

std::string json_string_array(const std::vector<std::string>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += "\"" + json_escape(v[i]) + "\"";
  }
  return s + "]";
}

std::string dash_join(const agecode::SelectionSet& sel) {
  std::string s;
  for (std::size_t i = 0; i < sel.indices().size(); ++i) {
    if (i) s += "-";
    s += std::to_string(sel.indices()[i]);
  }
  return s;
}

// Config file fills only the fields the command line left untouched.
void apply_config(const json& cfg, CLI::App& app, Options& opt) {
  auto unset = [&](const char* flag) {
    const CLI::Option* o = app.get_option_no_throw(flag);
    return o == nullptr || o->count() == 0;
  };
  auto load = [&](const char* key, const char* flag, auto& target) {
    if (cfg.contains(key) && unset(flag)) cfg.at(key).get_to(target);
  };
  load("pmf", "--pmf", opt.pmf_path);
  load("lengths", "--lengths", opt.lengths_path);
  load("family", "--family", opt.family);
  load("n", "--n", opt.n);
  load("s", "--s", opt.zipf_s);
  load("policy", "--policy", opt.policy);
  load("k", "--k", opt.k);
  load("alpha", "--alpha", opt.alpha);
  load("empty_len", "--empty-len", opt.empty_len);
  load("lambda", "--lambda", opt.lambda);
  load("k_min", "--k-min", opt.k_min);
  load("k_max", "--k-max", opt.k_max);
  load("alpha_grid", "--alpha-grid", opt.alpha_grid);
  load("c_grid", "--c-grid", opt.c_grid);
  load("cycles", "--cycles", opt.cycles);
  load("seed", "--seed", opt.seed);
  load("jobs", "--jobs", opt.jobs);
  load("out", "--out", opt.out_dir);
  load("normalize_pmf", "--normalize-pmf", opt.normalize_pmf);
  load("emit_plot_data", "--emit-plot-data", opt.emit_plot_data);
  load("trajectory", "--trajectory", opt.trajectory);
  load("record_events", "--events", opt.record_events);
  load("top_n", "--top-n", opt.top_n);
  if (cfg.contains("solver")) {
    const json& s = cfg.at("solver");
    if (s.contains("theta_tolerance"))
      s.at("theta_tolerance").get_to(opt.settings.theta_tolerance);
    if (s.contains("kraft_tolerance"))
      s.at("kraft_tolerance").get_to(opt.settings.kraft_tolerance);
    if (s.contains("max_outer_iterations"))
      s.at("max_outer_iterations").get_to(opt.settings.max_outer_iterations);
    if (s.contains("max_inner_iterations"))
      s.at("max_inner_iterations").get_to(opt.settings.max_inner_iterations);
  }
}

agecode::Pmf build_pmf(const Options& opt) {
  if (!opt.pmf_path.empty()) {
    std::vector<double> raw = agecode::load_probability_file(opt.pmf_path);
    if (opt.normalize_pmf) return agecode::normalize_and_sort(raw).pmf;
    return agecode::Pmf(raw);
  }
  if (opt.family.empty())
    throw std::invalid_argument("need --pmf FILE or --family NAME");
  if (opt.n < 1) throw std::invalid_argument("--family needs --n >= 1");
  if (opt.family == "zipf") return agecode::zipf_pmf(opt.n, opt.zipf_s);
  if (opt.family == "dyadic") return agecode::dyadic_pmf(opt.n);
  if (opt.family == "uniform") return agecode::zipf_pmf(opt.n, 0.0);
  throw std::invalid_argument("unknown family '" + opt.family +
                              "' (zipf, dyadic, uniform)");
}

agecode::PolicyConfig build_policy(const Options& opt, int n) {
  agecode::PolicyConfig pc;
  pc.kind = agecode::parse_policy(opt.policy);
  pc.k = opt.k > 0 ? opt.k : n;
  if (pc.kind == agecode::PolicyKind::Randomized) {
    if (opt.alpha < 0.0)
      throw std::invalid_argument("randomized policy needs --alpha");
    pc.alpha = opt.alpha;
  }
  if (pc.kind == agecode::PolicyKind::EmptyNoReset) {
    if (opt.empty_len < 0.0)
      throw std::invalid_argument("empty-noreset policy needs --empty-len");
    pc.empty_len = opt.empty_len;
  }
  return pc;
}

agecode::CodebookSolution solve_for(const agecode::Pmf& pmf,
                                    const agecode::PolicyConfig& pc,
                                    const Options& opt) {
  switch (pc.kind) {
    case agecode::PolicyKind::HighestK:
      return agecode::solve_policy1(pmf, pc.k, opt.lambda, opt.settings);
    case agecode::PolicyKind::Randomized:
      return agecode::solve_policy2(pmf, pc.k, pc.alpha, opt.lambda, opt.settings);
    case agecode::PolicyKind::EmptyNoReset:
      return agecode::solve_policy3_noreset(pmf, pc.k, opt.lambda, pc.empty_len,
                                            opt.settings);
    case agecode::PolicyKind::EmptyReset:
      return agecode::solve_policy3_reset(pmf, pc.k, opt.lambda, opt.settings);
  }
  throw std::invalid_argument("unknown policy");
}

std::string out_path(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return (std::filesystem::path(opt.out_dir) / name).string();
}

std::string policy_echo(const agecode::PolicyConfig& pc, const Options& opt) {
  std::ostringstream os;
  os << "\"policy\": \"" << agecode::policy_name(pc.kind) << "\",\n"
     << "  \"k\": " << pc.k << ",\n";
  if (pc.kind == agecode::PolicyKind::Randomized)
    os << "  \"alpha\": " << format_double(pc.alpha) << ",\n";
  if (pc.kind == agecode::PolicyKind::EmptyNoReset)
    os << "  \"empty_len\": " << format_double(pc.empty_len) << ",\n";
  os << "  \"lambda\": " << format_double(opt.lambda);
  return os.str();
}

int cmd_solve(const Options& opt) {
  agecode::Pmf pmf = build_pmf(opt);
  agecode::PolicyConfig pc = build_policy(opt, static_cast<int>(pmf.size()));
  agecode::CodebookSolution sol = solve_for(pmf, pc, opt);

  std::ostringstream os;
  os << "{\n  " << policy_echo(pc, opt) << ",\n"
     << "  \"theta\": " << format_double(sol.theta) << ",\n"
     << "  \"beta\": " << format_double(sol.beta) << ",\n"
     << "  \"lengths\": " << json_number_array(sol.lengths) << ",\n"
     << "  \"length_mean\": " << format_double(sol.moments.mean) << ",\n"
     << "  \"length_second\": " << format_double(sol.moments.second) << ",\n"
     << "  \"kraft_residual\": " << format_double(sol.kraft_residual) << ",\n"
     << "  \"p_theta_residual\": " << format_double(sol.p_theta_residual) << ",\n"
     << "  \"iterations\": " << sol.iterations << ",\n"
     << "  \"warnings\": " << json_string_array(sol.warnings) << "\n}\n";
  agecode::write_text_file(out_path(opt, "codebook.json"), os.str());
  std::cout << format_double(sol.theta) << "\n";
  for (const std::string& w : sol.warnings) std::cerr << "warning: " << w << "\n";
  return kExitOk;
}

std::string sweep_csv(const agecode::SweepResult& result) {
  std::string csv = "param,age,converged,iterations\n";
  for (const agecode::SweepPoint& p : result.points) {
    csv += format_double(p.param);
    csv += ",";
    csv += p.converged ? format_double(p.age) : "nan";
    csv += ",";
    csv += p.converged ? "1" : "0";
    csv += ",";
    csv += std::to_string(p.iterations);
    csv += "\n";
  }
  return csv;
}

std::string plot_csv(const agecode::SweepResult& result) {
  std::string csv = "param,age\n";
  for (std::size_t i = 0; i < result.grid.size(); ++i)
    csv += format_double(result.grid[i]) + "," + format_double(result.ages[i]) + "\n";
  return csv;
}

int finish_sweep(const agecode::SweepResult& result, const Options& opt) {
  agecode::write_text_file(out_path(opt, "sweep.csv"), sweep_csv(result));
  if (opt.emit_plot_data)
    agecode::write_text_file(out_path(opt, "plot.csv"), plot_csv(result));
  std::cout << "argmin " << format_double(result.argmin_value) << " age "
            << format_double(result.argmin_age) << "\n";
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  return result.warnings.empty() ? kExitOk : kExitPartial;
}

int cmd_sweep_k(const Options& opt) {
  agecode::Pmf pmf = build_pmf(opt);
  int n = static_cast<int>(pmf.size());
  agecode::PolicyConfig pc = build_policy(opt, n);
  bool empty_policy = pc.kind == agecode::PolicyKind::EmptyNoReset ||
                      pc.kind == agecode::PolicyKind::EmptyReset;
  int cap = empty_policy ? n - 1 : n;
  int k_min = opt.k_min > 0 ? opt.k_min : 1;
  int k_max = opt.k_max > 0 ? opt.k_max : cap;
  agecode::SweepResult result = agecode::sweep_k(pmf, opt.lambda, pc, k_min,
                                                 k_max, opt.settings, opt.jobs);
  return finish_sweep(result, opt);
}

int cmd_sweep_alpha(const Options& opt) {
  agecode::Pmf pmf = build_pmf(opt);
  if (opt.k < 1) throw std::invalid_argument("sweep-alpha needs --k");
  std::vector<double> grid =
      opt.alpha_grid.empty() ? agecode::default_alpha_grid() : opt.alpha_grid;
  agecode::SweepResult result = agecode::sweep_alpha(
      pmf, opt.k, opt.lambda, grid, opt.settings, opt.jobs);
  return finish_sweep(result, opt);
}

int cmd_sweep_empty(const Options& opt) {
  agecode::Pmf pmf = build_pmf(opt);
  if (opt.k < 1) throw std::invalid_argument("sweep-empty needs --k");
  std::vector<double> grid =
      opt.c_grid.empty() ? agecode::default_c_grid() : opt.c_grid;
  agecode::SweepResult result = agecode::sweep_empty_length(
      pmf, opt.k, opt.lambda, grid, opt.settings, opt.jobs);
  return finish_sweep(result, opt);
}

int cmd_select(const Options& opt) {
  agecode::Pmf pmf = build_pmf(opt);
  if (opt.k < 1) throw std::invalid_argument("select needs --k");
  agecode::SelectionResult result = agecode::best_selection(
      pmf, opt.k, opt.lambda, opt.settings, opt.jobs, opt.top_n);
  std::string csv = "selection,lambda_e,age\n";
  for (const agecode::SelectionRow& row : result.ranked_table) {
    csv += dash_join(row.selection) + "," + format_double(row.effective_rate) +
           "," + format_double(row.age) + "\n";
  }
  agecode::write_text_file(out_path(opt, "selection.csv"), csv);
  std::cout << dash_join(result.selection) << " "
            << format_double(result.effective_rate) << " "
            << format_double(result.age) << "\n";
  return kExitOk;
}

const char* event_name(agecode::EventKind kind) {
  switch (kind) {
    case agecode::EventKind::ArrivalBlocked: return "arrival-blocked";
    case agecode::EventKind::ArrivalDiscarded: return "arrival-discarded";
    case agecode::EventKind::ServiceStart: return "service-start";
    case agecode::EventKind::DeliveryReset: return "delivery-reset";
    case agecode::EventKind::DeliveryNoReset: return "delivery-noreset";
  }
  return "unknown";
}

int cmd_simulate(const Options& opt) {
  agecode::Pmf pmf = build_pmf(opt);
  agecode::PolicyConfig pc = build_policy(opt, static_cast<int>(pmf.size()));

  agecode::SimConfig sim;
  sim.policy = pc;
  sim.pmf = pmf;
  sim.lambda = opt.lambda;
  sim.cycles = opt.cycles;
  sim.seed = opt.seed;
  sim.jobs = opt.jobs;
  if (!opt.lengths_path.empty()) {
    sim.lengths = agecode::load_probability_file(opt.lengths_path);
  } else {
    sim.lengths = solve_for(pmf, pc, opt).lengths;
  }

  agecode::SimResult result = agecode::simulate_detailed(sim);

  std::ostringstream os;
  os << "{\n  " << policy_echo(pc, opt) << ",\n"
     << "  \"cycles\": " << sim.cycles << ",\n"
     << "  \"seed\": " << sim.seed << ",\n"
     << "  \"lengths\": " << json_number_array(sim.lengths) << ",\n"
     << "  \"mean_age\": " << format_double(result.estimate.mean_age) << ",\n"
     << "  \"half_width_95\": " << format_double(result.estimate.half_width_95)
     << ",\n"
     << "  \"sum_Q\": " << format_double(result.estimate.sum_Q) << ",\n"
     << "  \"sum_Y\": " << format_double(result.estimate.sum_Y) << ",\n"
     << "  \"waiting_mean\": " << format_double(result.samples.waiting_mean)
     << ",\n"
     << "  \"waiting_second\": " << format_double(result.samples.waiting_second)
     << ",\n"
     << "  \"service_mean\": " << format_double(result.samples.service_mean)
     << ",\n"
     << "  \"service_second\": " << format_double(result.samples.service_second);
  if (opt.trajectory > 0.0) {
    agecode::TrajectoryResult traj =
        agecode::simulate_trajectory(sim, opt.trajectory, opt.record_events);
    os << ",\n  \"trajectory\": {\n"
       << "    \"time_average_age\": " << format_double(traj.time_average_age)
       << ",\n"
       << "    \"half_width_95\": " << format_double(traj.half_width_95) << ",\n"
       << "    \"horizon\": " << format_double(traj.horizon) << ",\n"
       << "    \"deliveries\": " << traj.deliveries << "\n  }";
    if (opt.record_events) {
      std::string csv = "time,kind,symbol,age_after\n";
      for (const agecode::TrajectoryEvent& e : traj.events) {
        csv += format_double(e.time);
        csv += ",";
        csv += event_name(e.kind);
        csv += ",";
        csv += std::to_string(e.symbol);
        csv += ",";
        csv += format_double(e.age_after);
        csv += "\n";
      }
      agecode::write_text_file(out_path(opt, "events.csv"), csv);
    }
  }
  os << "\n}\n";
  agecode::write_text_file(out_path(opt, "simulate.json"), os.str());
  std::cout << format_double(result.estimate.mean_age) << " +- "
            << format_double(result.estimate.half_width_95) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"age-optimal selective encoding toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "JSON config; flags override it");
  app.add_option("--pmf", opt.pmf_path, "probability file, one entry per line");
  app.add_option("--lengths", opt.lengths_path,
                 "codeword length file (simulate); default: solve first");
  app.add_option("--family", opt.family, "zipf, dyadic, or uniform");
  app.add_option("--n", opt.n, "alphabet size for --family");
  app.add_option("--s", opt.zipf_s, "zipf exponent");
  app.add_option("--policy", opt.policy,
                 "highest-k, randomized, empty-noreset, empty-reset");
  app.add_option("--k", opt.k, "selection size");
  app.add_option("--alpha", opt.alpha, "tail encoding probability (randomized)");
  app.add_option("--empty-len", opt.empty_len, "empty-symbol bits (empty-noreset)");
  app.add_option("--lambda", opt.lambda, "arrival rate");
  app.add_option("--k-min", opt.k_min, "sweep-k lower bound (default 1)");
  app.add_option("--k-max", opt.k_max, "sweep-k upper bound (default n)");
  app.add_option("--alpha-grid", opt.alpha_grid, "explicit sweep-alpha grid");
  app.add_option("--c-grid", opt.c_grid, "explicit sweep-empty grid");
  app.add_option("--cycles", opt.cycles, "simulation cycles");
  app.add_option("--seed", opt.seed, "simulation seed");
  app.add_option("--jobs", opt.jobs, "worker threads");
  app.add_option("--out", opt.out_dir, "output directory (default .)");
  app.add_flag("--normalize-pmf", opt.normalize_pmf,
               "sort and renormalize the loaded pmf");
  app.add_flag("--emit-plot-data", opt.emit_plot_data,
               "also write plot.csv with converged points only");
  app.add_option("--trajectory", opt.trajectory,
                 "horizon for the trajectory cross-check (simulate)");
  app.add_flag("--events", opt.record_events,
               "write events.csv for the trajectory (simulate)");
  app.add_option("--top-n", opt.top_n, "ranked rows kept by select");

  CLI::App* solve = app.add_subcommand("solve", "optimal codebook for one config");
  CLI::App* sweep_k = app.add_subcommand("sweep-k", "age vs selection size");
  CLI::App* sweep_alpha = app.add_subcommand("sweep-alpha", "age vs alpha");
  CLI::App* sweep_empty =
      app.add_subcommand("sweep-empty", "age vs empty-symbol length");
  CLI::App* select =
      app.add_subcommand("select", "brute-force best k-subset");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!opt.config_path.empty()) {
      std::ifstream in(opt.config_path);
      if (!in) throw std::invalid_argument("cannot open config: " + opt.config_path);
      json cfg = json::parse(in);
      apply_config(cfg, app, opt);
    }
    if (solve->parsed()) return cmd_solve(opt);
    if (sweep_k->parsed()) return cmd_sweep_k(opt);
    if (sweep_alpha->parsed()) return cmd_sweep_alpha(opt);
    if (sweep_empty->parsed()) return cmd_sweep_empty(opt);
    if (select->parsed()) return cmd_select(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const agecode::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
