// Command-line front end. Links only the C interface of the shared library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "catsurf/catsurf.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kMetadataSchema = 1;
const auto kStart = std::chrono::steady_clock::now();

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReportDeleter {
  void operator()(catsurf_report* r) const { catsurf_report_destroy(r); }
};
struct ModelDeleter {
  void operator()(catsurf_model* m) const { catsurf_model_destroy(m); }
};
struct ScoresDeleter {
  void operator()(catsurf_scores* s) const { catsurf_scores_destroy(s); }
};
using Report = std::unique_ptr<catsurf_report, ReportDeleter>;
using Model = std::unique_ptr<catsurf_model, ModelDeleter>;
using Scores = std::unique_ptr<catsurf_scores, ScoresDeleter>;

void check(catsurf_status status) {
  if (status != CATSURF_OK)
    throw UsageError(std::string(catsurf_status_string(status)) + ": " + catsurf_last_error());
}

double number(const Report& r, const char* key) {
  double v = 0.0;
  check(catsurf_report_number(r.get(), key, &v));
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int parse_gas_count(const std::string& text) {
  if (text == "inf") return CATSURF_GAS_INFINITE;
  try {
    std::size_t used = 0;
    int n = std::stoi(text, &used);
    if (used == text.size() && n >= 2) return n;
  } catch (const std::exception&) {
  }
  throw UsageError("gas count must be an integer >= 2 or 'inf', got '" + text + "'");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number list: '" + text + "'");
    }
  }
  return out;
}

catsurf_boundary parse_boundary(const std::string& text) {
  if (text == "torus") return CATSURF_TORUS;
  if (text == "blocked") return CATSURF_BLOCKED;
  throw UsageError("boundary must be torus or blocked");
}

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 1;
  std::string out;
  bool json = false;
  std::string config;
  unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--out", c.out, "Directory for CSV, JSON and metadata files");
  sub->add_flag("--json", c.json, "Print the JSON result instead of CSV");
  sub->add_option("--config", c.config, "File of `key = value` lines; flags win");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

// Fills options not given on the command line from the config file.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  for (const auto& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
    if (!opt) throw UsageError("unknown config key '" + item.name + "'");
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

ordered_json effective_config(CLI::App* sub) {
  ordered_json cfg = ordered_json::object();
  std::istringstream text(sub->config_to_str(true, false));
  for (const auto& item : CLI::ConfigINI().from_config(text)) {
    if (item.name == "config") continue;
    cfg[item.name] = item.inputs.size() == 1 ? ordered_json(item.inputs[0])
                                             : ordered_json(item.inputs);
  }
  return cfg;
}

struct Emitter {
  CLI::App* sub;
  const Common& common;

  void emit(const Report& report, const std::string& protocol = {}) const {
    const std::string json = catsurf_report_json(report.get());
    const std::string csv = catsurf_report_csv(report.get());
    if (common.json)
      std::cout << json << '\n';
    else
      std::cout << csv;
    if (common.out.empty()) return;

    fs::create_directories(common.out);
    const std::string base = (fs::path(common.out) / sub->get_name()).string();
    write(base + ".csv", csv);
    write(base + ".json", json + "\n");

    ordered_json meta;
    meta["schema_version"] = kMetadataSchema;
    meta["tool"] = "catsurf";
    meta["version"] = catsurf_version();
    meta["subcommand"] = sub->get_name();
    meta["seed"] = common.seed;
    meta["mixer"] = catsurf_mixer_id();
    meta["config"] = effective_config(sub);
    if (!protocol.empty()) meta["protocol"] = protocol;
    meta["outputs"] = {sub->get_name() + ".csv", sub->get_name() + ".json"};
    meta["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - kStart).count();
    write(base + ".meta.json", meta.dump(2) + "\n");
  }

  static void write(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f << body;
  }
};

Model make_model(const std::string& n, double p1, const std::string& rates) {
  catsurf_model* m = nullptr;
  if (!rates.empty()) {
    auto r = parse_list(rates);
    check(catsurf_model_create_rates(r.data(), r.size(), &m));
  } else {
    check(catsurf_model_create(parse_gas_count(n), p1, &m));
  }
  return Model(m);
}

Scores load_scores(const std::string& path) {
  catsurf_scores* s = nullptr;
  if (path.empty())
    check(catsurf_scores_table1(&s));
  else
    check(catsurf_scores_from_json(read_file(path).c_str(), &s));
  return Scores(s);
}

void summary(const char* format, double value) {
  std::fprintf(stderr, format, value);
  std::fputc('\n', stderr);
}

constexpr const char* kSweepProtocol =
    "start all-0; stop at absorption or max-events (default 10^4 x size), reported undecided";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Catalytic surface model: drift certificates, score solving, simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(catsurf_version()));

  Common common;
  int result = kExitOk;
  std::function<void()> action;

  // verify-table1
  auto* verify = app.add_subcommand("verify-table1", "Check the drift certificate for a score table");
  std::string v_n = "4", v_scores;
  double v_p1 = 0.47;
  int v_len = 3, v_k = 6;
  verify->add_option("--n", v_n, "Gas count or inf")->capture_default_str();
  verify->add_option("--p1", v_p1, "Rate of gas 1")->capture_default_str();
  verify->add_option("--L", v_len, "Block length")->capture_default_str();
  verify->add_option("--followers", v_k, "Follower bound K")->capture_default_str();
  verify->add_option("--scores", v_scores, "Score table JSON (default: published length-3 table)");
  verify->footer("CSV columns: block,score,worst_case,argmin,scenario_min\nExit 2 when c <= 0.");
  add_common(verify, common);
  verify->callback([&] {
    action = [&] {
      Model model = make_model(v_n, v_p1, {});
      Scores scores = load_scores(v_scores);
      catsurf_report* r = nullptr;
      check(catsurf_verify_certificate(model.get(), v_len, scores.get(), v_k, &r));
      Report report(r);
      Emitter{verify, common}.emit(report);
      summary("c = %.6g", number(report, "c"));
      std::fprintf(stderr, "verdict %s\n", number(report, "positive") > 0 ? "POSITIVE" : "NEGATIVE");
      if (number(report, "positive") == 0) result = kExitCheckFailed;
    };
  });

  // solve-scores
  auto* solve = app.add_subcommand("solve-scores", "Solve the score fixed point at one p1");
  catsurf_solve_options s_opt;
  catsurf_solve_options_init(&s_opt);
  std::string s_n = "4";
  solve->add_option("--n", s_n, "Gas count or inf")->capture_default_str();
  solve->add_option("--L", s_opt.length, "Block length")->capture_default_str();
  solve->add_option("--p1", s_opt.p1, "Rate of gas 1")->capture_default_str();
  solve->add_option("--tol", s_opt.tolerance, "Convergence tolerance")->capture_default_str();
  solve->add_option("--max-sweeps", s_opt.max_sweeps, "Sweep budget")->capture_default_str();
  solve->add_option("--followers", s_opt.followers, "Follower bound K (0 = L + 3)")
      ->capture_default_str();
  solve->add_option("--damping", s_opt.damping, "Step fraction in (0,1]")->capture_default_str();
  solve->footer("CSV columns: block,score,residual\nExit 2 unless converged with a positive "
                "reference-block drift.");
  add_common(solve, common);
  solve->callback([&] {
    action = [&] {
      s_opt.n = parse_gas_count(s_n);
      catsurf_report* r = nullptr;
      check(catsurf_solve_scores(&s_opt, &r, nullptr));
      Report report(r);
      Emitter{solve, common}.emit(report);
      summary("sweeps = %.0f", number(report, "sweeps"));
      summary("reference drift = %.6g", number(report, "reference_drift"));
      if (number(report, "certified") == 0) result = kExitCheckFailed;
    };
  });

  // threshold
  auto* threshold = app.add_subcommand("threshold", "Bisect for the smallest certified p1");
  std::string t_n = "4";
  int t_len = 3, t_k = 0, t_sweeps = 10000;
  double t_tol = 1e-4;
  threshold->add_option("--n", t_n, "Gas count or inf")->capture_default_str();
  threshold->add_option("--L", t_len, "Block length")->capture_default_str();
  threshold->add_option("--followers", t_k, "Follower bound K (0 = L + 3)")->capture_default_str();
  threshold->add_option("--tol", t_tol, "Bisection tolerance (>= 1e-4)")->capture_default_str();
  threshold->add_option("--max-sweeps", t_sweeps, "Sweep budget per solve")->capture_default_str();
  threshold->footer("CSV columns: step,p1,converged,reference_drift,certified,lo,hi\n"
                    "Exit 2 when no p1 below 0.999 certifies.");
  add_common(threshold, common);
  threshold->callback([&] {
    action = [&] {
      catsurf_report* r = nullptr;
      check(catsurf_threshold(parse_gas_count(t_n), t_len, t_k, t_tol, t_sweeps, &r));
      Report report(r);
      Emitter{threshold, common}.emit(report);
      if (number(report, "found") == 0) {
        std::fprintf(stderr, "no certified p1 found\n");
        result = kExitCheckFailed;
      } else {
        summary("p1* = %.5f", number(report, "p1_star"));
      }
    };
  });

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Absorption statistics or a single trajectory");
  std::string m_n = "4", m_rates, m_boundary = "torus", m_initial;
  double m_p1 = 0.47, m_max_time = 0.0;
  catsurf_sim_options m_opt;
  catsurf_sim_options_init(&m_opt);
  bool m_trajectory = false;
  std::uint64_t m_stride = 1;
  simulate->add_option("--n", m_n, "Gas count or inf")->capture_default_str();
  simulate->add_option("--p1", m_p1, "Rate of gas 1 (others share the rest)")->capture_default_str();
  simulate->add_option("--rates", m_rates, "Full rate vector p1,...,pn (overrides --n/--p1)");
  simulate->add_option("--size", m_opt.size, "Lattice size")->capture_default_str();
  simulate->add_option("--boundary", m_boundary, "torus or blocked")->capture_default_str();
  simulate->add_option("--runs", m_opt.runs, "Independent runs")->capture_default_str();
  simulate->add_option("--max-events", m_opt.max_events, "Event budget per run (0 = 10^4 x size)")
      ->capture_default_str();
  simulate->add_flag("--trajectory", m_trajectory, "Run one trajectory and log its events");
  simulate->add_option("--initial", m_initial, "Initial configuration digits (trajectory mode)");
  simulate->add_option("--max-time", m_max_time, "Time budget (trajectory mode, 0 = none)")
      ->capture_default_str();
  simulate->add_option("--log-stride", m_stride, "Keep every k-th event (trajectory mode)")
      ->capture_default_str();
  simulate->footer(
      "CSV columns: p1,runs,gas1_frequency,gas1_stderr,undecided_frequency,mean_time,"
      "mean_events,absorbed_1..absorbed_n\n"
      "Trajectory mode CSV columns: time,site,type,outcome,victim");
  add_common(simulate, common);
  simulate->callback([&] {
    action = [&] {
      Model model = make_model(m_n, m_p1, m_rates);
      m_opt.boundary = parse_boundary(m_boundary);
      m_opt.seed = common.seed;
      m_opt.threads = common.threads;
      catsurf_report* r = nullptr;
      if (m_trajectory) {
        std::string initial = m_initial.empty() ? std::string(m_opt.size, '0') : m_initial;
        check(catsurf_trajectory(model.get(), initial.c_str(), m_opt.boundary, common.seed,
                                 m_max_time, m_opt.max_events, m_stride, &r));
        Report report(r);
        Emitter{simulate, common}.emit(report);
        summary("events = %.0f", number(report, "events"));
        return;
      }
      check(catsurf_simulate(model.get(), &m_opt, &r));
      Report report(r);
      Emitter{simulate, common}.emit(report, kSweepProtocol);
      summary("gas-1 absorption frequency = %.4f", number(report, "gas1_frequency"));
    };
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Gas-1 absorption frequency over a p1 grid");
  std::string w_n = "4", w_grid = "0.34,0.36,0.38,0.40,0.42", w_boundary = "torus";
  catsurf_sim_options w_opt;
  catsurf_sim_options_init(&w_opt);
  w_opt.size = 256;
  w_opt.runs = 50;
  sweep->add_option("--n", w_n, "Gas count or inf")->capture_default_str();
  sweep->add_option("--grid", w_grid, "Comma-separated p1 values")->capture_default_str();
  sweep->add_option("--size", w_opt.size, "Lattice size")->capture_default_str();
  sweep->add_option("--boundary", w_boundary, "torus or blocked")->capture_default_str();
  sweep->add_option("--runs", w_opt.runs, "Runs per grid point")->capture_default_str();
  sweep->add_option("--max-events", w_opt.max_events, "Event budget per run (0 = 10^4 x size)")
      ->capture_default_str();
  sweep->footer("CSV columns: p1,runs,gas1_frequency,gas1_stderr,undecided_frequency,mean_time,"
                "mean_events");
  add_common(sweep, common);
  sweep->callback([&] {
    action = [&] {
      auto grid = parse_list(w_grid);
      w_opt.boundary = parse_boundary(w_boundary);
      w_opt.seed = common.seed;
      w_opt.threads = common.threads;
      catsurf_report* r = nullptr;
      check(catsurf_sweep(parse_gas_count(w_n), grid.data(), grid.size(), &w_opt, &r));
      Report report(r);
      Emitter{sweep, common}.emit(report, kSweepProtocol);
      const double crossing = number(report, "crossing");
      if (std::isnan(crossing))
        std::fprintf(stderr, "no 50%% crossing inside the grid\n");
      else
        summary("50%% crossing near p1 = %.4f", crossing);
      summary("trend inversions = %.0f", number(report, "inversions"));
    };
  });

  // drift
  auto* drift = app.add_subcommand("drift", "Empirical drift of W from a frontier configuration");
  std::string d_n = "4", d_rates, d_scores;
  std::string d_initial = "110" + std::string(37, '2');
  double d_p1 = 0.47, d_horizon = 0.2;
  std::uint64_t d_replicas = 10000;
  drift->add_option("--n", d_n, "Gas count or inf")->capture_default_str();
  drift->add_option("--p1", d_p1, "Rate of gas 1")->capture_default_str();
  drift->add_option("--rates", d_rates, "Full rate vector (overrides --n/--p1)");
  drift->add_option("--initial", d_initial, "Blocked initial configuration")->capture_default_str();
  drift->add_option("--horizon", d_horizon, "Time horizon")->capture_default_str();
  drift->add_option("--replicas", d_replicas, "Replicas")->capture_default_str();
  drift->add_option("--scores", d_scores, "Score table JSON (default: published table)");
  drift->footer("CSV columns: estimator,mean,stderr,ci_low,ci_high\n"
                "Exit 2 unless the compensator interval lies above 0.");
  add_common(drift, common);
  drift->callback([&] {
    action = [&] {
      Model model = make_model(d_n, d_p1, d_rates);
      Scores scores = load_scores(d_scores);
      catsurf_report* r = nullptr;
      check(catsurf_empirical_drift(model.get(), d_initial.c_str(), scores.get(), d_horizon,
                                    d_replicas, common.seed, common.threads, &r));
      Report report(r);
      Emitter{drift, common}.emit(report);
      const double mean = number(report, "compensator_mean");
      const double se = number(report, "compensator_stderr");
      summary("drift (compensator) = %.6g", mean);
      if (!(mean - 1.96 * se > 0.0)) result = kExitCheckFailed;
    };
  });

  // couple-replay
  auto* replay = app.add_subcommand("couple-replay", "Replay a coupled arrival script");
  std::string r_script, r_a, r_b, r_boundary = "blocked";
  std::size_t r_size = 10;
  replay->add_option("--script", r_script, "Script file: `site pair_a pair_b L|R` per line")
      ->required();
  replay->add_option("--size", r_size, "Lattice size when no initial state is given")
      ->capture_default_str();
  replay->add_option("--initial-a", r_a, "Initial configuration of system A (default all-0)");
  replay->add_option("--initial-b", r_b, "Initial configuration of system B (default all-0)");
  replay->add_option("--boundary", r_boundary, "torus or blocked")->capture_default_str();
  replay->footer("CSV columns: step,a,b,violations");
  add_common(replay, common);
  replay->callback([&] {
    action = [&] {
      const std::string script = read_file(r_script);
      const std::string a = r_a.empty() ? std::string(r_size, '0') : r_a;
      const std::string b = r_b.empty() ? std::string(r_size, '0') : r_b;
      catsurf_report* r = nullptr;
      check(catsurf_couple_replay(script.c_str(), a.c_str(), b.c_str(),
                                  parse_boundary(r_boundary), &r));
      Report report(r);
      Emitter{replay, common}.emit(report);
      summary("violating sites at the end: %.0f", number(report, "violations"));
    };
  });

  // couple-mc
  auto* mc = app.add_subcommand("couple-mc", "Monte Carlo frequency of monotonicity violations");
  std::string c_law, c_boundary = "torus";
  std::size_t c_size = 32;
  double c_horizon = 50.0;
  std::uint64_t c_runs = 200;
  mc->add_option("--law", c_law,
                 "Joint law a:b:p,... (default p(2,2)=p(3,3)=1/4, p(1,1)=1/3, "
                 "p(2,1)=p(3,1)=1/12)");
  mc->add_option("--size", c_size, "Lattice size")->capture_default_str();
  mc->add_option("--boundary", c_boundary, "torus or blocked")->capture_default_str();
  mc->add_option("--horizon", c_horizon, "Time horizon")->capture_default_str();
  mc->add_option("--runs", c_runs, "Runs")->capture_default_str();
  mc->footer("CSV columns: runs,violating,fraction,mean_first_violation");
  add_common(mc, common);
  mc->callback([&] {
    action = [&] {
      std::vector<std::uint64_t> ga, gb;
      std::vector<double> probs;
      std::stringstream in(c_law);
      std::string item;
      while (std::getline(in, item, ',')) {
        unsigned long long a = 0, b = 0;
        double p = 0.0;
        if (std::sscanf(item.c_str(), "%llu:%llu:%lf", &a, &b, &p) != 3)
          throw UsageError("law entries must look like a:b:p, got '" + item + "'");
        ga.push_back(a);
        gb.push_back(b);
        probs.push_back(p);
      }
      catsurf_report* r = nullptr;
      check(catsurf_couple_mc(ga.data(), gb.data(), probs.data(), probs.size(), c_size,
                              parse_boundary(c_boundary), c_horizon, c_runs, common.seed,
                              common.threads, &r));
      Report report(r);
      Emitter{mc, common}.emit(report);
      summary("violation frequency = %.4f", number(report, "fraction"));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) apply_config(sub, common.config);
    action();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return result;
}
