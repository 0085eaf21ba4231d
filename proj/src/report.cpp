#include "catsurf/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace catsurf {

using json = nlohmann::ordered_json;

namespace {

std::string hex64(std::uint64_t x) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

json rates_json(const ModelSpec& spec) {
  json j;
  j["n"] = spec.gas_count().str();
  j["p1"] = spec.p1();
  j["rates"] = spec.rates();
  return j;
}

json worst_case_json(const WorstCase& w) {
  json j;
  j["block"] = w.block.str();
  j["worst_case"] = w.value;
  j["argmin"] = w.argmin;
  j["scenario_min"] = w.scenario_min;
  json sites = json::array();
  for (const auto& s : w.site_minima)
    sites.push_back({{"offset", s.offset}, {"value", s.value}, {"scenario", s.scenario}});
  j["site_minima"] = std::move(sites);
  return j;
}

void absorption_fields(std::ostringstream& out, double p1, const AbsorptionEstimate& e) {
  out << format_number(p1) << ',' << e.runs << ',' << format_number(e.gas_one_frequency()) << ','
      << format_number(e.gas_one_stderr()) << ',' << format_number(e.undecided_frequency())
      << ',' << format_number(e.mean_time) << ',' << format_number(e.mean_events);
}

json absorption_object(const AbsorptionEstimate& e) {
  json j;
  j["runs"] = e.runs;
  j["absorbed"] = e.absorbed;
  j["undecided"] = e.undecided;
  j["gas1_frequency"] = e.gas_one_frequency();
  j["gas1_stderr"] = e.gas_one_stderr();
  j["mean_time"] = e.mean_time;
  j["mean_events"] = e.mean_events;
  return j;
}

constexpr const char* kSweepProtocol =
    "start all-0; stop at absorption or 10^4 x size events (reported undecided)";

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

std::string scores_json(const ScoreTable& table) {
  json j;
  j["length"] = table.length();
  j["n"] = table.gas_count().str();
  json scores = json::object();
  for (const auto& [b, s] : table.entries()) scores[b.str()] = s;
  j["scores"] = std::move(scores);
  return j.dump(2);
}

ScoreTable scores_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    const int length = j.at("length").get<int>();
    const std::string n = j.at("n").get<std::string>();
    const GasCount count = n == "inf" ? GasCount::infinite() : GasCount::finite(std::stoi(n));
    ScoreTable table = ScoreTable::zeros(length, count);
    std::size_t seen = 0;
    for (const auto& [block, score] : j.at("scores").items()) {
      table.set(CanonicalBlock::parse(block), score.get<double>());
      ++seen;
    }
    if (seen != table.entries().size())
      throw std::invalid_argument("score table lists " + std::to_string(seen) + " of " +
                                  std::to_string(table.entries().size()) + " blocks");
    return table;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad score table: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument(std::string("bad score table: ") + e.what());
  }
}

std::string certificate_json(const Certificate& cert) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = cert.rates.n.str();
  j["p1"] = cert.rates.p1;
  j["length"] = cert.length;
  j["followers"] = cert.followers;
  j["completion"] = cert.completion == CompletionKind::Pessimistic ? "pessimistic" : "values";
  j["verdict"] = cert.positive() ? "POSITIVE" : "NEGATIVE";
  j["c"] = cert.c;
  json scores = json::object();
  for (const auto& [b, v] : cert.scores.entries()) scores[b.str()] = v;
  j["scores"] = std::move(scores);
  json blocks = json::array();
  for (const auto& w : cert.blocks) {
    json b = worst_case_json(w);
    b["score"] = cert.scores.at(w.block);
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);
  return j.dump(2);
}

std::string certificate_csv(const Certificate& cert) {
  std::ostringstream out;
  out << "block,score,worst_case,argmin,scenario_min\n";
  for (const auto& w : cert.blocks)
    out << w.block.str() << ',' << format_number(cert.scores.at(w.block)) << ','
        << format_number(w.value) << ',' << w.argmin << ',' << format_number(w.scenario_min)
        << '\n';
  return out.str();
}

std::string solve_json(const SolverConfig& config, const SolveResult& result) {
  json j;
  j["n"] = config.n.str();
  j["length"] = config.length;
  j["p1"] = config.p1;
  j["followers"] = config.effective_followers();
  j["tolerance"] = config.tolerance;
  j["max_sweeps"] = config.max_sweeps;
  j["converged"] = result.converged;
  j["sweeps"] = result.sweeps;
  j["last_change"] = result.last_change;
  j["reference_block"] = result.scores.reference().str();
  j["reference_drift"] = result.reference_drift;
  j["certified"] = result.converged && result.reference_drift > 0.0;
  json scores = json::object();
  for (const auto& [b, s] : result.scores.entries()) scores[b.str()] = s;
  j["scores"] = std::move(scores);
  return j.dump(2);
}

std::string solve_csv(const SolveResult& result) {
  std::ostringstream out;
  out << "block,score,residual\n";
  std::size_t i = 0;
  for (const auto& [b, s] : result.scores.entries()) {
    out << b.str() << ',' << format_number(s) << ','
        << (i < result.residuals.size() ? format_number(result.residuals[i]) : "") << '\n';
    ++i;
  }
  return out.str();
}

std::string threshold_json(const ThresholdResult& result) {
  json j;
  j["n"] = result.n.str();
  j["length"] = result.length;
  j["followers"] = result.followers;
  j["tolerance"] = result.tolerance;
  j["p1_star"] = result.p1_star ? json(*result.p1_star) : json(nullptr);
  j["steps"] = result.history.size();
  return j.dump(2);
}

std::string threshold_csv(const ThresholdResult& result) {
  std::ostringstream out;
  out << "step,p1,converged,reference_drift,certified,lo,hi\n";
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    const auto& s = result.history[i];
    out << i << ',' << format_number(s.p1) << ',' << (s.converged ? 1 : 0) << ','
        << format_number(s.reference_drift) << ',' << (s.certified ? 1 : 0) << ','
        << format_number(s.lo) << ',' << format_number(s.hi) << '\n';
  }
  return out.str();
}

std::string absorption_json(const ModelSpec& spec, std::size_t size, Boundary boundary,
                            const AbsorptionEstimate& est) {
  json j;
  j["model"] = rates_json(spec);
  j["size"] = size;
  j["boundary"] = std::string(to_string(boundary));
  j["protocol"] = kSweepProtocol;
  j["result"] = absorption_object(est);
  return j.dump(2);
}

std::string absorption_csv(const ModelSpec& spec, const AbsorptionEstimate& est) {
  std::ostringstream out;
  out << "p1,runs,gas1_frequency,gas1_stderr,undecided_frequency,mean_time,mean_events";
  for (std::size_t g = 0; g < est.absorbed.size(); ++g)
    out << ",absorbed_" << (spec.is_infinite() && g == 1 ? std::string("other")
                                                           : std::to_string(g + 1));
  out << '\n';
  absorption_fields(out, spec.p1(), est);
  for (auto c : est.absorbed) out << ',' << c;
  out << '\n';
  return out.str();
}

std::string sweep_json(const SweepReport& report) {
  json j;
  j["n"] = report.n.str();
  j["size"] = report.size;
  j["boundary"] = std::string(to_string(report.boundary));
  j["protocol"] = kSweepProtocol;
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row = absorption_object(r.estimate);
    row["p1"] = r.p1;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["trend"] = report.inversions == 0 ? "nondecreasing" : "not monotone";
  j["inversions"] = report.inversions;
  j["crossing_50"] = report.crossing ? json(*report.crossing) : json(nullptr);
  return j.dump(2);
}

std::string sweep_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "p1,runs,gas1_frequency,gas1_stderr,undecided_frequency,mean_time,mean_events\n";
  for (const auto& r : report.rows) {
    absorption_fields(out, r.p1, r.estimate);
    out << '\n';
  }
  return out.str();
}

std::string trajectory_json(const Trajectory& t) {
  json j;
  j["model"] = rates_json(t.spec);
  j["boundary"] = std::string(to_string(t.initial.boundary()));
  j["initial"] = t.initial.str();
  j["seed"] = t.seed.value;
  j["final"] = t.final.str();
  j["absorbed"] = t.absorbed ? json(*t.absorbed) : json(nullptr);
  j["reason"] = std::string(to_string(t.reason));
  j["time"] = t.time;
  j["events"] = t.events;
  j["log_stride"] = t.log_stride;
  j["fingerprint"] = hex64(t.fingerprint);
  return j.dump(2);
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream out;
  out << "time,site,type,outcome,victim\n";
  for (const auto& e : t.log)
    out << format_number(e.time) << ',' << e.site << ',' << e.type << ',' << to_string(e.kind)
        << ',' << (e.victim >= 0 ? std::to_string(e.victim) : std::string()) << '\n';
  return out.str();
}

std::string drift_json(const ModelSpec& spec, const DriftEstimate& est) {
  json j;
  j["model"] = rates_json(spec);
  j["replicas"] = est.replicas;
  j["horizon"] = est.horizon;
  j["initial_weight"] = est.initial_weight;
  j["initial_generator_drift"] = est.initial_generator_drift;
  auto [nl, nh] = est.naive_interval();
  auto [cl, ch] = est.compensator_interval();
  j["naive"] = {{"mean", est.naive_mean}, {"stderr", est.naive_stderr}, {"ci95", {nl, nh}}};
  j["compensator"] = {
      {"mean", est.compensator_mean}, {"stderr", est.compensator_stderr}, {"ci95", {cl, ch}}};
  j["positive_95"] = cl > 0.0;
  return j.dump(2);
}

std::string drift_csv(const DriftEstimate& est) {
  std::ostringstream out;
  out << "estimator,mean,stderr,ci_low,ci_high\n";
  auto [nl, nh] = est.naive_interval();
  auto [cl, ch] = est.compensator_interval();
  out << "naive," << format_number(est.naive_mean) << ',' << format_number(est.naive_stderr)
      << ',' << format_number(nl) << ',' << format_number(nh) << '\n';
  out << "compensator," << format_number(est.compensator_mean) << ','
      << format_number(est.compensator_stderr) << ',' << format_number(cl) << ','
      << format_number(ch) << '\n';
  return out.str();
}

std::string replay_json(const std::vector<CoupledState>& states) {
  json j;
  json steps = json::array();
  for (const auto& s : states)
    steps.push_back({{"a", s.a.str()}, {"b", s.b.str()}, {"violations", monotonicity_check(s)}});
  j["states"] = std::move(steps);
  if (!states.empty()) {
    j["final"] = {{"a", states.back().a.str()}, {"b", states.back().b.str()}};
    j["violations"] = monotonicity_check(states.back());
  }
  return j.dump(2);
}

std::string replay_csv(const std::vector<CoupledState>& states) {
  std::ostringstream out;
  out << "step,a,b,violations\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    out << i << ',' << states[i].a.str() << ',' << states[i].b.str() << ',';
    auto v = monotonicity_check(states[i]);
    for (std::size_t k = 0; k < v.size(); ++k) out << (k ? ";" : "") << v[k];
    out << '\n';
  }
  return out.str();
}

std::string violation_json(const JointArrivalLaw& law, std::size_t size, double horizon,
                           const ViolationReport& report) {
  json j;
  json pairs = json::array();
  for (std::size_t i = 0; i < law.pairs().size(); ++i)
    pairs.push_back({{"a", law.pairs()[i].first},
                     {"b", law.pairs()[i].second},
                     {"p", law.probabilities()[i]}});
  j["law"] = std::move(pairs);
  j["marginal_a"] = law.marginal(0);
  j["marginal_b"] = law.marginal(1);
  j["size"] = size;
  j["horizon"] = horizon;
  j["runs"] = report.runs;
  j["violating"] = report.violating;
  j["fraction"] = report.fraction();
  j["mean_first_violation"] = report.mean_first_violation;
  return j.dump(2);
}

std::string violation_csv(const ViolationReport& report) {
  std::ostringstream out;
  out << "runs,violating,fraction,mean_first_violation\n"
      << report.runs << ',' << report.violating << ',' << format_number(report.fraction()) << ','
      << format_number(report.mean_first_violation) << '\n';
  return out.str();
}

}  // namespace catsurf
