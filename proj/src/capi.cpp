#include "catsurf/catsurf.h"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "catsurf/blocks.hpp"
#include "catsurf/coupling.hpp"
#include "catsurf/report.hpp"
#include "catsurf/score.hpp"
#include "catsurf/sim.hpp"
#include "catsurf/version.hpp"

struct catsurf_model {
  catsurf::ModelSpec spec;
  std::string description;
};

struct catsurf_scores {
  catsurf::ScoreTable table;
  std::string json;
};

struct catsurf_report {
  std::string json;
  std::string csv;
  std::map<std::string, double> numbers;
};

namespace {

thread_local std::string last_error;

using catsurf::Boundary;
using catsurf::Configuration;
using catsurf::GasCount;

catsurf_status fail(catsurf_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class Fn>
catsurf_status guarded(Fn&& body) {
  try {
    body();
    return CATSURF_OK;
  } catch (const std::invalid_argument& e) {
    return fail(CATSURF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(CATSURF_ERR_OUT_OF_RANGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CATSURF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CATSURF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CATSURF_ERR_INTERNAL, "unknown error");
  }
}

GasCount gas_count(int n) {
  return n == CATSURF_GAS_INFINITE ? GasCount::infinite() : GasCount::finite(n);
}

Boundary boundary_of(catsurf_boundary b) {
  if (b == CATSURF_TORUS) return Boundary::Torus;
  if (b == CATSURF_BLOCKED) return Boundary::Blocked;
  throw std::invalid_argument("unknown boundary");
}

catsurf::ReplicaOptions replica_options(const catsurf_sim_options& o) {
  catsurf::ReplicaOptions r;
  if (o.max_events > 0) r.max_events = o.max_events;
  r.threads = o.threads;
  return r;
}

void publish(std::unique_ptr<catsurf_report> report, catsurf_report** out) {
  *out = report.release();
}

}  // namespace

extern "C" {

const char* catsurf_version(void) { return catsurf::kVersion; }

const char* catsurf_mixer_id(void) { return catsurf::kMixerId.data(); }

const char* catsurf_status_string(catsurf_status status) {
  switch (status) {
    case CATSURF_OK: return "ok";
    case CATSURF_ERR_NULL: return "null argument";
    case CATSURF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CATSURF_ERR_OUT_OF_RANGE: return "out of range";
    case CATSURF_ERR_NOT_FOUND: return "not found";
    case CATSURF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* catsurf_last_error(void) { return last_error.c_str(); }

catsurf_status catsurf_model_create(int n, double p1, catsurf_model** out) {
  if (!out) return fail(CATSURF_ERR_NULL, "output handle is null");
  return guarded([&] {
    auto spec = catsurf::ModelSpec::equal_others(gas_count(n), p1);
    *out = new catsurf_model{spec, spec.describe()};
  });
}

catsurf_status catsurf_model_create_rates(const double* rates, size_t count, catsurf_model** out) {
  if (!out || !rates) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    auto spec = catsurf::ModelSpec::finite(std::vector<double>(rates, rates + count));
    *out = new catsurf_model{spec, spec.describe()};
  });
}

const char* catsurf_model_describe(const catsurf_model* model) {
  return model ? model->description.c_str() : "";
}

void catsurf_model_destroy(catsurf_model* model) { delete model; }

catsurf_status catsurf_scores_table1(catsurf_scores** out) {
  if (!out) return fail(CATSURF_ERR_NULL, "output handle is null");
  return guarded([&] { *out = new catsurf_scores{catsurf::ScoreTable::table1(), {}}; });
}

catsurf_status catsurf_scores_zeros(int length, int n, catsurf_scores** out) {
  if (!out) return fail(CATSURF_ERR_NULL, "output handle is null");
  return guarded(
      [&] { *out = new catsurf_scores{catsurf::ScoreTable::zeros(length, gas_count(n)), {}}; });
}

catsurf_status catsurf_scores_from_json(const char* json, catsurf_scores** out) {
  if (!out || !json) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] { *out = new catsurf_scores{catsurf::scores_from_json(json), {}}; });
}

catsurf_status catsurf_scores_get(const catsurf_scores* scores, const char* block,
                                  double* value) {
  if (!scores || !block || !value) return fail(CATSURF_ERR_NULL, "null argument");
  bool missing = false;
  auto status = guarded([&] {
    auto found = scores->table.find(catsurf::CanonicalBlock::parse(block));
    missing = !found;
    if (found) *value = *found;
  });
  if (status == CATSURF_OK && missing) {
    return fail(CATSURF_ERR_NOT_FOUND, std::string("no score for block '") + block + "'");
  }
  return status;
}

catsurf_status catsurf_scores_set(catsurf_scores* scores, const char* block, double value) {
  if (!scores || !block) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] { scores->table.set(catsurf::CanonicalBlock::parse(block), value); });
}

const char* catsurf_scores_json(catsurf_scores* scores) {
  if (!scores) return "";
  scores->json = catsurf::scores_json(scores->table);
  return scores->json.c_str();
}

void catsurf_scores_destroy(catsurf_scores* scores) { delete scores; }

const char* catsurf_report_json(const catsurf_report* report) {
  return report ? report->json.c_str() : "";
}

const char* catsurf_report_csv(const catsurf_report* report) {
  return report ? report->csv.c_str() : "";
}

catsurf_status catsurf_report_number(const catsurf_report* report, const char* key,
                                     double* value) {
  if (!report || !key || !value) return fail(CATSURF_ERR_NULL, "null argument");
  auto it = report->numbers.find(key);
  if (it == report->numbers.end())
    return fail(CATSURF_ERR_NOT_FOUND, std::string("report has no value '") + key + "'");
  *value = it->second;
  return CATSURF_OK;
}

void catsurf_report_destroy(catsurf_report* report) { delete report; }

catsurf_status catsurf_apply_arrival(const char* config, catsurf_boundary boundary, size_t site,
                                     uint64_t gas, int prefer_left, catsurf_report** out) {
  if (!config || !out) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    auto c = Configuration::parse(config, boundary_of(boundary));
    auto order = prefer_left ? catsurf::NeighborOrder::left_first()
                             : catsurf::NeighborOrder::right_first();
    auto r = catsurf::apply_arrival(c, site, gas, order);
    auto report = std::make_unique<catsurf_report>();
    report->numbers["kind"] = static_cast<double>(r.kind);
    report->numbers["victim"] = r.victim ? static_cast<double>(*r.victim) : -1.0;
    report->json = std::string("{\n  \"kind\": \"") + std::string(catsurf::to_string(r.kind)) +
                   "\",\n  \"victim\": " +
                   (r.victim ? std::to_string(*r.victim) : std::string("null")) +
                   ",\n  \"result\": \"" + r.result.str() + "\"\n}";
    report->csv = "kind,victim,result\n" + std::string(catsurf::to_string(r.kind)) + ',' +
                  (r.victim ? std::to_string(*r.victim) : std::string()) + ',' +
                  r.result.str() + '\n';
    publish(std::move(report), out);
  });
}

catsurf_status catsurf_weight(const char* config, const catsurf_scores* scores, double* value) {
  if (!config || !scores || !value) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    *value = catsurf::weight(Configuration::parse(config, Boundary::Blocked), scores->table)
                 .weight;
  });
}

catsurf_status catsurf_verify_certificate(const catsurf_model* model, int length,
                                          const catsurf_scores* scores, int followers,
                                          catsurf_report** out) {
  if (!model || !scores || !out) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    catsurf::RateModel rates{model->spec.gas_count(), model->spec.p1()};
    if (!(scores->table.gas_count() == rates.n))
      throw std::invalid_argument("score table was built for a different gas count");
    auto cert = catsurf::verify_certificate(rates, length, scores->table, followers);
    auto report = std::make_unique<catsurf_report>();
    report->json = catsurf::certificate_json(cert);
    report->csv = catsurf::certificate_csv(cert);
    report->numbers["c"] = cert.c;
    report->numbers["positive"] = cert.positive() ? 1.0 : 0.0;
    publish(std::move(report), out);
  });
}

void catsurf_solve_options_init(catsurf_solve_options* options) {
  if (!options) return;
  catsurf::SolverConfig d;
  options->n = d.n.value();
  options->length = d.length;
  options->p1 = d.p1;
  options->tolerance = d.tolerance;
  options->max_sweeps = d.max_sweeps;
  options->followers = d.followers;
  options->damping = d.damping;
}

catsurf_status catsurf_solve_scores(const catsurf_solve_options* options, catsurf_report** out,
                                    catsurf_scores** scores) {
  if (!options || !out) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    catsurf::SolverConfig cfg;
    cfg.n = gas_count(options->n);
    cfg.length = options->length;
    cfg.p1 = options->p1;
    cfg.tolerance = options->tolerance;
    cfg.max_sweeps = options->max_sweeps;
    cfg.followers = options->followers;
    cfg.damping = options->damping;
    auto result = catsurf::fixed_point_solve(cfg);
    auto report = std::make_unique<catsurf_report>();
    report->json = catsurf::solve_json(cfg, result);
    report->csv = catsurf::solve_csv(result);
    report->numbers["converged"] = result.converged ? 1.0 : 0.0;
    report->numbers["sweeps"] = result.sweeps;
    report->numbers["reference_drift"] = result.reference_drift;
    report->numbers["certified"] = result.converged && result.reference_drift > 0.0 ? 1.0 : 0.0;
    std::unique_ptr<catsurf_scores> table;
    if (scores) table.reset(new catsurf_scores{result.scores, {}});
    publish(std::move(report), out);
    if (scores) *scores = table.release();
  });
}

catsurf_status catsurf_threshold(int n, int length, int followers, double tolerance,
                                 int max_sweeps, catsurf_report** out) {
  if (!out) return fail(CATSURF_ERR_NULL, "output handle is null");
  return guarded([&] {
    auto result =
        catsurf::threshold_search(gas_count(n), length, followers, tolerance, max_sweeps);
    auto report = std::make_unique<catsurf_report>();
    report->json = catsurf::threshold_json(result);
    report->csv = catsurf::threshold_csv(result);
    report->numbers["p1_star"] =
        result.p1_star.value_or(std::numeric_limits<double>::quiet_NaN());
    report->numbers["found"] = result.p1_star ? 1.0 : 0.0;
    publish(std::move(report), out);
  });
}

void catsurf_sim_options_init(catsurf_sim_options* options) {
  if (!options) return;
  options->size = 64;
  options->boundary = CATSURF_TORUS;
  options->runs = 100;
  options->seed = 1;
  options->max_events = 0;
  options->threads = 0;
}

catsurf_status catsurf_simulate(const catsurf_model* model, const catsurf_sim_options* options,
                                catsurf_report** out) {
  if (!model || !options || !out) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    const Boundary b = boundary_of(options->boundary);
    auto est = catsurf::estimate_absorption(model->spec, options->size, b, options->runs,
                                            {options->seed}, replica_options(*options));
    auto report = std::make_unique<catsurf_report>();
    report->json = catsurf::absorption_json(model->spec, options->size, b, est);
    report->csv = catsurf::absorption_csv(model->spec, est);
    report->numbers["gas1_frequency"] = est.gas_one_frequency();
    report->numbers["gas1_stderr"] = est.gas_one_stderr();
    report->numbers["undecided_frequency"] = est.undecided_frequency();
    report->numbers["mean_time"] = est.mean_time;
    publish(std::move(report), out);
  });
}

catsurf_status catsurf_trajectory(const catsurf_model* model, const char* initial,
                                  catsurf_boundary boundary, uint64_t seed, double max_time,
                                  uint64_t max_events, uint64_t log_stride,
                                  catsurf_report** out) {
  if (!model || !initial || !out) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    catsurf::StopRule stop;
    if (max_time > 0.0) stop.max_time = max_time;
    if (max_events > 0) stop.max_events = max_events;
    auto t = catsurf::run(model->spec, Configuration::parse(initial, boundary_of(boundary)),
                          {seed}, stop, log_stride);
    auto report = std::make_unique<catsurf_report>();
    report->json = catsurf::trajectory_json(t);
    report->csv = catsurf::trajectory_csv(t);
    report->numbers["events"] = static_cast<double>(t.events);
    report->numbers["time"] = t.time;
    report->numbers["absorbed"] = t.absorbed ? static_cast<double>(*t.absorbed) : -1.0;
    report->numbers["fingerprint_hi"] = static_cast<double>(t.fingerprint >> 32);
    report->numbers["fingerprint_lo"] = static_cast<double>(t.fingerprint & 0xffffffffULL);
    publish(std::move(report), out);
  });
}

catsurf_status catsurf_sweep(int n, const double* grid, size_t count,
                             const catsurf_sim_options* options, catsurf_report** out) {
  if (!options || !out || (count > 0 && !grid)) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    auto r = catsurf::sweep(gas_count(n), std::vector<double>(grid, grid + count), options->size,
                            boundary_of(options->boundary), options->runs, {options->seed},
                            replica_options(*options));
    auto report = std::make_unique<catsurf_report>();
    report->json = catsurf::sweep_json(r);
    report->csv = catsurf::sweep_csv(r);
    report->numbers["inversions"] = static_cast<double>(r.inversions);
    report->numbers["crossing"] = r.crossing.value_or(std::numeric_limits<double>::quiet_NaN());
    publish(std::move(report), out);
  });
}

catsurf_status catsurf_empirical_drift(const catsurf_model* model, const char* initial,
                                       const catsurf_scores* scores, double horizon,
                                       uint64_t replicas, uint64_t seed, unsigned threads,
                                       catsurf_report** out) {
  if (!model || !initial || !scores || !out) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    auto est = catsurf::empirical_drift(model->spec,
                                        Configuration::parse(initial, Boundary::Blocked),
                                        scores->table, horizon, replicas, {seed}, threads);
    auto report = std::make_unique<catsurf_report>();
    report->json = catsurf::drift_json(model->spec, est);
    report->csv = catsurf::drift_csv(est);
    report->numbers["naive_mean"] = est.naive_mean;
    report->numbers["naive_stderr"] = est.naive_stderr;
    report->numbers["compensator_mean"] = est.compensator_mean;
    report->numbers["compensator_stderr"] = est.compensator_stderr;
    report->numbers["initial_generator_drift"] = est.initial_generator_drift;
    publish(std::move(report), out);
  });
}

catsurf_status catsurf_couple_replay(const char* script, const char* initial_a,
                                     const char* initial_b, catsurf_boundary boundary,
                                     catsurf_report** out) {
  if (!script || !initial_a || !initial_b || !out) return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    const Boundary b = boundary_of(boundary);
    auto states = catsurf::replay({Configuration::parse(initial_a, b),
                                   Configuration::parse(initial_b, b)},
                                  catsurf::parse_script(script));
    auto report = std::make_unique<catsurf_report>();
    report->json = catsurf::replay_json(states);
    report->csv = catsurf::replay_csv(states);
    report->numbers["steps"] = static_cast<double>(states.size() - 1);
    report->numbers["violations"] =
        static_cast<double>(catsurf::monotonicity_check(states.back()).size());
    publish(std::move(report), out);
  });
}

catsurf_status catsurf_couple_mc(const uint64_t* gas_a, const uint64_t* gas_b,
                                 const double* probabilities, size_t count, size_t size,
                                 catsurf_boundary boundary, double horizon, uint64_t runs,
                                 uint64_t seed, unsigned threads, catsurf_report** out) {
  if (!out || (count > 0 && (!gas_a || !gas_b || !probabilities)))
    return fail(CATSURF_ERR_NULL, "null argument");
  return guarded([&] {
    catsurf::JointArrivalLaw law = catsurf::JointArrivalLaw::counterexample();
    if (count > 0) {
      std::vector<catsurf::GasPair> pairs;
      for (size_t i = 0; i < count; ++i) pairs.emplace_back(gas_a[i], gas_b[i]);
      law = catsurf::JointArrivalLaw(std::move(pairs),
                                     std::vector<double>(probabilities, probabilities + count));
    }
    auto r = catsurf::violation_frequency(law, size, boundary_of(boundary), horizon, runs, {seed},
                                          threads);
    auto report = std::make_unique<catsurf_report>();
    report->json = catsurf::violation_json(law, size, horizon, r);
    report->csv = catsurf::violation_csv(r);
    report->numbers["fraction"] = r.fraction();
    report->numbers["violating"] = static_cast<double>(r.violating);
    report->numbers["runs"] = static_cast<double>(r.runs);
    publish(std::move(report), out);
  });
}

}  // extern "C"
