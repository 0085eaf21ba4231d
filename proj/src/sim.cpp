#include "catsurf/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"

namespace catsurf {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr std::uint64_t kReplicaTag = 0x7265706c;  // "repl"
constexpr std::uint64_t kSweepTag = 0x73776570;    // "swep"

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
}

}  // namespace

std::uint64_t StopRule::event_budget(std::size_t size) const {
  return max_events ? *max_events : static_cast<std::uint64_t>(10000) * size;
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Absorbed: return "absorbed";
    case StopReason::MaxTime: return "max_time";
    case StopReason::MaxEvents: return "undecided";
  }
  return "?";
}

Simulator::Simulator(const ModelSpec& spec, Configuration initial, MasterSeed seed)
    : spec_(spec), config_(std::move(initial)), fingerprint_(kFnvOffset) {
  if (auto problem = check_configuration(config_, spec_)) throw std::invalid_argument(*problem);
  const std::size_t n = config_.size();
  streams_.reserve(n);
  pending_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    streams_.push_back(derive_stream(seed, i, spec_));
    pending_.push_back(next_arrival(streams_.back(), spec_));
    queue_.push({pending_.back().time, i});
  }
  counts_.assign(spec_.is_infinite() ? 3 : spec_.rates().size() + 1, 0);
  for (State s : config_.sites()) {
    ++counts_[bucket(s)];
    if (spec_.is_infinite()) next_id_ = std::max(next_id_, s + 1);
  }
}

std::size_t Simulator::bucket(State s) const {
  if (spec_.is_infinite()) return static_cast<std::size_t>(std::min<State>(s, 2));
  return static_cast<std::size_t>(s);
}

void Simulator::recount(State before, State after) {
  --counts_[bucket(before)];
  ++counts_[bucket(after)];
}

std::optional<State> Simulator::absorbed() const {
  const std::size_t n = config_.size();
  if (n == 0 || config_[0] == kVacant) return std::nullopt;
  // In the infinite variant two sites never share a non-1 identifier, so the
  // bucket count only decides absorption for gas 1 or a single site.
  if (counts_[bucket(config_[0])] != n) return std::nullopt;
  if (spec_.is_infinite() && config_[0] != kGasOne && n > 1) return std::nullopt;
  return config_[0];
}

EventRecord Simulator::step() {
  const std::size_t site = queue_.top().site;
  queue_.pop();
  Arrival a = pending_[site];
  pending_[site] = next_arrival(streams_[site], spec_);
  queue_.push({pending_[site].time, site});
  if (a.type == kFreshMolecule) a.type = next_id_++;

  const State before = config_[site];
  auto left = config_.neighbor(site, -1);
  auto right = config_.neighbor(site, +1);
  const State left_state = left ? config_[*left] : kVacant;
  const State right_state = right ? config_[*right] : kVacant;

  ArrivalEffect effect = apply_arrival_in_place(config_, site, a.type, a.order);
  EventRecord rec{a.time, static_cast<std::uint32_t>(site), a.type, effect.kind, -1};
  if (effect.kind == OutcomeKind::Stick) {
    recount(before, a.type);
  } else if (effect.kind == OutcomeKind::React) {
    const std::size_t v = *effect.victim;
    rec.victim = static_cast<std::int64_t>(v);
    recount(left && *left == v ? left_state : right_state, kVacant);
  }
  time_ = a.time;
  ++events_;
  fnv_mix(fingerprint_, std::bit_cast<std::uint64_t>(rec.time));
  fnv_mix(fingerprint_, rec.site);
  fnv_mix(fingerprint_, rec.type);
  fnv_mix(fingerprint_, static_cast<std::uint64_t>(rec.kind));
  fnv_mix(fingerprint_, static_cast<std::uint64_t>(rec.victim));
  return rec;
}

Trajectory run(const ModelSpec& spec, const Configuration& initial, MasterSeed seed,
               const StopRule& stop, std::uint64_t log_stride) {
  if (initial.size() == 0) throw std::invalid_argument("lattice must have at least one site");
  if (stop.max_events && *stop.max_events == 0)
    throw std::invalid_argument("event budget must be positive");
  if (stop.max_time && !(*stop.max_time > 0.0))
    throw std::invalid_argument("time budget must be positive");

  Simulator sim(spec, initial, seed);
  Trajectory t;
  t.spec = spec;
  t.initial = initial;
  t.seed = seed;
  t.stop = stop;
  t.log_stride = log_stride;
  const std::uint64_t budget = stop.event_budget(initial.size());

  auto finish = [&](StopReason reason, double time) {
    t.reason = reason;
    t.time = time;
    t.final = sim.config();
    t.absorbed = sim.absorbed();
    t.events = sim.events();
    t.fingerprint = sim.fingerprint();
    return t;
  };

  if (stop.on_absorption && sim.absorbed()) return finish(StopReason::Absorbed, 0.0);
  while (sim.events() < budget) {
    if (stop.max_time && sim.next_time() > *stop.max_time)
      return finish(StopReason::MaxTime, *stop.max_time);
    EventRecord rec = sim.step();
    if (log_stride > 0 && sim.events() % log_stride == 0) t.log.push_back(rec);
    if (stop.on_absorption && rec.kind == OutcomeKind::Stick && sim.absorbed())
      return finish(StopReason::Absorbed, sim.time());
  }
  return finish(StopReason::MaxEvents, sim.time());
}

double AbsorptionEstimate::frequency(std::size_t index) const {
  if (runs == 0 || index >= absorbed.size()) return 0.0;
  return static_cast<double>(absorbed[index]) / static_cast<double>(runs);
}

double AbsorptionEstimate::gas_one_stderr() const {
  if (runs == 0) return 0.0;
  double f = gas_one_frequency();
  return std::sqrt(f * (1.0 - f) / static_cast<double>(runs));
}

double AbsorptionEstimate::undecided_frequency() const {
  return runs == 0 ? 0.0 : static_cast<double>(undecided) / static_cast<double>(runs);
}

MasterSeed replica_seed(MasterSeed seed, std::uint64_t r) {
  return {derive_seed(seed.value, r, kReplicaTag)};
}

AbsorptionEstimate estimate_absorption(const ModelSpec& spec, std::size_t size,
                                       Boundary boundary, std::uint64_t runs, MasterSeed seed,
                                       const ReplicaOptions& options) {
  if (runs == 0) throw std::invalid_argument("runs must be at least 1");
  if (size == 0) throw std::invalid_argument("lattice must have at least one site");
  StopRule stop;
  stop.max_events = options.max_events;
  const Configuration initial = Configuration::uniform(size, kVacant, boundary);

  struct Outcome {
    std::optional<State> absorbed;
    double time = 0.0;
    std::uint64_t events = 0;
  };
  std::vector<Outcome> outcomes(runs);
  detail::parallel_for(runs, options.threads, [&](std::uint64_t r) {
    Trajectory t = run(spec, initial, replica_seed(seed, r), stop);
    outcomes[r] = {t.absorbed, t.time, t.events};
  });

  AbsorptionEstimate est;
  est.runs = runs;
  est.absorbed.assign(spec.is_infinite() ? 2 : spec.rates().size(), 0);
  double time_sum = 0.0, event_sum = 0.0;
  std::uint64_t decided = 0;
  for (const Outcome& o : outcomes) {
    event_sum += static_cast<double>(o.events);
    if (!o.absorbed) {
      ++est.undecided;
      continue;
    }
    const State g = *o.absorbed;
    ++est.absorbed[spec.is_infinite() ? (g == kGasOne ? 0 : 1) : g - 1];
    time_sum += o.time;
    ++decided;
  }
  est.mean_time = decided ? time_sum / static_cast<double>(decided) : 0.0;
  est.mean_events = event_sum / static_cast<double>(runs);
  return est;
}

SweepReport sweep(GasCount n, const std::vector<double>& grid, std::size_t size,
                  Boundary boundary, std::uint64_t runs, MasterSeed seed,
                  const ReplicaOptions& options) {
  if (grid.empty()) throw std::invalid_argument("p1 grid is empty");
  for (double p : grid)
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("grid values must lie in (0,1)");

  SweepReport report;
  report.n = n;
  report.size = size;
  report.boundary = boundary;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    MasterSeed point{derive_seed(seed.value, i, kSweepTag)};
    report.rows.push_back(
        {grid[i], estimate_absorption(ModelSpec::equal_others(n, grid[i]), size, boundary,
                                      runs, point, options)});
  }

  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const auto& lo = report.rows[order[k]];
    const auto& hi = report.rows[order[k + 1]];
    const double f0 = lo.estimate.gas_one_frequency(), f1 = hi.estimate.gas_one_frequency();
    if (f1 < f0) ++report.inversions;
    if (!report.crossing && f0 < 0.5 && f1 >= 0.5)
      report.crossing = lo.p1 + (0.5 - f0) * (hi.p1 - lo.p1) / (f1 - f0);
  }
  return report;
}

double capped_weight(const Configuration& config, const ScoreTable& table) {
  if (is_absorbing(config) == kGasOne) {
    std::vector<State> vacant(static_cast<std::size_t>(table.length()), kVacant);
    return static_cast<double>(config.size()) +
           table.at(CanonicalBlock::canonicalize(vacant));
  }
  return weight(config, table).weight;
}

double generator_drift(const Configuration& config, const ModelSpec& spec,
                       const ScoreTable& table) {
  if (config.boundary() != Boundary::Blocked)
    throw std::invalid_argument("drift needs a blocked (half-line) configuration");
  if (config.size() == 0 || config[0] != kGasOne)
    throw std::invalid_argument("drift needs a nonempty 1-run at the origin");
  if (is_absorbing(config)) return 0.0;

  std::size_t run = 0;
  while (config[run] == kGasOne) ++run;
  const double w0 = weight(config, table).weight;
  const std::size_t last =
      std::min(config.size() - 1, run + static_cast<std::size_t>(table.length()) + 1);

  std::vector<std::pair<State, double>> arrivals;
  if (spec.is_infinite()) {
    State fresh = 2;
    for (State s : config.sites()) fresh = std::max(fresh, s + 1);
    arrivals = {{kGasOne, spec.p1()}, {fresh, 1.0 - spec.p1()}};
  } else {
    for (std::size_t g = 0; g < spec.rates().size(); ++g)
      arrivals.emplace_back(static_cast<State>(g + 1), spec.rates()[g]);
  }

  double total = 0.0;
  Configuration scratch = config;
  for (std::size_t s = run; s <= last; ++s) {
    if (config[s] != kVacant) continue;
    for (auto [gas, rate] : arrivals) {
      if (rate == 0.0) continue;
      for (NeighborOrder order : {NeighborOrder::left_first(), NeighborOrder::right_first()}) {
        ArrivalEffect e = apply_arrival_in_place(scratch, s, gas, order);
        if (e.kind != OutcomeKind::Noop)
          total += 0.5 * rate * (capped_weight(scratch, table) - w0);
        scratch[s] = config[s];
        if (e.victim) scratch[*e.victim] = config[*e.victim];
      }
    }
  }
  return total;
}

std::pair<double, double> DriftEstimate::naive_interval() const {
  return {naive_mean - 1.96 * naive_stderr, naive_mean + 1.96 * naive_stderr};
}

std::pair<double, double> DriftEstimate::compensator_interval() const {
  return {compensator_mean - 1.96 * compensator_stderr,
          compensator_mean + 1.96 * compensator_stderr};
}

namespace {

std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

DriftEstimate empirical_drift(const ModelSpec& spec, const Configuration& initial,
                              const ScoreTable& table, double horizon, std::uint64_t replicas,
                              MasterSeed seed, unsigned threads) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (replicas == 0) throw std::invalid_argument("replicas must be at least 1");
  if (initial.boundary() != Boundary::Blocked)
    throw std::invalid_argument("empirical drift needs a blocked lattice");
  if (initial.size() < 2 || initial[0] != kGasOne || initial[1] != kGasOne)
    throw std::invalid_argument("initial configuration needs a 1-run of length >= 2 at site 0");
  if (auto problem = check_configuration(initial, spec)) throw std::invalid_argument(*problem);

  DriftEstimate est;
  est.replicas = replicas;
  est.horizon = horizon;
  est.initial_weight = capped_weight(initial, table);
  est.initial_generator_drift = generator_drift(initial, spec, table);

  std::vector<double> naive(replicas), compensator(replicas);
  detail::parallel_for(replicas, threads, [&](std::uint64_t r) {
    Simulator sim(spec, initial, replica_seed(seed, r));
    double t = 0.0, integral = 0.0;
    double w = est.initial_weight, lw = est.initial_generator_drift;
    // The process is stopped when the origin block dies.
    while (sim.next_time() <= horizon) {
      const double next = sim.next_time();
      integral += lw * (next - t);
      t = next;
      if (sim.step().kind == OutcomeKind::Noop) continue;
      w = capped_weight(sim.config(), table);
      if (sim.config()[0] != kGasOne) {
        lw = 0.0;
        break;
      }
      lw = generator_drift(sim.config(), spec, table);
    }
    integral += lw * (horizon - t);
    naive[r] = (w - est.initial_weight) / horizon;
    compensator[r] = integral / horizon;
  });

  std::tie(est.naive_mean, est.naive_stderr) = mean_and_stderr(naive);
  std::tie(est.compensator_mean, est.compensator_stderr) = mean_and_stderr(compensator);
  return est;
}

DiagnosticsSeries weight_diagnostics(const ModelSpec& spec, const Configuration& initial,
                                     const ScoreTable& table, MasterSeed seed, double horizon,
                                     double epsilon, double interval) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
  if (!(interval > 0.0)) throw std::invalid_argument("sampling interval must be positive");
  if (initial.boundary() != Boundary::Blocked || initial.size() == 0 ||
      initial[0] != kGasOne)
    throw std::invalid_argument("diagnostics need a blocked lattice with a 1 at site 0");

  DiagnosticsSeries series;
  series.epsilon = epsilon;
  Simulator sim(spec, initial, seed);
  const auto reach = static_cast<std::size_t>(table.length()) + 1;

  WeightReport current = weight(sim.config(), table);
  auto sample = [&](double time) {
    DiagnosticSample s;
    s.time = time;
    s.weight = current.weight;
    s.u = std::isinf(current.weight) ? 1.0 : 1.0 - std::pow(1.0 - epsilon, current.weight);
    s.block_len = current.block_len.value_or(sim.config().size());
    series.samples.push_back(s);
  };

  sample(0.0);
  double next_tick = interval;
  while (!series.stopped_at && !std::isinf(current.weight) && sim.next_time() <= horizon) {
    while (next_tick < sim.next_time() && next_tick <= horizon) {
      sample(next_tick);
      next_tick += interval;
    }
    const std::size_t frontier = current.first_zero + reach;
    EventRecord rec = sim.step();
    if (rec.kind == OutcomeKind::Noop) continue;
    const bool touches = rec.site <= frontier ||
                         (rec.victim >= 0 && static_cast<std::size_t>(rec.victim) <= frontier);
    if (!touches) continue;
    current = weight(sim.config(), table);
    sample(rec.time);
    if (current.block_len == std::size_t{0}) series.stopped_at = rec.time;
  }
  for (; next_tick <= horizon; next_tick += interval) sample(next_tick);
  return series;
}

}  // namespace catsurf
