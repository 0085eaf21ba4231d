#pragma once

// Event-driven continuous-time simulation. Each site carries a unit-rate
// arrival clock; a global priority queue keyed by next-arrival time picks the
// next event, whose gas and tie-break order come from that site's stream.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <string_view>
#include <vector>

#include "catsurf/blocks.hpp"
#include "catsurf/model.hpp"
#include "catsurf/rng.hpp"

namespace catsurf {

struct StopRule {
  bool on_absorption = true;
  /// Unbounded when empty.
  std::optional<double> max_time;
  /// 10^4 x lattice size when empty.
  std::optional<std::uint64_t> max_events;

  std::uint64_t event_budget(std::size_t size) const;
};

enum class StopReason { Absorbed, MaxTime, MaxEvents };

std::string_view to_string(StopReason r);

struct EventRecord {
  double time = 0.0;
  std::uint32_t site = 0;
  State type = kVacant;
  OutcomeKind kind = OutcomeKind::Noop;
  /// Site vacated by a reaction, or -1.
  std::int64_t victim = -1;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Runs one trajectory event by event. In the infinite-gas variant fresh
/// molecules get identifiers from a per-run counter.
class Simulator {
 public:
  /// Throws std::invalid_argument on an inadmissible configuration.
  Simulator(const ModelSpec& spec, Configuration initial, MasterSeed seed);

  const ModelSpec& spec() const { return spec_; }
  const Configuration& config() const { return config_; }
  /// Time of the last executed event (0 before the first).
  double time() const { return time_; }
  double next_time() const { return queue_.top().time; }
  /// Site of the next event.
  std::size_t next_site() const { return queue_.top().site; }
  std::uint64_t events() const { return events_; }
  std::optional<State> absorbed() const;
  /// FNV-1a digest of every executed event.
  std::uint64_t fingerprint() const { return fingerprint_; }

  EventRecord step();

 private:
  struct Pending {
    double time;
    std::size_t site;
    bool operator>(const Pending& o) const {
      return time != o.time ? time > o.time : site > o.site;
    }
  };

  std::size_t bucket(State s) const;
  void recount(State before, State after);

  ModelSpec spec_;
  Configuration config_;
  std::vector<SiteStream> streams_;
  std::vector<Arrival> pending_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
  std::vector<std::size_t> counts_;
  State next_id_ = 2;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  std::uint64_t fingerprint_;
};

struct Trajectory {
  ModelSpec spec = ModelSpec::equal_others(2, 0.5);
  Configuration initial;
  MasterSeed seed;
  StopRule stop;
  /// Every log_stride-th event; empty when log_stride is 0.
  std::vector<EventRecord> log;
  std::uint64_t log_stride = 0;
  Configuration final;
  std::optional<State> absorbed;
  StopReason reason = StopReason::MaxEvents;
  double time = 0.0;
  std::uint64_t events = 0;
  std::uint64_t fingerprint = 0;
};

/// Throws std::invalid_argument on a zero budget or a bad configuration.
Trajectory run(const ModelSpec& spec, const Configuration& initial, MasterSeed seed,
               const StopRule& stop = {}, std::uint64_t log_stride = 0);

struct AbsorptionEstimate {
  std::uint64_t runs = 0;
  /// Finite variant: index g-1 counts absorption into gas g. Infinite
  /// variant: {gas 1, any other molecule}.
  std::vector<std::uint64_t> absorbed;
  std::uint64_t undecided = 0;
  /// Over absorbed runs only; 0 when none absorbed.
  double mean_time = 0.0;
  double mean_events = 0.0;

  double frequency(std::size_t index) const;
  double gas_one_frequency() const { return frequency(0); }
  /// Binomial standard error of gas_one_frequency.
  double gas_one_stderr() const;
  double undecided_frequency() const;
};

struct ReplicaOptions {
  /// 10^4 x size when empty.
  std::optional<std::uint64_t> max_events;
  /// 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Seed of replica `r` derived from a master seed.
MasterSeed replica_seed(MasterSeed seed, std::uint64_t r);

/// Independent runs from all-0. Results do not depend on the thread count.
AbsorptionEstimate estimate_absorption(const ModelSpec& spec, std::size_t size,
                                       Boundary boundary, std::uint64_t runs, MasterSeed seed,
                                       const ReplicaOptions& options = {});

struct SweepRow {
  double p1 = 0.0;
  AbsorptionEstimate estimate;
};

struct SweepReport {
  GasCount n = GasCount::finite(2);
  std::size_t size = 0;
  Boundary boundary = Boundary::Torus;
  std::vector<SweepRow> rows;
  /// Adjacent grid pairs whose gas-1 frequency decreases as p1 increases.
  std::size_t inversions = 0;
  /// Linear interpolation of the first 50% crossing of the gas-1 frequency.
  std::optional<double> crossing;
};

SweepReport sweep(GasCount n, const std::vector<double>& grid, std::size_t size,
                  Boundary boundary, std::uint64_t runs, MasterSeed seed,
                  const ReplicaOptions& options = {});

/// W with the all-1 configuration read as a 1-run of the whole lattice
/// followed by vacant sites, so growth to all-1 stays finite.
double capped_weight(const Configuration& config, const ScoreTable& table);

/// Exact generator applied to the capped weight at a concrete configuration
/// on a blocked lattice.
double generator_drift(const Configuration& config, const ModelSpec& spec,
                       const ScoreTable& table);

struct DriftEstimate {
  std::uint64_t replicas = 0;
  double horizon = 0.0;
  double initial_weight = 0.0;
  double initial_generator_drift = 0.0;
  /// (W(h) - W(0)) / h averaged over replicas.
  double naive_mean = 0.0;
  double naive_stderr = 0.0;
  /// (1/h) * integral of the generator drift along each trajectory. Same
  /// expectation as the naive estimator, much smaller variance.
  double compensator_mean = 0.0;
  double compensator_stderr = 0.0;

  /// 95% normal-approximation intervals.
  std::pair<double, double> naive_interval() const;
  std::pair<double, double> compensator_interval() const;
};

/// Requires a blocked lattice whose origin starts a 1-run of length >= 2,
/// horizon > 0 and replicas >= 1; throws std::invalid_argument otherwise.
DriftEstimate empirical_drift(const ModelSpec& spec, const Configuration& initial,
                              const ScoreTable& table, double horizon, std::uint64_t replicas,
                              MasterSeed seed, unsigned threads = 0);

struct DiagnosticSample {
  double time = 0.0;
  double weight = 0.0;
  double u = 0.0;
  std::size_t block_len = 0;
};

struct DiagnosticsSeries {
  double epsilon = 0.0;
  std::vector<DiagnosticSample> samples;
  /// Set when the origin block died; values are frozen from then on.
  std::optional<double> stopped_at;
};

/// W(eta_t) and U_t = 1 - (1 - epsilon)^W sampled after every event that
/// touches the frontier and at multiples of `interval`.
DiagnosticsSeries weight_diagnostics(const ModelSpec& spec, const Configuration& initial,
                                     const ScoreTable& table, MasterSeed seed, double horizon,
                                     double epsilon, double interval);

}  // namespace catsurf
