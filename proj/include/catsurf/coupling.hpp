#pragma once

// Two systems driven by the same arrival locations, times and tie-break
// orders, with gas types drawn jointly from a law on ordered pairs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "catsurf/model.hpp"
#include "catsurf/rng.hpp"

namespace catsurf {

using GasPair = std::pair<State, State>;

class JointArrivalLaw {
 public:
  /// Throws std::invalid_argument on probabilities outside [0,1], a sum away
  /// from 1 by more than 1e-12, a zero gas or a repeated pair.
  JointArrivalLaw(std::vector<GasPair> pairs, std::vector<double> probabilities);

  /// p(2,2) = p(3,3) = 1/4, p(1,1) = 1/3, p(2,1) = p(3,1) = 1/12: marginals
  /// (1/3, 1/3, 1/3) and (1/2, 1/4, 1/4).
  static JointArrivalLaw counterexample();
  /// Both coordinates draw the same gas from `spec`.
  static JointArrivalLaw diagonal(const ModelSpec& spec);

  const std::vector<GasPair>& pairs() const { return pairs_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  bool supports(GasPair pair) const;
  std::size_t gas_count() const;
  /// Rate vector of coordinate 0 (A) or 1 (B), padded to gas_count().
  std::vector<double> marginal(int coordinate) const;

 private:
  std::vector<GasPair> pairs_;
  std::vector<double> probabilities_;
};

struct CoupledState {
  Configuration a;
  Configuration b;

  friend bool operator==(const CoupledState&, const CoupledState&) = default;
};

/// Throws std::invalid_argument unless both sides have equal size and
/// boundary and satisfy the adjacency invariant.
void check_coupled(const CoupledState& state);

/// Applies the arrival to each system at the same site with its own gas and
/// the same neighbour order.
CoupledState coupled_arrival(const CoupledState& state, std::size_t site, GasPair pair,
                             NeighborOrder order);

struct ScriptEvent {
  std::size_t site = 0;
  GasPair pair;
  NeighborOrder order;
};

/// One event per line: `site pair_a pair_b order` with order L or R. Blank
/// lines and lines starting with '#' are skipped. Throws std::invalid_argument
/// with the offending line number.
std::vector<ScriptEvent> parse_script(std::string_view text);
std::string format_script(const std::vector<ScriptEvent>& script);

/// The initial state followed by the state after each event.
std::vector<CoupledState> replay(const CoupledState& initial,
                                 const std::vector<ScriptEvent>& script);

/// Sites where A holds a 1 and B does not.
std::vector<std::size_t> monotonicity_check(const CoupledState& state);

struct CoupledRun {
  CoupledState final;
  double time = 0.0;
  std::uint64_t events = 0;
  /// Time of the first monotonicity violation, if any.
  std::optional<double> first_violation;
  std::optional<State> absorbed_a;
  std::optional<State> absorbed_b;
};

/// Event-driven coupled trajectory until `horizon`, until both systems are
/// absorbed or until `max_events`.
CoupledRun run_coupled(const JointArrivalLaw& law, const CoupledState& initial,
                       MasterSeed seed, double horizon, std::uint64_t max_events);

struct ViolationReport {
  std::uint64_t runs = 0;
  std::uint64_t violating = 0;
  double fraction() const {
    return runs ? static_cast<double>(violating) / static_cast<double>(runs) : 0.0;
  }
  /// Over violating runs.
  double mean_first_violation = 0.0;
};

/// Fraction of coupled runs from all-0 with at least one violation before
/// `horizon`.
ViolationReport violation_frequency(const JointArrivalLaw& law, std::size_t size,
                                    Boundary boundary, double horizon, std::uint64_t runs,
                                    MasterSeed seed, unsigned threads = 0);

}  // namespace catsurf
