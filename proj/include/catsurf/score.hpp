#pragma once

// Drift certificates for the weight function W on the half-line.
//
// The frontier seen by the certificate is
//
//     ... 1 1 | 0 | b_1 .. b_L | f_1 .. f_K
//
// a run of at least two 1s, the vacant site that ends it, a canonical block
// of length L and K follower symbols. The drift of W is the generator applied
// to W: a sum over arrival sites and gases of rate x (change in W). Only
// arrivals at the leading 0, at vacant block sites and at f_1 can change W.
//
// Every quantity is affine in the score table, so the engine works with
// LinearForm values and only plugs scores in at the end.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catsurf/blocks.hpp"
#include "catsurf/model.hpp"

namespace catsurf {

/// Gas 1 at rate p1, every other gas at (1 - p1)/(n - 1); in the infinite
/// variant one fresh molecule at rate 1 - p1.
struct RateModel {
  GasCount n = GasCount::finite(2);
  double p1 = 0.5;

  /// Rate of each individual non-1 gas.
  double other_rate() const;
};

/// constant + sum coefficient * score[index], indices into a block list.
class LinearForm {
 public:
  LinearForm() = default;
  explicit LinearForm(double constant) : constant_(constant) {}

  double constant() const { return constant_; }
  const std::vector<std::pair<std::uint32_t, double>>& terms() const { return terms_; }

  void add_constant(double c) { constant_ += c; }
  void add_term(std::uint32_t index, double coefficient);
  void add(const LinearForm& other, double scale = 1.0);

  double coefficient(std::uint32_t index) const;
  double evaluate(std::span<const double> scores) const;

  friend bool operator==(const LinearForm&, const LinearForm&) = default;

 private:
  double constant_ = 0.0;
  std::vector<std::pair<std::uint32_t, double>> terms_;  // sorted, merged, nonzero
};

enum class CompletionKind { Pessimistic, Values };

/// How to read sites beyond the follower string. Pessimistic scores any
/// window that reaches past the known sites as 0 and takes the worse outcome
/// for an unknown neighbour; Values appends the given symbols and rejects
/// anything that still needs unknown sites.
struct Completion {
  CompletionKind kind = CompletionKind::Pessimistic;
  std::vector<std::uint8_t> symbols;

  static Completion pessimistic() { return {}; }
  static Completion values(std::string_view digits);
};

/// Contribution of the arrivals at one site, offset from the leading 0
/// (0 = leading 0, 1..L = block, L+1 = first follower).
struct SiteContribution {
  int offset = 0;
  double value = 0.0;
  /// Follower string this contribution was evaluated at.
  std::string scenario;
};

struct DriftReport {
  CanonicalBlock block;
  std::string scenario;
  double value = 0.0;
  std::vector<SiteContribution> breakdown;
};

/// Drift of W at one concrete follower scenario. The scenario is read jointly
/// with the block, so "2" after "222" is the same gas. Throws
/// std::invalid_argument on an inadmissible scenario or, under Values
/// completion, when the known sites do not resolve an event.
DriftReport drift(const CanonicalBlock& block, const ScoreTable& scores, const RateModel& rates,
                  std::string_view scenario, const Completion& completion = {});

/// The same drift as an affine function of the score table; the indices
/// follow `scores.entries()` order.
LinearForm drift_form(const CanonicalBlock& block, const ScoreTable& scores,
                      const RateModel& rates, std::string_view scenario,
                      const Completion& completion = {});

struct WorstCase {
  CanonicalBlock block;
  /// Sum over arrival sites of the smallest contribution any follower
  /// string of length K produces at that site.
  double value = 0.0;
  /// Follower string minimising the drift evaluated at a single scenario.
  std::string argmin;
  /// Drift at `argmin`; never below `value`.
  double scenario_min = 0.0;
  /// Minimising follower string for each arrival site.
  std::vector<SiteContribution> site_minima;
};

/// Pre-enumerated follower scenarios for every block of one length. Builds
/// once per (L, n, K); evaluation at any (p1, scores) is then cheap.
class DriftSystem {
 public:
  DriftSystem(int length, GasCount n, int followers);

  int length() const { return length_; }
  GasCount gas_count() const { return n_; }
  int followers() const { return followers_; }
  const std::vector<CanonicalBlock>& blocks() const { return blocks_; }
  std::size_t index_of(const CanonicalBlock& block) const;
  std::size_t reference_index() const { return reference_; }
  std::size_t scenario_count(std::size_t block) const { return scenario_counts_[block]; }

  /// Scores in `blocks()` order; throws when the table does not match.
  std::vector<double> score_vector(const ScoreTable& table) const;

  WorstCase worst_case(std::size_t block, std::span<const double> scores, double p1) const;
  /// Worst-case value only, together with its affine form at the minimisers.
  double worst_case_value(std::size_t block, std::span<const double> scores, double p1,
                          LinearForm* active = nullptr) const;

 private:
  struct Candidate {
    LinearForm gas_one;  // scaled by p1
    LinearForm others;   // scaled by the per-gas rate of the other gases
    std::string scenario;
  };
  struct SiteTerms {
    int offset = 0;
    std::vector<Candidate> candidates;
  };
  struct ScenarioClass {
    std::vector<std::uint16_t> choice;  // candidate index per site
    std::string scenario;               // smallest follower string in the class
  };
  struct BlockTerms {
    std::vector<SiteTerms> sites;
    std::vector<ScenarioClass> classes;
  };

  double other_rate(double p1) const;

  int length_;
  GasCount n_;
  int followers_;
  std::vector<CanonicalBlock> blocks_;
  std::size_t reference_ = 0;
  std::vector<BlockTerms> terms_;
  std::vector<std::size_t> scenario_counts_;
};

/// Worst case over all follower strings of length K (K <= 0 picks L + 3).
WorstCase worst_case_drift(const CanonicalBlock& block, const ScoreTable& scores,
                           const RateModel& rates, int followers);

struct Certificate {
  RateModel rates;
  int length = 0;
  int followers = 0;
  CompletionKind completion = CompletionKind::Pessimistic;
  ScoreTable scores;
  std::vector<WorstCase> blocks;
  /// Smallest worst-case drift over all blocks.
  double c = 0.0;
  bool positive() const { return c > 0.0; }
};

Certificate verify_certificate(const RateModel& rates, int length, const ScoreTable& scores,
                               int followers);

/// Worst-case drift of the reference block.
double test_reference_block(const ScoreTable& scores, const RateModel& rates, int followers);

struct SolverConfig {
  int length = 3;
  GasCount n = GasCount::finite(4);
  double p1 = 0.4699;
  double tolerance = 1e-6;
  int max_sweeps = 10000;
  /// 0 picks the default L + 3.
  int followers = 0;
  /// Fraction of the closed-form update applied per step.
  double damping = 1.0;

  /// Throws std::invalid_argument when unusable.
  void validate() const;
  int effective_followers() const { return followers > 0 ? followers : length + 3; }
};

struct SolveResult {
  ScoreTable scores;
  bool converged = false;
  int sweeps = 0;
  double last_change = 0.0;
  /// Worst-case drift per block at the final scores, in table order.
  std::vector<double> residuals;
  double reference_drift = 0.0;
};

SolveResult fixed_point_solve(const SolverConfig& config);
/// Same, reusing an already built system (the threshold search does this).
SolveResult fixed_point_solve(const SolverConfig& config, const DriftSystem& system);

struct BisectionStep {
  double p1 = 0.0;
  bool converged = false;
  double reference_drift = 0.0;
  bool certified = false;
  double lo = 0.0;
  double hi = 0.0;
};

struct ThresholdResult {
  GasCount n = GasCount::finite(4);
  int length = 0;
  int followers = 0;
  double tolerance = 0.0;
  /// Smallest certified p1 found; empty when even p1 = 0.999 fails.
  std::optional<double> p1_star;
  std::vector<BisectionStep> history;
};

ThresholdResult threshold_search(GasCount n, int length, int followers = 0,
                                 double tolerance = 1e-4, int max_sweeps = 10000);

}  // namespace catsurf
