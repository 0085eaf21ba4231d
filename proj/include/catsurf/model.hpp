#pragma once

// Lattice-core: the single-event dynamics of the n-gas catalytic surface
// model on a finite one-dimensional lattice.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace catsurf {

/// Site state. 0 is vacant, 1..n are gases. In the infinite-gas variant every
/// non-1 molecule carries its own identifier (>= 2).
using State = std::uint64_t;

inline constexpr State kVacant = 0;
inline constexpr State kGasOne = 1;

/// Number of gases, or the infinite-gas limit.
class GasCount {
 public:
  static GasCount finite(int n);
  static GasCount infinite() { return GasCount{0}; }

  bool is_infinite() const { return n_ == 0; }
  /// Only meaningful for the finite variant.
  int value() const { return n_; }
  std::string str() const;

  friend bool operator==(GasCount, GasCount) = default;

 private:
  explicit GasCount(int n) : n_(n) {}
  int n_;
};

enum class Variant { Finite, InfiniteGas };

/// Gas count plus arrival rates. Rates always sum to one.
class ModelSpec {
 public:
  /// Arbitrary rate vector p_1..p_n (n >= 2).
  static ModelSpec finite(std::vector<double> rates);
  /// p_1 for gas 1, (1 - p_1)/(n - 1) for every other gas.
  static ModelSpec equal_others(int n, double p1);
  /// Infinitely many gases: gas 1 at rate p_1, a fresh molecule at rate 1 - p_1.
  static ModelSpec infinite(double p1);
  /// Dispatches on the gas count.
  static ModelSpec equal_others(GasCount n, double p1);

  Variant variant() const { return variant_; }
  bool is_infinite() const { return variant_ == Variant::InfiniteGas; }
  GasCount gas_count() const;
  double p1() const { return rates_.front(); }
  /// Finite: p_1..p_n. Infinite: {p_1, 1 - p_1}.
  const std::vector<double>& rates() const { return rates_; }
  /// Rate of gas `g` (finite variant).
  double rate(State g) const;

  std::string describe() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  ModelSpec(Variant v, std::vector<double> rates) : variant_(v), rates_(std::move(rates)) {}
  Variant variant_;
  std::vector<double> rates_;
};

enum class Boundary { Torus, Blocked };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

/// One state per site over a finite lattice.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::vector<State> sites, Boundary boundary)
      : sites_(std::move(sites)), boundary_(boundary) {}
  static Configuration uniform(std::size_t size, State s, Boundary boundary) {
    return Configuration(std::vector<State>(size, s), boundary);
  }
  /// Digits 0..9, one per site.
  static Configuration parse(std::string_view text, Boundary boundary);

  std::size_t size() const { return sites_.size(); }
  Boundary boundary() const { return boundary_; }
  State operator[](std::size_t i) const { return sites_[i]; }
  State& operator[](std::size_t i) { return sites_[i]; }
  const std::vector<State>& sites() const { return sites_; }

  /// Site at `site + offset`, or nothing when it falls off a blocked edge.
  std::optional<std::size_t> neighbor(std::size_t site, int offset) const;

  /// Digit form. Identifiers above 9 (infinite variant) print as 'x'.
  std::string str() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<State> sites_;
  Boundary boundary_ = Boundary::Blocked;
};

/// Empty when the configuration is admissible for `spec`, else a diagnostic.
std::optional<std::string> check_configuration(const Configuration& config,
                                               const ModelSpec& spec);
/// Adjacency invariant only: adjacent nonzero states are equal.
bool satisfies_adjacency(const Configuration& config);

/// Strict priority over the two neighbour offsets; offsets[0] wins ties.
struct NeighborOrder {
  std::array<int, 2> offsets{-1, +1};

  static NeighborOrder left_first() { return {{-1, +1}}; }
  static NeighborOrder right_first() { return {{+1, -1}}; }
  bool prefers_left() const { return offsets[0] < 0; }

  friend bool operator==(NeighborOrder, NeighborOrder) = default;
};

enum class OutcomeKind : std::uint8_t { Stick, React, Noop };

std::string_view to_string(OutcomeKind k);

struct ArrivalEffect {
  OutcomeKind kind = OutcomeKind::Noop;
  std::optional<std::size_t> victim;
};

struct ArrivalOutcome {
  OutcomeKind kind = OutcomeKind::Noop;
  std::optional<std::size_t> victim;
  Configuration result;
};

/// A molecule of `gas` lands on `site`. Validates its inputs and throws
/// std::invalid_argument on a bad site, gas 0 or an inadmissible
/// configuration.
ArrivalOutcome apply_arrival(const Configuration& config, std::size_t site, State gas,
                             NeighborOrder order);

/// Unchecked in-place form of apply_arrival for the simulation hot path.
ArrivalEffect apply_arrival_in_place(Configuration& config, std::size_t site, State gas,
                                     NeighborOrder order);

/// The gas i >= 1 when every site holds i. All-vacant is not absorbing.
std::optional<State> is_absorbing(const Configuration& config);

}  // namespace catsurf
