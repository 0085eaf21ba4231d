#pragma once

// Per-site driving randomness. Every site owns three independent sequences,
// an arrival clock, a type sequence Y_k and a neighbour-order sequence Z_k,
// all derived from one master seed. Values are computed from (sub-seed, k)
// by a counter-based hash, so a stream is a pure function of (seed, site)
// and nothing is precomputed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "catsurf/model.hpp"

namespace catsurf {

/// Identifier recorded in run metadata; changing the mixer changes it.
inline constexpr std::string_view kMixerId = "splitmix64-v1";

struct MasterSeed {
  std::uint64_t value = 0;
};

/// The SplitMix64 output finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Independent sub-seed for (master, index, tag).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t tag);

/// Uniform in the open interval (0, 1) from a 64-bit word.
double to_open_unit(std::uint64_t bits);

/// Finite distribution over 0..size-1 sampled by inverse CDF.
class CategoricalLaw {
 public:
  CategoricalLaw() = default;
  /// Throws std::invalid_argument unless the weights are nonnegative and sum
  /// to 1 within 1e-12.
  explicit CategoricalLaw(std::vector<double> probabilities);

  std::size_t size() const { return probabilities_.size(); }
  const std::vector<double>& probabilities() const { return probabilities_; }
  std::size_t sample(double u) const;

 private:
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

/// Type law of a model: index i stands for gas i + 1. In the infinite
/// variant index 0 is gas 1 and index 1 a fresh molecule.
CategoricalLaw type_law(const ModelSpec& spec);

/// Type emitted for a fresh non-1 molecule in the infinite variant; the
/// simulator replaces it by a new identifier.
inline constexpr State kFreshMolecule = ~State{0};

struct Draw {
  double time = 0.0;
  /// Index into the stream's categorical law.
  std::size_t category = 0;
  NeighborOrder order;
  /// 1-based arrival count at this site.
  std::uint64_t k = 0;
};

/// The randomness of one site. Single-owner mutable state.
class SiteStream {
 public:
  SiteStream(MasterSeed seed, std::size_t site, CategoricalLaw law);

  std::size_t site() const { return site_; }
  std::uint64_t arrivals() const { return k_; }
  double time() const { return time_; }

  /// Advances clock, type and order cursors together. Every arrival
  /// consumes one of each, whether or not it changes the lattice.
  Draw next();

  friend bool operator==(const SiteStream& a, const SiteStream& b) {
    return a.site_ == b.site_ && a.clock_ == b.clock_ && a.type_ == b.type_ &&
           a.order_ == b.order_ && a.k_ == b.k_ && a.time_ == b.time_;
  }

 private:
  std::size_t site_;
  std::uint64_t clock_;
  std::uint64_t type_;
  std::uint64_t order_;
  CategoricalLaw law_;
  std::uint64_t k_ = 0;
  double time_ = 0.0;
};

struct Arrival {
  double time = 0.0;
  /// A gas 1..n, or kFreshMolecule in the infinite variant.
  State type = kGasOne;
  NeighborOrder order;
};

/// Stream for one site of a single-system run.
SiteStream derive_stream(MasterSeed seed, std::size_t site, const ModelSpec& spec);

/// Next arrival of a stream built by derive_stream for `spec`.
Arrival next_arrival(SiteStream& stream, const ModelSpec& spec);

}  // namespace catsurf
