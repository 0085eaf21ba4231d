#pragma once

// Canonical right-hand blocks, score tables and the weight function W.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "catsurf/model.hpp"

namespace catsurf {

/// A block of sites with non-1 gases relabelled 2, 3, ... in order of first
/// appearance. Construction always canonicalizes.
class CanonicalBlock {
 public:
  CanonicalBlock() = default;

  /// Relabels raw states. Throws std::invalid_argument on an adjacency
  /// violation.
  static CanonicalBlock canonicalize(std::span<const State> raw);
  /// Digit string, e.g. "304" -> "203".
  static CanonicalBlock parse(std::string_view digits);

  std::size_t size() const { return symbols_.size(); }
  std::uint8_t operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<std::uint8_t>& symbols() const { return symbols_; }
  /// Number of distinct non-1 labels.
  int labels() const;
  std::string str() const;

  friend auto operator<=>(const CanonicalBlock&, const CanonicalBlock&) = default;
  friend bool operator==(const CanonicalBlock&, const CanonicalBlock&) = default;

 private:
  std::vector<std::uint8_t> symbols_;
};

/// Relabels a symbol string in place so non-1 labels appear as 2, 3, ...
void relabel_in_place(std::span<std::uint8_t> symbols);

/// Whether a canonical symbol string is admissible for `n` gases. In the
/// infinite-gas variant no non-1 molecule touches an occupied site and
/// every label occurs once.
bool admissible(std::span<const std::uint8_t> symbols, GasCount n);

/// All admissible canonical blocks of length `length`, sorted.
std::vector<CanonicalBlock> enumerate_blocks(int length, GasCount n);

/// The block whose score is pinned to zero: lexicographically smallest under
/// the ranking non-1 < 0 < 1 (all-2s whenever that is admissible).
CanonicalBlock reference_block(int length, GasCount n);

/// Scores for every canonical block of one length.
class ScoreTable {
 public:
  ScoreTable() = default;
  /// Every enumerated block scored 0.
  static ScoreTable zeros(int length, GasCount n);
  /// The published length-3 scores for four gases.
  static ScoreTable table1();

  int length() const { return length_; }
  GasCount gas_count() const { return n_; }
  const CanonicalBlock& reference() const { return reference_; }

  /// Throws std::out_of_range when the block is missing.
  double at(const CanonicalBlock& block) const;
  std::optional<double> find(const CanonicalBlock& block) const;
  void set(const CanonicalBlock& block, double score);

  /// Blocks in sorted order with their scores.
  const std::map<CanonicalBlock, double>& entries() const { return scores_; }
  double min_score() const;

 private:
  ScoreTable(int length, GasCount n);
  int length_ = 0;
  GasCount n_ = GasCount::finite(2);
  CanonicalBlock reference_;
  std::map<CanonicalBlock, double> scores_;
};

struct WeightReport {
  /// Length of the 1-run at the origin; empty when every site is 1.
  std::optional<std::size_t> block_len;
  /// Position of the first 0 after the run.
  std::size_t first_zero = 0;
  CanonicalBlock window;
  /// +infinity when every site is 1.
  double weight = 0.0;
};

/// W = |B| + score of the window after the first 0 following B. Sites past
/// the lattice end read as 0. Throws std::invalid_argument when the
/// configuration is not blocked or site 0 is not 0/1, and std::out_of_range
/// when the table lacks the window.
WeightReport weight(const Configuration& config, const ScoreTable& table);

}  // namespace catsurf
