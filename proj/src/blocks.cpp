#include "catsurf/blocks.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace catsurf {

void relabel_in_place(std::span<std::uint8_t> symbols) {
  std::array<std::uint8_t, 256> map{};
  std::uint8_t next = 2;
  for (auto& s : symbols) {
    if (s <= 1) continue;
    if (map[s] == 0) map[s] = next++;
    s = map[s];
  }
}

CanonicalBlock CanonicalBlock::canonicalize(std::span<const State> raw) {
  CanonicalBlock block;
  block.symbols_.reserve(raw.size());
  std::unordered_map<State, std::uint8_t> labels;
  std::uint8_t next = 2;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i > 0 && raw[i] != kVacant && raw[i - 1] != kVacant && raw[i] != raw[i - 1])
      throw std::invalid_argument("block has adjacent distinct gases");
    if (raw[i] <= kGasOne) {
      block.symbols_.push_back(static_cast<std::uint8_t>(raw[i]));
      continue;
    }
    auto [it, inserted] = labels.try_emplace(raw[i], next);
    if (inserted) {
      if (next == std::numeric_limits<std::uint8_t>::max())
        throw std::invalid_argument("too many distinct gases in block");
      ++next;
    }
    block.symbols_.push_back(it->second);
  }
  return block;
}

CanonicalBlock CanonicalBlock::parse(std::string_view digits) {
  std::vector<State> raw;
  raw.reserve(digits.size());
  for (char c : digits) {
    if (c < '0' || c > '9') throw std::invalid_argument("block must be digits");
    raw.push_back(static_cast<State>(c - '0'));
  }
  return canonicalize(raw);
}

int CanonicalBlock::labels() const {
  std::uint8_t top = 1;
  for (auto s : symbols_) top = std::max(top, s);
  return top - 1;
}

std::string CanonicalBlock::str() const {
  std::string out;
  out.reserve(symbols_.size());
  for (auto s : symbols_) out.push_back(s <= 9 ? static_cast<char>('0' + s) : '?');
  return out;
}

bool admissible(std::span<const std::uint8_t> symbols, GasCount n) {
  std::uint8_t next = 2;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const auto s = symbols[i];
    if (i > 0 && s != 0 && symbols[i - 1] != 0 && s != symbols[i - 1]) return false;
    if (s <= 1) continue;
    if (s > next) return false;  // not canonical
    if (s == next) {
      ++next;
    } else if (n.is_infinite()) {
      return false;  // every non-1 molecule is distinct
    }
  }
  if (!n.is_infinite() && next - 2 > n.value() - 1) return false;
  return true;
}

namespace {

void extend(std::vector<std::uint8_t>& prefix, std::size_t length, GasCount n,
            std::uint8_t next_label, std::vector<CanonicalBlock>& out) {
  if (prefix.size() == length) {
    out.push_back(CanonicalBlock::canonicalize(
        std::vector<State>(prefix.begin(), prefix.end())));
    return;
  }
  const int max_labels = n.is_infinite() ? std::numeric_limits<int>::max() : n.value() - 1;
  for (std::uint8_t s = 0; s <= next_label; ++s) {
    if (s == next_label && next_label - 2 >= max_labels) break;
    prefix.push_back(s);
    if (admissible(prefix, n))
      extend(prefix, length, n, s == next_label ? next_label + 1 : next_label, out);
    prefix.pop_back();
  }
}

int rank(std::uint8_t s) { return s >= 2 ? 0 : s + 1; }

}  // namespace

std::vector<CanonicalBlock> enumerate_blocks(int length, GasCount n) {
  if (length < 1) throw std::invalid_argument("block length must be positive");
  std::vector<CanonicalBlock> out;
  std::vector<std::uint8_t> prefix;
  extend(prefix, static_cast<std::size_t>(length), n, 2, out);
  std::sort(out.begin(), out.end());
  return out;
}

CanonicalBlock reference_block(int length, GasCount n) {
  auto blocks = enumerate_blocks(length, n);
  return *std::min_element(blocks.begin(), blocks.end(),
                           [](const CanonicalBlock& a, const CanonicalBlock& b) {
                             for (std::size_t i = 0; i < a.size(); ++i) {
                               if (rank(a[i]) != rank(b[i])) return rank(a[i]) < rank(b[i]);
                               if (a[i] != b[i]) return a[i] < b[i];
                             }
                             return false;
                           });
}

ScoreTable::ScoreTable(int length, GasCount n)
    : length_(length), n_(n), reference_(reference_block(length, n)) {}

ScoreTable ScoreTable::zeros(int length, GasCount n) {
  ScoreTable table(length, n);
  for (auto& b : enumerate_blocks(length, n)) table.scores_.emplace(b, 0.0);
  return table;
}

ScoreTable ScoreTable::table1() {
  static const std::pair<const char*, double> rows[] = {
      {"222", 0.000}, {"220", 0.163}, {"202", 0.295}, {"203", 0.339}, {"022", 0.354},
      {"200", 0.404}, {"201", 0.493}, {"020", 0.498}, {"002", 0.570}, {"000", 0.664},
      {"001", 0.827}, {"010", 0.920}, {"102", 1.008}, {"100", 1.157}, {"011", 1.173},
      {"101", 1.456}, {"110", 1.555}, {"111", 1.997},
  };
  ScoreTable table = zeros(3, GasCount::finite(4));
  for (auto [block, score] : rows) table.set(CanonicalBlock::parse(block), score);
  return table;
}

double ScoreTable::at(const CanonicalBlock& block) const {
  auto it = scores_.find(block);
  if (it == scores_.end()) throw std::out_of_range("no score for block " + block.str());
  return it->second;
}

std::optional<double> ScoreTable::find(const CanonicalBlock& block) const {
  auto it = scores_.find(block);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

void ScoreTable::set(const CanonicalBlock& block, double score) {
  auto it = scores_.find(block);
  if (it == scores_.end()) throw std::out_of_range("block " + block.str() + " not in table");
  it->second = score;
}

double ScoreTable::min_score() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [b, s] : scores_) m = std::min(m, s);
  return m;
}

WeightReport weight(const Configuration& config, const ScoreTable& table) {
  if (config.boundary() != Boundary::Blocked)
    throw std::invalid_argument("weight needs a blocked (half-line) configuration");
  if (config.size() == 0) throw std::invalid_argument("empty configuration");
  if (config[0] > kGasOne) throw std::invalid_argument("site 0 must hold 0 or 1");

  WeightReport report;
  std::size_t run = 0;
  while (run < config.size() && config[run] == kGasOne) ++run;
  if (run == config.size()) {
    report.block_len.reset();
    report.first_zero = run;
    report.weight = std::numeric_limits<double>::infinity();
    return report;
  }
  if (config[run] != kVacant)
    throw std::invalid_argument("site after the 1-run must be vacant");
  report.block_len = run;
  report.first_zero = run;
  std::vector<State> window(static_cast<std::size_t>(table.length()), kVacant);
  for (std::size_t k = 0; k < window.size(); ++k) {
    std::size_t s = run + 1 + k;
    if (s < config.size()) window[k] = config[s];
  }
  report.window = CanonicalBlock::canonicalize(window);
  report.weight = static_cast<double>(run) + table.at(report.window);
  return report;
}

}  // namespace catsurf
