#include "catsurf/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace catsurf {

double RateModel::other_rate() const {
  return n.is_infinite() ? 1.0 - p1 : (1.0 - p1) / (n.value() - 1);
}

void LinearForm::add_term(std::uint32_t index, double coefficient) {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), index,
                             [](const auto& t, std::uint32_t i) { return t.first < i; });
  if (it != terms_.end() && it->first == index) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  } else if (coefficient != 0.0) {
    terms_.insert(it, {index, coefficient});
  }
}

void LinearForm::add(const LinearForm& other, double scale) {
  constant_ += scale * other.constant_;
  for (auto [i, c] : other.terms_) add_term(i, scale * c);
}

double LinearForm::coefficient(std::uint32_t index) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), index,
                             [](const auto& t, std::uint32_t i) { return t.first < i; });
  return it != terms_.end() && it->first == index ? it->second : 0.0;
}

double LinearForm::evaluate(std::span<const double> scores) const {
  double v = constant_;
  for (auto [i, c] : terms_) v += c * scores[i];
  return v;
}

Completion Completion::values(std::string_view digits) {
  Completion c{CompletionKind::Values, {}};
  for (char ch : digits) {
    if (ch < '0' || ch > '9') throw std::invalid_argument("completion must be digits");
    c.symbols.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return c;
}

namespace {

using Symbols = std::vector<std::uint8_t>;

// Tape layout: two sites of the 1-run, the leading 0, the block, followers.
constexpr std::size_t kLead = 2;

struct NeedsUnknownSite {};

class BlockIndex {
 public:
  explicit BlockIndex(const std::vector<CanonicalBlock>& blocks) {
    for (std::size_t i = 0; i < blocks.size(); ++i)
      index_.emplace(key(blocks[i].symbols()), static_cast<std::uint32_t>(i));
  }
  std::uint32_t at(const Symbols& window) const {
    auto it = index_.find(key(window));
    if (it == index_.end())
      throw std::out_of_range("score table has no entry for window " +
                              CanonicalBlock::canonicalize(
                                  std::vector<State>(window.begin(), window.end()))
                                  .str());
    return it->second;
  }

 private:
  static std::string key(const Symbols& s) { return std::string(s.begin(), s.end()); }
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct SiteForms {
  LinearForm gas_one;
  LinearForm others;
};

struct Frontier {
  int length;
  GasCount n;
  const BlockIndex& index;
  bool strict;  // unknown window -> error instead of score 0

  Symbols window_at(const Symbols& tape, std::size_t first) const {
    Symbols w(tape.begin() + static_cast<std::ptrdiff_t>(first),
              tape.begin() + static_cast<std::ptrdiff_t>(first) + length);
    relabel_in_place(w);
    return w;
  }

  // Change in W after the event, relative to the window at the block.
  LinearForm delta_w(const Symbols& after, std::uint32_t before_index) const {
    LinearForm out;
    out.add_term(before_index, -1.0);
    const std::size_t len = after.size();
    if (after[1] == 0) {
      out.add_constant(-1.0);
      out.add_term(index.at(window_at(after, kLead)), 1.0);
      return out;
    }
    std::size_t r = kLead;
    while (r < len && after[r] == 1) ++r;
    out.add_constant(static_cast<double>(r) - static_cast<double>(kLead));
    if (r + static_cast<std::size_t>(length) >= len) {
      if (strict) throw NeedsUnknownSite{};
      return out;  // window past the known sites scores 0
    }
    out.add_term(index.at(window_at(after, r + 1)), 1.0);
    return out;
  }

  static std::uint8_t max_label(const Symbols& tape) {
    std::uint8_t m = 1;
    for (auto s : tape) m = std::max(m, s);
    return m;
  }

  // Arrivals at tape position `s`. Throws NeedsUnknownSite when the right
  // neighbour is not on the tape.
  SiteForms site(const Symbols& tape, std::size_t s, std::uint32_t before_index) const {
    SiteForms forms;
    if (tape[s] != 0) return forms;
    if (s + 1 >= tape.size()) throw NeedsUnknownSite{};

    const std::uint8_t m = max_label(tape);
    auto arrive = [&](std::uint8_t gas, LinearForm& sink, double multiplicity) {
      const std::uint8_t left = tape[s - 1], right = tape[s + 1];
      const bool dl = left != 0 && left != gas;
      const bool dr = right != 0 && right != gas;
      Symbols after = tape;
      if (!dl && !dr) {
        after[s] = gas;
        relabel_in_place(after);
        sink.add(delta_w(after, before_index), multiplicity);
        return;
      }
      const double share = (dl && dr) ? 0.5 : 1.0;
      if (dl) {
        after[s - 1] = 0;
        relabel_in_place(after);
        sink.add(delta_w(after, before_index), multiplicity * share);
        after = tape;
      }
      if (dr) {
        after[s + 1] = 0;
        relabel_in_place(after);
        sink.add(delta_w(after, before_index), multiplicity * share);
      }
    };

    arrive(1, forms.gas_one, 1.0);
    if (n.is_infinite()) {
      arrive(static_cast<std::uint8_t>(m + 1), forms.others, 1.0);
    } else {
      for (std::uint8_t g = 2; g <= m; ++g) arrive(g, forms.others, 1.0);
      const int fresh = n.value() - m;
      if (fresh > 0) arrive(static_cast<std::uint8_t>(m + 1), forms.others, fresh);
    }
    return forms;
  }
};

Symbols frontier_tape(const CanonicalBlock& block, const Symbols& followers) {
  Symbols tape{1, 1, 0};
  tape.insert(tape.end(), block.symbols().begin(), block.symbols().end());
  tape.insert(tape.end(), followers.begin(), followers.end());
  return tape;
}

Symbols parse_digits(std::string_view digits) {
  Symbols out;
  for (char c : digits) {
    if (c < '0' || c > '9') throw std::invalid_argument("scenario must be digits");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

std::string digits(const Symbols& s, std::size_t from = 0) {
  std::string out;
  for (std::size_t i = from; i < s.size(); ++i) out.push_back(static_cast<char>('0' + s[i]));
  return out;
}

// Joint canonical form of block + followers; the followers alone are returned.
Symbols joint_followers(const CanonicalBlock& block, const Symbols& raw, GasCount n) {
  Symbols joint(block.symbols());
  joint.insert(joint.end(), raw.begin(), raw.end());
  Symbols check = joint;
  relabel_in_place(check);
  if (check != joint || !admissible(joint, n))
    throw std::invalid_argument("follower scenario '" + digits(raw) +
                                "' is not admissible after block " + block.str());
  return raw;
}

Symbols extension_candidates(const Symbols& tape, GasCount n) {
  const std::uint8_t m = Frontier::max_label(tape);
  Symbols out;
  for (std::uint8_t c = 0; c <= m + 1; ++c) {
    if (c >= 2 && c == m + 1 && !n.is_infinite() && m >= n.value()) continue;
    Symbols probe(tape.begin() + static_cast<std::ptrdiff_t>(kLead), tape.end());
    probe.push_back(c);
    Symbols relabelled = probe;
    relabel_in_place(relabelled);
    if (relabelled == probe && admissible(probe, n)) out.push_back(c);
  }
  return out;
}

struct ScenarioEval {
  double value = 0.0;
  LinearForm form;
  std::string scenario;
};

// Arrivals at one site for a fixed scenario. Under pessimistic completion an
// unknown neighbour is filled with the worst admissible symbol.
ScenarioEval evaluate_site(const Frontier& frontier, const Symbols& tape, std::size_t s,
                           std::uint32_t before_index, const RateModel& rates,
                           std::span<const double> scores) {
  try {
    auto forms = frontier.site(tape, s, before_index);
    ScenarioEval e;
    e.form.add(forms.gas_one, rates.p1);
    e.form.add(forms.others, rates.other_rate());
    e.value = e.form.evaluate(scores);
    e.scenario = digits(tape, kLead + 1 + static_cast<std::size_t>(frontier.length));
    return e;
  } catch (const NeedsUnknownSite&) {
    if (frontier.strict)
      throw std::invalid_argument("follower scenario too short to resolve arrivals at offset " +
                                  std::to_string(s - kLead));
  }
  ScenarioEval best;
  best.value = std::numeric_limits<double>::infinity();
  for (auto c : extension_candidates(tape, frontier.n)) {
    Symbols longer = tape;
    longer.push_back(c);
    auto e = evaluate_site(frontier, longer, s, before_index, rates, scores);
    if (e.value < best.value) best = std::move(e);
  }
  return best;
}

struct DriftParts {
  std::vector<SiteContribution> breakdown;
  LinearForm form;
  double value = 0.0;
  std::string scenario;
};

DriftParts drift_parts(const CanonicalBlock& block, const ScoreTable& table,
                       const RateModel& rates, std::string_view scenario,
                       const Completion& completion) {
  if (static_cast<int>(block.size()) != table.length())
    throw std::invalid_argument("block length does not match the score table");
  if (!admissible(block.symbols(), rates.n))
    throw std::invalid_argument("block " + block.str() + " is not admissible");
  if (!(rates.p1 >= 0.0 && rates.p1 <= 1.0)) throw std::invalid_argument("p1 outside [0,1]");

  std::vector<CanonicalBlock> blocks;
  std::vector<double> scores;
  for (const auto& [b, v] : table.entries()) {
    blocks.push_back(b);
    scores.push_back(v);
  }
  BlockIndex index(blocks);
  Symbols followers = parse_digits(scenario);
  if (completion.kind == CompletionKind::Values)
    followers.insert(followers.end(), completion.symbols.begin(), completion.symbols.end());
  joint_followers(block, followers, rates.n);

  Frontier frontier{table.length(), rates.n, index, completion.kind == CompletionKind::Values};
  const Symbols tape = frontier_tape(block, followers);
  const std::uint32_t before = index.at(block.symbols());

  DriftParts out;
  out.scenario = std::string(scenario);
  const std::size_t last = kLead + static_cast<std::size_t>(table.length()) + 1;
  for (std::size_t s = kLead; s <= last; ++s) {
    ScenarioEval e;
    if (s >= tape.size()) {
      // The first follower itself is unknown: pessimistic completion picks
      // its worst value for this site's arrivals.
      if (frontier.strict)
        throw std::invalid_argument("follower scenario too short to resolve arrivals at offset " +
                                    std::to_string(s - kLead));
      e.value = std::numeric_limits<double>::infinity();
      for (auto c : extension_candidates(tape, rates.n)) {
        Symbols longer = tape;
        longer.push_back(c);
        auto cand = evaluate_site(frontier, longer, s, before, rates, scores);
        if (cand.value < e.value) e = std::move(cand);
      }
    } else {
      e = evaluate_site(frontier, tape, s, before, rates, scores);
    }
    out.breakdown.push_back({static_cast<int>(s - kLead), e.value, e.scenario});
    out.form.add(e.form);
  }
  out.value = out.form.evaluate(scores);
  return out;
}

}  // namespace

DriftReport drift(const CanonicalBlock& block, const ScoreTable& scores, const RateModel& rates,
                  std::string_view scenario, const Completion& completion) {
  auto parts = drift_parts(block, scores, rates, scenario, completion);
  return {block, parts.scenario, parts.value, std::move(parts.breakdown)};
}

LinearForm drift_form(const CanonicalBlock& block, const ScoreTable& scores,
                      const RateModel& rates, std::string_view scenario,
                      const Completion& completion) {
  return drift_parts(block, scores, rates, scenario, completion).form;
}

// ---------------------------------------------------------------------------

DriftSystem::DriftSystem(int length, GasCount n, int followers)
    : length_(length), n_(n), followers_(followers) {
  if (length < 1) throw std::invalid_argument("block length must be positive");
  if (followers < length + 1)
    throw std::invalid_argument("follower bound K must be at least L + 1");
  blocks_ = enumerate_blocks(length, n);
  reference_ = index_of(reference_block(length, n));
  BlockIndex index(blocks_);
  Frontier frontier{length, n, index, false};
  terms_.resize(blocks_.size());
  scenario_counts_.assign(blocks_.size(), 0);

  const std::size_t sites = static_cast<std::size_t>(length) + 2;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    BlockTerms& bt = terms_[b];
    bt.sites.resize(sites);
    for (std::size_t k = 0; k < sites; ++k) bt.sites[k].offset = static_cast<int>(k);
    std::map<std::vector<std::uint16_t>, std::size_t> class_of;
    const auto before = static_cast<std::uint32_t>(b);

    Symbols joint(blocks_[b].symbols());
    auto visit = [&](const Symbols& full) {
      Symbols followers_only(full.begin() + length, full.end());
      const Symbols tape = frontier_tape(blocks_[b], followers_only);
      const std::string scenario = digits(followers_only);
      std::vector<std::uint16_t> choice(sites);
      for (std::size_t k = 0; k < sites; ++k) {
        auto forms = frontier.site(tape, kLead + k, before);
        auto& cands = bt.sites[k].candidates;
        std::size_t j = 0;
        while (j < cands.size() &&
               !(cands[j].gas_one == forms.gas_one && cands[j].others == forms.others))
          ++j;
        if (j == cands.size())
          cands.push_back({std::move(forms.gas_one), std::move(forms.others), scenario});
        choice[k] = static_cast<std::uint16_t>(j);
      }
      if (class_of.emplace(choice, bt.classes.size()).second)
        bt.classes.push_back({std::move(choice), scenario});
      ++scenario_counts_[b];
    };

    // Depth-first in increasing symbol order so the first string seen in
    // each class is the lexicographically smallest.
    auto extend = [&](auto&& self, Symbols& cur) -> void {
      if (cur.size() == static_cast<std::size_t>(length + followers)) {
        visit(cur);
        return;
      }
      std::uint8_t m = Frontier::max_label(cur);
      for (std::uint8_t c = 0; c <= m + 1; ++c) {
        cur.push_back(c);
        if (admissible(cur, n)) self(self, cur);
        cur.pop_back();
      }
    };
    extend(extend, joint);
  }
}

std::size_t DriftSystem::index_of(const CanonicalBlock& block) const {
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), block);
  if (it == blocks_.end() || *it != block)
    throw std::out_of_range("block " + block.str() + " not enumerated");
  return static_cast<std::size_t>(it - blocks_.begin());
}

std::vector<double> DriftSystem::score_vector(const ScoreTable& table) const {
  if (table.length() != length_ || table.entries().size() != blocks_.size())
    throw std::invalid_argument("score table does not cover the enumerated blocks");
  std::vector<double> out;
  out.reserve(blocks_.size());
  std::size_t i = 0;
  for (const auto& [b, v] : table.entries()) {
    if (b != blocks_[i++]) throw std::invalid_argument("score table blocks differ");
    out.push_back(v);
  }
  return out;
}

double DriftSystem::other_rate(double p1) const { return RateModel{n_, p1}.other_rate(); }

double DriftSystem::worst_case_value(std::size_t block, std::span<const double> scores,
                                     double p1, LinearForm* active) const {
  const double q = other_rate(p1);
  double total = 0.0;
  for (const auto& site : terms_[block].sites) {
    double best = std::numeric_limits<double>::infinity();
    const Candidate* arg = nullptr;
    for (const auto& c : site.candidates) {
      double v = p1 * c.gas_one.evaluate(scores) + q * c.others.evaluate(scores);
      if (v < best) {
        best = v;
        arg = &c;
      }
    }
    if (!arg) continue;
    total += best;
    if (active) {
      active->add(arg->gas_one, p1);
      active->add(arg->others, q);
    }
  }
  return total;
}

WorstCase DriftSystem::worst_case(std::size_t block, std::span<const double> scores,
                                  double p1) const {
  const double q = other_rate(p1);
  const auto& bt = terms_[block];
  WorstCase out;
  out.block = blocks_[block];

  std::vector<std::vector<double>> values(bt.sites.size());
  for (std::size_t k = 0; k < bt.sites.size(); ++k) {
    const auto& site = bt.sites[k];
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < site.candidates.size(); ++j) {
      const auto& c = site.candidates[j];
      double v = p1 * c.gas_one.evaluate(scores) + q * c.others.evaluate(scores);
      values[k].push_back(v);
      if (v < best) {
        best = v;
        arg = j;
      }
    }
    out.value += best;
    out.site_minima.push_back({site.offset, best, site.candidates[arg].scenario});
  }

  out.scenario_min = std::numeric_limits<double>::infinity();
  for (const auto& cls : bt.classes) {
    double v = 0.0;
    for (std::size_t k = 0; k < cls.choice.size(); ++k) v += values[k][cls.choice[k]];
    if (v < out.scenario_min - 1e-12) {
      out.scenario_min = v;
      out.argmin = cls.scenario;
    }
  }
  return out;
}

WorstCase worst_case_drift(const CanonicalBlock& block, const ScoreTable& scores,
                           const RateModel& rates, int followers) {
  if (followers <= 0) followers = scores.length() + 3;
  DriftSystem system(scores.length(), rates.n, followers);
  auto vec = system.score_vector(scores);
  return system.worst_case(system.index_of(block), vec, rates.p1);
}

Certificate verify_certificate(const RateModel& rates, int length, const ScoreTable& scores,
                               int followers) {
  if (scores.length() != length) throw std::invalid_argument("score table has the wrong length");
  if (followers <= 0) followers = length + 3;
  DriftSystem system(length, rates.n, followers);
  auto vec = system.score_vector(scores);
  Certificate cert;
  cert.rates = rates;
  cert.length = length;
  cert.followers = followers;
  cert.scores = scores;
  cert.c = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < system.blocks().size(); ++b) {
    cert.blocks.push_back(system.worst_case(b, vec, rates.p1));
    cert.c = std::min(cert.c, cert.blocks.back().value);
  }
  return cert;
}

double test_reference_block(const ScoreTable& scores, const RateModel& rates, int followers) {
  if (followers <= 0) followers = scores.length() + 3;
  DriftSystem system(scores.length(), rates.n, followers);
  auto vec = system.score_vector(scores);
  return system.worst_case_value(system.reference_index(), vec, rates.p1);
}

void SolverConfig::validate() const {
  if (length < 1) throw std::invalid_argument("block length must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("max sweeps must be positive");
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw std::invalid_argument("p1 outside [0,1]");
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must be in (0,1]");
  if (effective_followers() < length + 1)
    throw std::invalid_argument("follower bound K must be at least L + 1");
}

SolveResult fixed_point_solve(const SolverConfig& config) {
  config.validate();
  DriftSystem system(config.length, config.n, config.effective_followers());
  return fixed_point_solve(config, system);
}

SolveResult fixed_point_solve(const SolverConfig& config, const DriftSystem& system) {
  config.validate();
  if (system.length() != config.length || !(system.gas_count() == config.n))
    throw std::invalid_argument("drift system does not match the solver configuration");
  const std::size_t count = system.blocks().size();
  const std::size_t ref = system.reference_index();
  std::vector<double> scores(count, 0.0);

  SolveResult out;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t b = 0; b < count; ++b) {
      if (b == ref) continue;
      LinearForm active;
      double d = system.worst_case_value(b, scores, config.p1, &active);
      double own = active.coefficient(static_cast<std::uint32_t>(b));
      if (!(own < 0.0)) continue;
      double step = -config.damping * d / own;
      scores[b] += step;
      change = std::max(change, std::abs(step));
    }
    out.sweeps = sweep;
    out.last_change = change;
    if (!std::isfinite(change)) break;
    if (change < config.tolerance) {
      out.converged = true;
      break;
    }
  }

  out.scores = ScoreTable::zeros(config.length, config.n);
  for (std::size_t b = 0; b < count; ++b) {
    out.scores.set(system.blocks()[b], scores[b]);
    out.residuals.push_back(system.worst_case_value(b, scores, config.p1));
  }
  out.reference_drift = out.residuals[ref];
  return out;
}

ThresholdResult threshold_search(GasCount n, int length, int followers, double tolerance,
                                 int max_sweeps) {
  if (!(tolerance >= 1e-4 * (1 - 1e-9)))
    throw std::invalid_argument("bisection tolerance must be at least 1e-4");
  SolverConfig cfg;
  cfg.length = length;
  cfg.n = n;
  cfg.followers = followers;
  cfg.max_sweeps = max_sweeps;
  cfg.tolerance = 1e-9;
  const DriftSystem system(length, n, cfg.effective_followers());

  ThresholdResult out;
  out.n = n;
  out.length = length;
  out.followers = cfg.effective_followers();
  out.tolerance = tolerance;

  double lo = 0.0, hi = 0.999;
  auto probe = [&](double p1) {
    cfg.p1 = p1;
    auto r = fixed_point_solve(cfg, system);
    BisectionStep step{p1, r.converged, r.reference_drift,
                       r.converged && r.reference_drift > 0.0, lo, hi};
    out.history.push_back(step);
    return step.certified;
  };

  if (!probe(hi)) return out;
  while (hi - lo > tolerance) {
    double mid = 0.5 * (lo + hi);
    if (probe(mid))
      hi = mid;
    else
      lo = mid;
    out.history.back().lo = lo;
    out.history.back().hi = hi;
  }
  out.p1_star = hi;
  return out;
}

}  // namespace catsurf
