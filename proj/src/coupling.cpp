#include "catsurf/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"

namespace catsurf {

namespace {

constexpr std::uint64_t kCoupledTag = 0x636f7570;  // "coup"

bool is_violation(const CoupledState& s, std::size_t i) {
  return s.a[i] == kGasOne && s.b[i] != kGasOne;
}

// Per-side occupation counts for O(1) absorption checks.
class Tally {
 public:
  Tally(const Configuration& c, std::size_t gases) : counts_(gases + 1, 0), size_(c.size()) {
    for (State s : c.sites()) ++counts_[s];
  }
  void move(State from, State to) {
    --counts_[from];
    ++counts_[to];
  }
  std::optional<State> absorbed() const {
    for (State g = 1; g < counts_.size(); ++g)
      if (counts_[g] == size_) return g;
    return std::nullopt;
  }

 private:
  std::vector<std::size_t> counts_;
  std::size_t size_;
};

}  // namespace

JointArrivalLaw::JointArrivalLaw(std::vector<GasPair> pairs, std::vector<double> probabilities)
    : pairs_(std::move(pairs)), probabilities_(std::move(probabilities)) {
  if (pairs_.empty() || pairs_.size() != probabilities_.size())
    throw std::invalid_argument("joint law needs one probability per pair");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].first == kVacant || pairs_[i].second == kVacant)
      throw std::invalid_argument("joint law pairs must name nonzero gases");
    if (std::find(pairs_.begin(), pairs_.begin() + static_cast<std::ptrdiff_t>(i), pairs_[i]) !=
        pairs_.begin() + static_cast<std::ptrdiff_t>(i))
      throw std::invalid_argument("joint law lists a pair twice");
  }
  CategoricalLaw check(probabilities_);  // validates range and sum
}

JointArrivalLaw JointArrivalLaw::counterexample() {
  return JointArrivalLaw({{2, 2}, {3, 3}, {1, 1}, {2, 1}, {3, 1}},
                         {0.25, 0.25, 1.0 / 3.0, 1.0 / 12.0, 1.0 / 12.0});
}

JointArrivalLaw JointArrivalLaw::diagonal(const ModelSpec& spec) {
  if (spec.is_infinite()) throw std::invalid_argument("diagonal law needs finitely many gases");
  std::vector<GasPair> pairs;
  std::vector<double> probs;
  for (std::size_t g = 0; g < spec.rates().size(); ++g) {
    if (spec.rates()[g] == 0.0) continue;
    pairs.emplace_back(g + 1, g + 1);
    probs.push_back(spec.rates()[g]);
  }
  double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= sum;
  return JointArrivalLaw(std::move(pairs), std::move(probs));
}

bool JointArrivalLaw::supports(GasPair pair) const {
  for (std::size_t i = 0; i < pairs_.size(); ++i)
    if (pairs_[i] == pair && probabilities_[i] > 0.0) return true;
  return false;
}

std::size_t JointArrivalLaw::gas_count() const {
  State top = 1;
  for (auto [x, y] : pairs_) top = std::max({top, x, y});
  return static_cast<std::size_t>(top);
}

std::vector<double> JointArrivalLaw::marginal(int coordinate) const {
  std::vector<double> m(gas_count(), 0.0);
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    State g = coordinate == 0 ? pairs_[i].first : pairs_[i].second;
    m[g - 1] += probabilities_[i];
  }
  return m;
}

void check_coupled(const CoupledState& state) {
  if (state.a.size() != state.b.size())
    throw std::invalid_argument("coupled systems must have equal size");
  if (state.a.boundary() != state.b.boundary())
    throw std::invalid_argument("coupled systems must share a boundary");
  if (!satisfies_adjacency(state.a) || !satisfies_adjacency(state.b))
    throw std::invalid_argument("coupled state violates the adjacency invariant");
}

CoupledState coupled_arrival(const CoupledState& state, std::size_t site, GasPair pair,
                             NeighborOrder order) {
  check_coupled(state);
  return {apply_arrival(state.a, site, pair.first, order).result,
          apply_arrival(state.b, site, pair.second, order).result};
}

std::vector<ScriptEvent> parse_script(std::string_view text) {
  std::vector<ScriptEvent> events;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long site = -1, a = 0, b = 0;
    std::string order, extra;
    if (!(fields >> site >> a >> b >> order) || (fields >> extra) || site < 0 || a <= 0 ||
        b <= 0 || (order != "L" && order != "R"))
      throw std::invalid_argument("script line " + std::to_string(line_no) +
                                  ": expected `site pair_a pair_b L|R`");
    events.push_back({static_cast<std::size_t>(site),
                      {static_cast<State>(a), static_cast<State>(b)},
                      order == "L" ? NeighborOrder::left_first() : NeighborOrder::right_first()});
  }
  return events;
}

std::string format_script(const std::vector<ScriptEvent>& script) {
  std::ostringstream out;
  for (const auto& e : script)
    out << e.site << ' ' << e.pair.first << ' ' << e.pair.second << ' '
        << (e.order.prefers_left() ? 'L' : 'R') << '\n';
  return out.str();
}

std::vector<CoupledState> replay(const CoupledState& initial,
                                 const std::vector<ScriptEvent>& script) {
  check_coupled(initial);
  std::vector<CoupledState> states{initial};
  states.reserve(script.size() + 1);
  for (const auto& e : script)
    states.push_back(coupled_arrival(states.back(), e.site, e.pair, e.order));
  return states;
}

std::vector<std::size_t> monotonicity_check(const CoupledState& state) {
  if (state.a.size() != state.b.size())
    throw std::invalid_argument("coupled systems must have equal size");
  std::vector<std::size_t> sites;
  for (std::size_t i = 0; i < state.a.size(); ++i)
    if (is_violation(state, i)) sites.push_back(i);
  return sites;
}

CoupledRun run_coupled(const JointArrivalLaw& law, const CoupledState& initial,
                       MasterSeed seed, double horizon, std::uint64_t max_events) {
  check_coupled(initial);
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  const std::size_t n = initial.a.size();
  const std::size_t gases = law.gas_count();
  for (std::size_t i = 0; i < n; ++i)
    if (initial.a[i] > gases || initial.b[i] > gases)
      throw std::invalid_argument("initial state holds a gas outside the law");

  CoupledRun out;
  out.final = initial;
  CoupledState& s = out.final;
  Tally tally_a(s.a, gases), tally_b(s.b, gases);

  const CategoricalLaw pair_law(law.probabilities());
  std::vector<SiteStream> streams;
  std::vector<Draw> pending;
  streams.reserve(n);
  pending.reserve(n);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (std::size_t i = 0; i < n; ++i) {
    streams.emplace_back(seed, i, pair_law);
    pending.push_back(streams.back().next());
    queue.push({pending.back().time, i});
  }

  std::size_t violations = monotonicity_check(s).size();
  if (violations > 0) out.first_violation = 0.0;
  auto both_absorbed = [&] { return tally_a.absorbed() && tally_b.absorbed(); };

  while (out.events < max_events && !both_absorbed() && queue.top().first <= horizon) {
    const std::size_t site = queue.top().second;
    queue.pop();
    const Draw d = pending[site];
    pending[site] = streams[site].next();
    queue.push({pending[site].time, site});

    // Sites an arrival can touch: the target and its distinct neighbours.
    std::size_t touched[3] = {site, 0, 0};
    std::size_t m = 1;
    for (int offset : {-1, +1}) {
      auto nb = s.a.neighbor(site, offset);
      if (nb && std::find(touched, touched + m, *nb) == touched + m) touched[m++] = *nb;
    }
    State before_a[3], before_b[3];
    for (std::size_t k = 0; k < m; ++k) {
      before_a[k] = s.a[touched[k]];
      before_b[k] = s.b[touched[k]];
      if (is_violation(s, touched[k])) --violations;
    }
    const GasPair pair = law.pairs()[d.category];
    apply_arrival_in_place(s.a, site, pair.first, d.order);
    apply_arrival_in_place(s.b, site, pair.second, d.order);
    for (std::size_t k = 0; k < m; ++k) {
      tally_a.move(before_a[k], s.a[touched[k]]);
      tally_b.move(before_b[k], s.b[touched[k]]);
      if (is_violation(s, touched[k])) ++violations;
    }
    ++out.events;
    out.time = d.time;
    if (violations > 0 && !out.first_violation) out.first_violation = d.time;
  }
  out.absorbed_a = tally_a.absorbed();
  out.absorbed_b = tally_b.absorbed();
  return out;
}

ViolationReport violation_frequency(const JointArrivalLaw& law, std::size_t size,
                                    Boundary boundary, double horizon, std::uint64_t runs,
                                    MasterSeed seed, unsigned threads) {
  if (runs == 0) throw std::invalid_argument("runs must be at least 1");
  if (size == 0) throw std::invalid_argument("lattice must have at least one site");
  const CoupledState initial{Configuration::uniform(size, kVacant, boundary),
                             Configuration::uniform(size, kVacant, boundary)};
  std::vector<std::optional<double>> first(runs);
  detail::parallel_for(runs, threads, [&](std::uint64_t r) {
    MasterSeed s{derive_seed(seed.value, r, kCoupledTag)};
    first[r] = run_coupled(law, initial, s, horizon, 10000ULL * size).first_violation;
  });
  ViolationReport report;
  report.runs = runs;
  double sum = 0.0;
  for (const auto& f : first) {
    if (!f) continue;
    ++report.violating;
    sum += *f;
  }
  if (report.violating) report.mean_first_violation = sum / static_cast<double>(report.violating);
  return report;
}

}  // namespace catsurf
