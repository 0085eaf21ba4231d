#include "catsurf/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace catsurf {

namespace {

constexpr double kRateSumTolerance = 1e-12;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << what << " must lie in [0,1], got " << p;
    throw std::invalid_argument(msg.str());
  }
}

bool differs(State neighbor, State gas) { return neighbor != kVacant && neighbor != gas; }

}  // namespace

GasCount GasCount::finite(int n) {
  if (n < 2) throw std::invalid_argument("gas count must be at least 2");
  return GasCount{n};
}

std::string GasCount::str() const { return is_infinite() ? "inf" : std::to_string(n_); }

ModelSpec ModelSpec::finite(std::vector<double> rates) {
  if (rates.size() < 2) throw std::invalid_argument("need at least two gases");
  for (double p : rates) check_probability(p, "rate");
  double sum = std::accumulate(rates.begin(), rates.end(), 0.0);
  if (std::abs(sum - 1.0) > kRateSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "rates must sum to 1, got " << sum;
    throw std::invalid_argument(msg.str());
  }
  return ModelSpec(Variant::Finite, std::move(rates));
}

ModelSpec ModelSpec::equal_others(int n, double p1) {
  if (n < 2) throw std::invalid_argument("gas count must be at least 2");
  check_probability(p1, "p1");
  std::vector<double> rates(static_cast<std::size_t>(n), (1.0 - p1) / (n - 1));
  rates[0] = p1;
  // Absorb the rounding residue into the last rate so the sum check holds.
  double rest = std::accumulate(rates.begin(), rates.end() - 1, 0.0);
  rates.back() = std::max(0.0, 1.0 - rest);
  return finite(std::move(rates));
}

ModelSpec ModelSpec::infinite(double p1) {
  check_probability(p1, "p1");
  return ModelSpec(Variant::InfiniteGas, {p1, 1.0 - p1});
}

ModelSpec ModelSpec::equal_others(GasCount n, double p1) {
  return n.is_infinite() ? infinite(p1) : equal_others(n.value(), p1);
}

GasCount ModelSpec::gas_count() const {
  return is_infinite() ? GasCount::infinite() : GasCount::finite(static_cast<int>(rates_.size()));
}

double ModelSpec::rate(State g) const {
  if (is_infinite()) return g == kGasOne ? rates_[0] : rates_[1];
  if (g == kVacant || g > rates_.size()) throw std::out_of_range("no such gas");
  return rates_[g - 1];
}

std::string ModelSpec::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (is_infinite()) {
    out << "n=inf p1=" << rates_[0];
    return out.str();
  }
  out << "n=" << rates_.size() << " rates=";
  for (std::size_t i = 0; i < rates_.size(); ++i) out << (i ? "," : "") << rates_[i];
  return out.str();
}

std::string_view to_string(Boundary b) { return b == Boundary::Torus ? "torus" : "blocked"; }

Boundary parse_boundary(std::string_view text) {
  if (text == "torus") return Boundary::Torus;
  if (text == "blocked") return Boundary::Blocked;
  throw std::invalid_argument("unknown boundary '" + std::string(text) + "'");
}

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Stick: return "stick";
    case OutcomeKind::React: return "react";
    case OutcomeKind::Noop: return "noop";
  }
  return "?";
}

Configuration Configuration::parse(std::string_view text, Boundary boundary) {
  std::vector<State> sites;
  sites.reserve(text.size());
  for (char c : text) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("configuration text must be digits 0-9, got '" +
                                  std::string(1, c) + "'");
    sites.push_back(static_cast<State>(c - '0'));
  }
  return Configuration(std::move(sites), boundary);
}

std::optional<std::size_t> Configuration::neighbor(std::size_t site, int offset) const {
  const auto n = static_cast<std::ptrdiff_t>(sites_.size());
  auto j = static_cast<std::ptrdiff_t>(site) + offset;
  if (boundary_ == Boundary::Torus) return static_cast<std::size_t>(((j % n) + n) % n);
  if (j < 0 || j >= n) return std::nullopt;
  return static_cast<std::size_t>(j);
}

std::string Configuration::str() const {
  std::string out;
  out.reserve(sites_.size());
  for (State s : sites_) out.push_back(s <= 9 ? static_cast<char>('0' + s) : 'x');
  return out;
}

bool satisfies_adjacency(const Configuration& config) {
  const std::size_t n = config.size();
  if (n < 2) return true;
  const std::size_t pairs = config.boundary() == Boundary::Torus ? n : n - 1;
  for (std::size_t i = 0; i < pairs; ++i) {
    State a = config[i], b = config[(i + 1) % n];
    if (a != kVacant && b != kVacant && a != b) return false;
  }
  return true;
}

std::optional<std::string> check_configuration(const Configuration& config,
                                               const ModelSpec& spec) {
  if (config.size() == 0) return "empty lattice";
  if (!spec.is_infinite()) {
    const auto n = spec.rates().size();
    for (std::size_t i = 0; i < config.size(); ++i)
      if (config[i] > n)
        return "site " + std::to_string(i) + " holds state " + std::to_string(config[i]) +
               " but there are only " + std::to_string(n) + " gases";
  }
  if (!satisfies_adjacency(config)) return "adjacent sites hold different gases";
  return std::nullopt;
}

ArrivalEffect apply_arrival_in_place(Configuration& config, std::size_t site, State gas,
                                     NeighborOrder order) {
  if (config[site] != kVacant) return {OutcomeKind::Noop, std::nullopt};
  for (int offset : order.offsets) {
    auto nb = config.neighbor(site, offset);
    if (nb && *nb != site && differs(config[*nb], gas)) {
      config[*nb] = kVacant;
      return {OutcomeKind::React, *nb};
    }
  }
  config[site] = gas;
  return {OutcomeKind::Stick, std::nullopt};
}

ArrivalOutcome apply_arrival(const Configuration& config, std::size_t site, State gas,
                             NeighborOrder order) {
  if (site >= config.size())
    throw std::invalid_argument("site " + std::to_string(site) + " outside lattice of size " +
                                std::to_string(config.size()));
  if (gas == kVacant) throw std::invalid_argument("arriving gas must be nonzero");
  if (!satisfies_adjacency(config))
    throw std::invalid_argument("configuration violates the adjacency invariant: " +
                                config.str());
  if (order.offsets[0] == order.offsets[1])
    throw std::invalid_argument("neighbor order must be a strict permutation");
  ArrivalOutcome out{OutcomeKind::Noop, std::nullopt, config};
  auto effect = apply_arrival_in_place(out.result, site, gas, order);
  out.kind = effect.kind;
  out.victim = effect.victim;
  return out;
}

std::optional<State> is_absorbing(const Configuration& config) {
  if (config.size() == 0) return std::nullopt;
  State first = config[0];
  if (first == kVacant) return std::nullopt;
  for (State s : config.sites())
    if (s != first) return std::nullopt;
  return first;
}

}  // namespace catsurf
