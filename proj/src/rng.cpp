#include "catsurf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace catsurf {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

enum : std::uint64_t { kClockTag = 1, kTypeTag = 2, kOrderTag = 3 };

std::uint64_t counter_word(std::uint64_t seed, std::uint64_t k) {
  return mix64(seed + k * kGolden);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t tag) {
  return mix64(mix64(mix64(master) ^ index) ^ (tag * kGolden));
}

double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

CategoricalLaw::CategoricalLaw(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  if (probabilities_.empty()) throw std::invalid_argument("empty categorical law");
  for (double p : probabilities_)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0,1]");
  double sum = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("probabilities must sum to 1");
  cumulative_.resize(probabilities_.size());
  std::partial_sum(probabilities_.begin(), probabilities_.end(), cumulative_.begin());
  cumulative_.back() = 1.0;
}

std::size_t CategoricalLaw::sample(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto i = static_cast<std::size_t>(it - cumulative_.begin());
  i = std::min(i, cumulative_.size() - 1);
  // Never return a zero-probability category, even on a rounding edge.
  while (probabilities_[i] == 0.0 && i > 0) --i;
  while (probabilities_[i] == 0.0) ++i;
  return i;
}

CategoricalLaw type_law(const ModelSpec& spec) { return CategoricalLaw(spec.rates()); }

SiteStream::SiteStream(MasterSeed seed, std::size_t site, CategoricalLaw law)
    : site_(site),
      clock_(derive_seed(seed.value, site, kClockTag)),
      type_(derive_seed(seed.value, site, kTypeTag)),
      order_(derive_seed(seed.value, site, kOrderTag)),
      law_(std::move(law)) {}

Draw SiteStream::next() {
  ++k_;
  time_ += -std::log(to_open_unit(counter_word(clock_, k_)));
  Draw d;
  d.time = time_;
  d.k = k_;
  d.category = law_.sample(to_open_unit(counter_word(type_, k_)));
  d.order = (counter_word(order_, k_) >> 63) ? NeighborOrder::right_first()
                                             : NeighborOrder::left_first();
  return d;
}

SiteStream derive_stream(MasterSeed seed, std::size_t site, const ModelSpec& spec) {
  return SiteStream(seed, site, type_law(spec));
}

Arrival next_arrival(SiteStream& stream, const ModelSpec& spec) {
  Draw d = stream.next();
  State type = static_cast<State>(d.category + 1);
  if (spec.is_infinite() && d.category == 1) type = kFreshMolecule;
  return {d.time, type, d.order};
}

}  // namespace catsurf
