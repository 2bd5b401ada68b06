#include "emitsim/model.hpp"

#include <algorithm>
#include <vector>

namespace emitsim {

void ModeSet::validate() const {
  const Index n = offsets.size();
  if (n < 1) throw DomainError("ModeSet: at least one mode required");
  if (couplings.size() != n)
    throw DomainError("ModeSet: offsets and couplings differ in length");
  if (!offsets.allFinite()) throw DomainError("ModeSet: non-finite offset");
  if (!couplings.allFinite()) throw DomainError("ModeSet: non-finite coupling");
  if (geometry) {
    if (static_cast<Index>(geometry->size()) != n)
      throw DomainError("ModeSet: geometry length differs from offsets");
    return;
  }
  std::vector<double> sorted(offsets.data(), offsets.data() + n);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("ModeSet: duplicate offsets require geometry");
}

void SpectrumResult::validate() const {
  if (probabilities.size() != frequencies.size())
    throw DomainError("SpectrumResult: length mismatch");
  if (angles && angles->size() != frequencies.size())
    throw DomainError("SpectrumResult: angle length mismatch");
  constexpr double slack = 1e-12;
  if ((probabilities.array() < -slack).any() || (probabilities.array() > 1 + slack).any())
    throw DomainError("SpectrumResult: probability outside [0, 1]");
  if (probabilities.sum() > 1 + slack)
    throw DomainError("SpectrumResult: total probability exceeds 1");
}

double natural_units_timescale(double epsilon, double eta) {
  if (!(epsilon > 0)) throw DomainError("natural_units_timescale: epsilon must be > 0");
  if (eta == 0) throw DomainError("natural_units_timescale: eta must be nonzero");
  return epsilon / (2 * std::numbers::pi * eta * eta);
}

} // namespace emitsim
