#pragma once

#include <Eigen/Core>

namespace emitsim {

/// Pairwise (tree) sum of term(0) + ... + term(n-1). The tree shape depends
/// only on n, so the result is reproducible.
template <typename T, typename F>
T pairwise_sum(Eigen::Index begin, Eigen::Index end, const F& term) {
  const Eigen::Index n = end - begin;
  if (n <= 16) {
    T s{};
    for (Eigen::Index i = begin; i < end; ++i) s += term(i);
    return s;
  }
  const Eigen::Index mid = begin + n / 2;
  return pairwise_sum<T>(begin, mid, term) + pairwise_sum<T>(mid, end, term);
}

} // namespace emitsim
