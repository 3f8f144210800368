#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace kne::testing {

// Pearson goodness of fit of observed counts against probabilities.
// Cells with zero probability must have zero counts.
inline double chi_square_gof_pvalue(std::span<const std::size_t> counts, std::span<const double> probs) {
  double total = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probs[i];
    if (expected == 0.0) {
      if (counts[i] != 0) return 0.0;
      continue;
    }
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
    ++cells;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Two-sample homogeneity test on a 2 x m contingency table.
inline double chi_square_two_sample_pvalue(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  double na = 0.0, nb = 0.0;
  for (std::size_t x : a) na += static_cast<double>(x);
  for (std::size_t x : b) nb += static_cast<double>(x);
  const double n = na + nb;
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    if (col == 0.0) continue;
    const double ea = na * col / n, eb = nb * col / n;
    stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    ++cells;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace kne::testing
