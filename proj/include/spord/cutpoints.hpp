#pragma once

// Ordered cut points built from stick-breaking proportions.
//
// omega (J-1 proportions in (0,1))  ->  delta (J positive pieces summing to 1)
//                                   ->  kappa (J-1 strictly increasing cut points)
//
// With omega_j ~ Beta(1, J-j) the induced delta is Dirichlet(1,...,1), so every
// category carries equal prior probability while kappa stays ordered by
// construction. The sampler therefore proposes in omega (box constraints only).

#include "spord/types.hpp"

#include <limits>

namespace spord {

// Sampler-side bound keeping omega strictly inside (0,1).
inline constexpr double kOmegaGuard = 1e-9;

inline Vec sticks_to_delta(const Eigen::Ref<const Vec>& omega) {
  const Index jm1 = omega.size();
  Vec delta(jm1 + 1);
  double remaining = 1.0;  // stick length left after the first j pieces
  for (Index j = 0; j < jm1; ++j) {
    const double w = omega[j];
    if (!(w > 0.0 && w < 1.0)) throw std::domain_error("sticks_to_delta: omega outside (0,1)");
    delta[j] = remaining * w;
    remaining *= 1.0 - w;
  }
  delta[jm1] = remaining;
  return delta;
}

// Inverse of sticks_to_delta on the open simplex.
inline Vec delta_to_sticks(const Eigen::Ref<const Vec>& delta) {
  const Index j_cats = delta.size();
  if (j_cats < 2) throw std::domain_error("delta_to_sticks: need at least two categories");
  Vec tail(j_cats);  // tail[j] = delta[j+1] + ... + delta[J-1]
  tail[j_cats - 1] = 0.0;
  for (Index j = j_cats - 2; j >= 0; --j) tail[j] = tail[j + 1] + delta[j + 1];
  Vec omega(j_cats - 1);
  for (Index j = 0; j + 1 < j_cats; ++j) {
    if (!(delta[j] > 0.0)) throw std::domain_error("delta_to_sticks: delta must be positive");
    omega[j] = delta[j] / (delta[j] + tail[j]);
  }
  return omega;
}

// kappa_j = logit(delta_1 + ... + delta_j), evaluated as log(head/tail) with
// separately accumulated head and tail sums so cut points stay finite and
// ordered even when the cumulative sum is very close to 1.
inline Vec delta_to_kappa(const Eigen::Ref<const Vec>& delta) {
  const Index j_cats = delta.size();
  if (j_cats < 2) throw std::domain_error("delta_to_kappa: need at least two categories");
  for (Index j = 0; j < j_cats; ++j) {
    if (!(delta[j] > 0.0)) throw std::domain_error("delta_to_kappa: delta must be positive");
  }
  Vec tail(j_cats);
  tail[j_cats - 1] = 0.0;
  for (Index j = j_cats - 2; j >= 0; --j) tail[j] = tail[j + 1] + delta[j + 1];
  Vec kappa(j_cats - 1);
  double head = 0.0;
  for (Index j = 0; j + 1 < j_cats; ++j) {
    head += delta[j];
    if (tail[j] < std::numeric_limits<double>::min())
      throw std::domain_error("delta_to_kappa: cumulative sum reaches 1 before the last category");
    kappa[j] = std::log(head) - std::log(tail[j]);
  }
  return kappa;
}

inline Vec kappa_to_delta(const Eigen::Ref<const Vec>& kappa) {
  const Index jm1 = kappa.size();
  for (Index j = 1; j < jm1; ++j) {
    if (!(kappa[j] > kappa[j - 1]))
      throw std::domain_error("kappa_to_delta: kappa must be strictly increasing");
  }
  Vec delta(jm1 + 1);
  double prev = 0.0;
  for (Index j = 0; j < jm1; ++j) {
    const double g = logistic(kappa[j]);
    delta[j] = g - prev;
    prev = g;
  }
  delta[jm1] = 1.0 - prev;
  return delta;
}

inline Vec sticks_to_kappa(const Eigen::Ref<const Vec>& omega) {
  return delta_to_kappa(sticks_to_delta(omega));
}

// Log prior density of the stick proportions, omega_j ~ Beta(1, J-j):
// sum_j log(J-j) + (J-j-1) log(1-omega_j). Out-of-range omega yields -inf.
inline double log_prior_omega(const Eigen::Ref<const Vec>& omega) {
  const Index jm1 = omega.size();
  const double j_cats = static_cast<double>(jm1 + 1);
  double lp = 0.0;
  for (Index j = 0; j < jm1; ++j) {
    const double w = omega[j];
    if (!(w > 0.0 && w < 1.0)) return -std::numeric_limits<double>::infinity();
    const double b = j_cats - static_cast<double>(j + 1);
    lp += std::log(b) + (b - 1.0) * std::log1p(-w);
  }
  return lp;
}

}  // namespace spord
