#include "spord/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace spord {

std::optional<double> gelman_rubin(const std::vector<Vec>& chains) {
  const Index m = static_cast<Index>(chains.size());
  if (m < 2) return std::nullopt;
  const Index t = chains[0].size();
  if (t < 2) return std::nullopt;
  for (const auto& c : chains) {
    if (c.size() != t) throw input_error("gelman_rubin: chains of unequal length");
  }

  Vec means(m);
  double w = 0.0;
  for (Index i = 0; i < m; ++i) {
    means[i] = chains[i].mean();
    w += (chains[i].array() - means[i]).square().sum() / double(t - 1);
  }
  w /= double(m);
  if (w <= 0.0) return std::nullopt;  // all chains constant

  const double grand = means.mean();
  const double b_over_t = (means.array() - grand).square().sum() / double(m - 1);
  const double var_plus = (double(t - 1) / double(t)) * w + b_over_t;
  return std::sqrt(var_plus / w);
}

namespace {

// Integrated autocorrelation time of one chain by Geyer's rule: accumulate
// paired autocorrelations (rho_{2m} + rho_{2m+1}) while they stay positive.
double integrated_act(const Vec& x) {
  const Index t = x.size();
  const double mean = x.mean();
  const Arr centered = x.array() - mean;
  const double c0 = centered.square().sum() / double(t);
  if (c0 <= 0.0) return -1.0;  // constant chain

  const auto rho = [&](Index lag) {
    if (lag >= t) return 0.0;
    return (centered.head(t - lag) * centered.tail(t - lag)).sum() / double(t) / c0;
  };

  double tau = 1.0;  // rho_0
  for (Index mstep = 0;; ++mstep) {
    const Index l1 = 2 * mstep + 1;
    const Index l2 = 2 * mstep + 2;
    if (l1 >= t) break;
    const double pair = rho(l1) + rho(l2);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return tau;
}

}  // namespace

EssResult effective_sample_size(const std::vector<Vec>& chains) {
  Index total = 0;
  for (const auto& c : chains) total += c.size();
  if (total < 10) throw input_error("effective_sample_size: need at least 10 draws");

  EssResult out;
  bool any_variable = false;
  for (const auto& c : chains) {
    const double tau = integrated_act(c);
    if (tau < 0.0) {
      out.value += double(c.size());  // constant chain: report its draw count
    } else {
      any_variable = true;
      out.value += double(c.size()) / tau;
    }
  }
  out.degenerate = !any_variable;
  return out;
}

double quantile_linear(std::vector<double> values, double p) {
  if (values.empty()) throw input_error("quantile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = p * double(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - double(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

bool pattern_match(const std::string& pattern, const std::string& name) {
  // iterative glob with '*' only
  std::size_t p = 0, n = 0, star = std::string::npos, match = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      match = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++match;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

ConvergenceReport summarize(const PosteriorDraws& draws,
                            const std::vector<std::string>& monitor_patterns) {
  if (draws.chains.empty() || draws.total_stored() == 0)
    throw input_error("summarize: no stored draws");

  ConvergenceReport report;
  std::vector<bool> used(monitor_patterns.size(), false);

  for (Index col = 0; col < draws.layout.n_cols(); ++col) {
    const std::string& name = draws.layout.names[col];
    bool monitored = false;
    for (std::size_t i = 0; i < monitor_patterns.size(); ++i) {
      if (pattern_match(monitor_patterns[i], name)) {
        monitored = true;
        used[i] = true;
      }
    }
    if (!monitored) continue;

    std::vector<Vec> per_chain;
    per_chain.reserve(draws.chains.size());
    for (const auto& c : draws.chains) per_chain.push_back(c.samples.col(col));
    const Vec pooled = draws.pooled_column(col);

    SummaryRow row;
    row.name = name;
    row.rhat = gelman_rubin(per_chain);
    const EssResult ess = effective_sample_size(per_chain);
    row.ess = ess.value;
    row.ess_degenerate = ess.degenerate;
    row.mean = pooled.mean();
    row.sd = pooled.size() > 1
                 ? std::sqrt((pooled.array() - row.mean).square().sum() / double(pooled.size() - 1))
                 : 0.0;
    std::vector<double> vals(pooled.data(), pooled.data() + pooled.size());
    row.q025 = quantile_linear(vals, 0.025);
    row.q500 = quantile_linear(vals, 0.5);
    row.q975 = quantile_linear(vals, 0.975);
    report.rows.push_back(std::move(row));
  }

  for (std::size_t i = 0; i < monitor_patterns.size(); ++i) {
    if (!used[i]) report.unmatched_patterns.push_back(monitor_patterns[i]);
  }
  return report;
}

std::vector<std::string> ConvergenceReport::threshold_failures(double rhat_max,
                                                               double ess_min) const {
  std::vector<std::string> failures;
  for (const auto& row : rows) {
    const bool rhat_bad = row.rhat.has_value() && *row.rhat > rhat_max;
    const bool ess_bad = !row.ess_degenerate && row.ess < ess_min;
    if (rhat_bad || ess_bad) failures.push_back(row.name);
  }
  return failures;
}

}  // namespace spord
