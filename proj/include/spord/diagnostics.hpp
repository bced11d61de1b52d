#pragma once

#include "spord/draws.hpp"
#include "spord/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spord {

// Classic potential scale reduction over M >= 2 chains of equal length
// T >= 2: sqrt(((T-1)/T * W + B/T) / W). Returns nullopt when undefined
// (fewer than two chains, T < 2, or all chains constant).
std::optional<double> gelman_rubin(const std::vector<Vec>& chains);

struct EssResult {
  double value = 0.0;
  bool degenerate = false;  // (near-)constant input; value is the draw count
};

// Effective sample size with Geyer's initial-positive-sequence truncation,
// computed per chain and summed.
EssResult effective_sample_size(const std::vector<Vec>& chains);

// Empirical quantile with inclusive linear interpolation (R type 7).
double quantile_linear(std::vector<double> values, double p);

struct SummaryRow {
  std::string name;
  std::optional<double> rhat;
  double ess = 0.0;
  bool ess_degenerate = false;
  double mean = 0.0, sd = 0.0;
  double q025 = 0.0, q500 = 0.0, q975 = 0.0;
};

struct ConvergenceReport {
  std::vector<SummaryRow> rows;
  std::vector<std::string> unmatched_patterns;

  // Names of monitored scalars violating the thresholds. Degenerate scalars
  // (constant draws) have no defined R-hat and are not counted as failures.
  std::vector<std::string> threshold_failures(double rhat_max, double ess_min) const;
};

// Glob-style matching with '*' wildcards (no other metacharacters).
bool pattern_match(const std::string& pattern, const std::string& name);

ConvergenceReport summarize(const PosteriorDraws& draws,
                            const std::vector<std::string>& monitor_patterns);

}  // namespace spord
