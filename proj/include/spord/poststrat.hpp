#pragma once

#include "spord/data.hpp"
#include "spord/draws.hpp"
#include "spord/model.hpp"
#include "spord/spatial_graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spord {

// Known population counts per post-stratification cell. Rows always carry the
// cut-factor combination; additive factors are optional (absent factors
// contribute no shift, i.e. estimates refer to an average level under a
// zero-sum constraint).
struct PopulationTable {
  std::vector<Index> cut_group;
  std::vector<Index> add_factor_idx;           // indices into spec.additive_factors
  std::vector<std::vector<Index>> add_levels;  // [present additive factor][row]
  std::vector<Index> area;
  Vec count;
  Vec area_total;  // N_k per area (length K)

  Index n_rows() const { return static_cast<Index>(cut_group.size()); }
  // Population-weighted constraint rows (one per level of each present
  // additive factor, or a single row of area totals), for synthetic truth.
  Mat constraint_weights(const ModelSpec& spec, Index n_areas) const;
};

struct AreaEstimates {
  std::vector<std::string> area_ids;
  Mat mean, sd, q025, q500, q975;  // K x J
  std::vector<bool> valid;         // false when N_k = 0
};

// Per stored draw, the population-weighted average of cell probabilities per
// area and category; summaries are taken across draws afterwards, never the
// other way around.
AreaEstimates poststratify(const PosteriorDraws& draws, const PopulationTable& pop,
                           const ModelSpec& spec, const SpatialGraph& graph);

// Fraction of stored draws with theta_k < 0.
double relevance(const PosteriorDraws& draws, Index area);
Vec relevance_all(const PosteriorDraws& draws);

// "high" above the upper threshold, "low" below the lower one, "" otherwise.
std::string relevance_flag(double prob, double hi = 0.8, double lo = 0.2);

struct PpcTable {
  std::vector<std::string> area_ids;
  Mat pred_mean, pred_lo, pred_hi, observed;  // n_areas x J, in percent
  std::vector<std::string> excluded;          // requested areas with no respondents
};

// Posterior predictive assessment: per draw and area, the sampled cells'
// outcomes are re-simulated from that draw's category probabilities and
// aggregated to area percentages; the table reports mean and central 95%
// interval across draws next to the observed percentages.
PpcTable posterior_predictive_check(const PosteriorDraws& draws, const CellTable& cells,
                                    const ModelSpec& spec, const SpatialGraph& graph,
                                    const std::vector<Index>& areas, std::uint64_t seed);

}  // namespace spord
