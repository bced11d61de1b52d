#pragma once

#include "spord/data.hpp"
#include "spord/poststrat.hpp"
#include "spord/spatial_graph.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spord {

// Ground-truth configuration for the synthetic generator. Cut points are
// drawn from their prior (one stick-breaking draw per block) unless
// uniform_kappa is set; additive effects are normal with sd alpha_sd before
// the constraint is applied; theta comes from the spatial prior at
// (sigma, lambda) and is then projected against the population-weighted
// constraints.
struct TruthConfig {
  double sigma = 0.5;
  double lambda = 0.7;
  double alpha_sd = 0.5;
  bool uniform_kappa = false;
  long pop_cell_min = 40;
  long pop_cell_max = 120;
};

struct SyntheticTruth {
  Mat omega;               // n_groups x (J-1)
  Mat kappa;               // n_groups x (J-1)
  std::vector<Vec> alpha;  // per additive factor
  Vec theta;               // K, projected against population weights
  double sigma = 0.0;
  double lambda = 0.0;

  ParameterState as_state() const;
};

// Regular lattice with 4-neighbour contiguity; area ids "a001", "a002", ...
SpatialGraph grid_graph(Index rows, Index cols);

std::pair<SyntheticTruth, PopulationTable> generate_population(const ModelSpec& spec,
                                                               const SpatialGraph& graph,
                                                               const TruthConfig& truth_config,
                                                               std::uint64_t seed);

// Two-stage sampling design: stratified SRS without replacement within each
// (area, stratum) population, then optional Bernoulli subsampling by the
// levels of a second factor. An empty stratum_factor means one stratum per
// area. quota applies per (area, stratum); fraction (when >= 0) overrides it.
struct SurveyDesign {
  std::string stratum_factor;
  long quota = 25;
  double fraction = -1.0;
  std::map<std::string, long> quota_override;  // per area id
  std::string second_stage_factor;
  std::map<std::string, double> second_stage_rate;  // by level; missing level = 1.0
};

SurveyDataset draw_survey(const SyntheticTruth& truth, const PopulationTable& pop,
                          const ModelSpec& spec, const SpatialGraph& graph,
                          const SurveyDesign& design, std::uint64_t seed);

}  // namespace spord
