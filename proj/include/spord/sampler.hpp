#pragma once

#include "spord/constraints.hpp"
#include "spord/data.hpp"
#include "spord/diagnostics.hpp"
#include "spord/draws.hpp"
#include "spord/model.hpp"
#include "spord/rng.hpp"
#include "spord/spatial_graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spord {

struct McmcConfig {
  int chains = 5;
  long iterations = 6000;  // per chain, including burn-in
  long burnin = 1000;
  long thin = 25;
  std::uint64_t seed = 1;
  long adapt_window = 50;
  double target_accept_scalar = 0.44;
  double target_accept_vector = 0.234;
  double sigma_max = kDefaultSigmaMax;

  long stored_per_chain() const { return (iterations - burnin) / thin; }
  void validate() const;
};

// One Metropolis update block of the Gibbs sweep. Sweep order is fixed:
// omega blocks, alpha blocks, theta, sigma, lambda.
struct Block {
  enum class Kind { kOmega, kAlpha, kTheta, kSigma, kLambda };
  Kind kind;
  Index index = 0;  // cut group for kOmega, additive factor for kAlpha
  std::string name;
  Index dim = 1;
};

std::vector<Block> make_blocks(const ModelSpec& spec, const CutLayout& cuts, Index n_areas);

// Deterministic starting point: uniform delta (so kappa = logit(j/J)),
// zero effects, sigma = 0.1, lambda = 0.5.
ParameterState init_state(const ModelSpec& spec, const SpatialGraph& graph);

// Single-chain adaptive Metropolis-within-Gibbs runner. Proposal scales adapt
// by Robbins-Monro during burn-in only and are frozen afterwards. All inputs
// are shared immutable; the runner owns its state and RNG stream.
class ChainRunner {
 public:
  ChainRunner(const CellTable& cells, const ModelSpec& spec, const SpatialGraph& graph,
              const ConstraintSet& cons, const McmcConfig& config, int chain_index);

  // One random-walk Metropolis update of one block against the full log
  // posterior. Proposals outside the prior support are rejected, not errors.
  bool step_block(const Block& block, double scale);

  ChainDraws run();

  const ParameterState& state() const { return state_; }
  void set_state(const ParameterState& s);
  double current_loglik() const { return cur_total_ll_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  double scale_of(const Block& b) const;

 private:
  void recompute_caches();
  double target_accept(const Block& b) const;

  const CellTable& cells_;
  const ModelSpec& spec_;
  const SpatialGraph& graph_;
  const ConstraintSet& cons_;
  const McmcConfig& config_;
  std::vector<Block> blocks_;
  ParameterState state_;
  LoglikEvaluator eval_;
  Rng rng_;

  // cached pieces of the log posterior at the current state
  Vec cur_group_ll_;
  Vec cur_prior_omega_;
  double cur_total_ll_ = 0.0;
  double cur_struct_quad_ = 0.0;
  double cur_sqnorm_ = 0.0;
  double cur_lcar_ = 0.0;

  // per-block adaptation state
  std::vector<double> log_scale_;
  std::vector<long> window_accepts_, window_proposals_;
  std::vector<long> post_accepts_, post_proposals_;

  // scratch
  Vec prop_group_ll_;
};

ChainDraws run_chain(const CellTable& cells, const ModelSpec& spec, const SpatialGraph& graph,
                     const ConstraintSet& cons, const McmcConfig& config, int chain_index);

struct RunResult {
  PosteriorDraws draws;
  ConvergenceReport report;
  std::vector<std::string> warnings;
  Index constraint_rows = 0;
  Index constraint_rank = 0;
};

// Full multi-chain fit: compiles cells and constraints, runs chains
// concurrently, and attaches the convergence report. Threshold violations
// are warnings, not errors.
RunResult run(const SurveyDataset& data, const ModelSpec& spec, const SpatialGraph& graph,
              const McmcConfig& config, const std::vector<std::string>& monitor_patterns,
              double rhat_max = 1.10, double ess_min = 100.0);

}  // namespace spord
