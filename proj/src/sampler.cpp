#include "spord/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace spord {

void McmcConfig::validate() const {
  if (chains < 1) throw input_error("mcmc: chains must be >= 1");
  if (burnin < 0 || burnin >= iterations) throw input_error("mcmc: need 0 <= burnin < iterations");
  if (thin < 1) throw input_error("mcmc: thin must be >= 1");
  if (stored_per_chain() < 1) throw input_error("mcmc: (iterations - burnin)/thin must be >= 1");
  if (adapt_window < 1) throw input_error("mcmc: adapt_window must be >= 1");
  if (!(sigma_max > 0.0)) throw input_error("mcmc: sigma_max must be positive");
}

std::vector<Block> make_blocks(const ModelSpec& spec, const CutLayout& cuts, Index n_areas) {
  std::vector<Block> blocks;
  const Index jm1 = spec.n_categories - 1;
  for (Index g = 0; g < cuts.n_groups(); ++g)
    blocks.push_back({Block::Kind::kOmega, g, "omega[" + cuts.label(g) + "]", jm1});
  for (Index f = 0; f < spec.n_additive(); ++f) {
    const Index free_dim = spec.factor(spec.additive_factors[f]).n_levels() - 1;
    blocks.push_back({Block::Kind::kAlpha, f, "alpha[" + spec.additive_factors[f] + "]",
                      std::max<Index>(free_dim, 1)});
  }
  if (spec.include_spatial) {
    blocks.push_back({Block::Kind::kTheta, 0, "theta", n_areas});
    blocks.push_back({Block::Kind::kSigma, 0, "sigma", 1});
    blocks.push_back({Block::Kind::kLambda, 0, "lambda", 1});
  }
  return blocks;
}

ParameterState init_state(const ModelSpec& spec, const SpatialGraph& graph) {
  spec.validate();
  const CutLayout cuts(spec);
  const Index jm1 = spec.n_categories - 1;
  ParameterState state;
  state.omega.resize(cuts.n_groups(), jm1);
  state.kappa.resize(cuts.n_groups(), jm1);
  Vec omega_row(jm1);
  for (Index j = 0; j < jm1; ++j)
    omega_row[j] = 1.0 / double(spec.n_categories - j);  // prior mean, uniform delta
  const Vec kappa_row = sticks_to_kappa(omega_row);
  for (Index g = 0; g < cuts.n_groups(); ++g) {
    state.omega.row(g) = omega_row.transpose();
    state.kappa.row(g) = kappa_row.transpose();
  }
  for (const auto& fname : spec.additive_factors)
    state.alpha.push_back(Vec::Zero(spec.factor(fname).n_levels()));
  state.theta = Vec::Zero(graph.size());
  state.hyper.sigma = 0.1;
  state.hyper.lambda = 0.5;
  return state;
}

ChainRunner::ChainRunner(const CellTable& cells, const ModelSpec& spec, const SpatialGraph& graph,
                         const ConstraintSet& cons, const McmcConfig& config, int chain_index)
    : cells_(cells),
      spec_(spec),
      graph_(graph),
      cons_(cons),
      config_(config),
      blocks_(make_blocks(spec, CutLayout(spec), graph.size())),
      state_(init_state(spec, graph)),
      eval_(cells, spec),
      rng_(substream_seed(config.seed, std::uint64_t(chain_index) + 1)) {
  config_.validate();
  if (cells.n_categories != spec.n_categories || cells.n_groups != state_.omega.rows())
    throw input_error("mcmc: cell table does not match the model spec");
  log_scale_.resize(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    switch (blocks_[b].kind) {
      case Block::Kind::kOmega:
      case Block::Kind::kAlpha:
      case Block::Kind::kLambda:
        log_scale_[b] = std::log(0.1);
        break;
      case Block::Kind::kTheta:
        log_scale_[b] = std::log(0.1);
        break;
      case Block::Kind::kSigma:
        log_scale_[b] = std::log(0.25);
        break;
    }
  }
  window_accepts_.assign(blocks_.size(), 0);
  window_proposals_.assign(blocks_.size(), 0);
  post_accepts_.assign(blocks_.size(), 0);
  post_proposals_.assign(blocks_.size(), 0);
  recompute_caches();
  if (!std::isfinite(cur_total_ll_) || !std::isfinite(cur_lcar_))
    throw numeric_error("mcmc: non-finite log posterior at initialization");
}

void ChainRunner::set_state(const ParameterState& s) {
  state_ = s;
  recompute_caches();
}

double ChainRunner::scale_of(const Block& b) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].kind == b.kind && blocks_[i].index == b.index)
      return std::exp(log_scale_[i]);
  }
  throw input_error("unknown block '" + b.name + "'");
}

void ChainRunner::recompute_caches() {
  eval_.refresh_shifts(state_);
  cur_group_ll_.resize(cells_.n_groups);
  for (Index g = 0; g < cells_.n_groups; ++g) cur_group_ll_[g] = eval_.group(state_, g);
  cur_total_ll_ = cells_.n_groups > 0 ? cur_group_ll_.sum() : 0.0;
  cur_prior_omega_.resize(state_.omega.rows());
  for (Index g = 0; g < state_.omega.rows(); ++g)
    cur_prior_omega_[g] = log_prior_omega(state_.omega.row(g));
  if (spec_.include_spatial) {
    cur_struct_quad_ = graph_.structure_quadratic(state_.theta);
    cur_sqnorm_ = state_.theta.squaredNorm();
    cur_lcar_ = lcar_logdensity_terms(cur_struct_quad_, cur_sqnorm_, graph_.r_eigenvalues(),
                                      state_.hyper);
  } else {
    cur_struct_quad_ = cur_sqnorm_ = cur_lcar_ = 0.0;
  }
  prop_group_ll_.resize(cells_.n_groups);
}

double ChainRunner::target_accept(const Block& b) const {
  return b.dim > 1 ? config_.target_accept_vector : config_.target_accept_scalar;
}

bool ChainRunner::step_block(const Block& block, double scale) {
  const auto accept_ratio = [&](double log_ratio) {
    return log_ratio >= 0.0 || std::log(rng_.uniform()) < log_ratio;
  };

  switch (block.kind) {
    case Block::Kind::kOmega: {
      const Index g = block.index;
      const Index jm1 = state_.omega.cols();
      Vec prop(jm1);
      bool in_support = true;
      for (Index j = 0; j < jm1; ++j) {
        prop[j] = state_.omega(g, j) + scale * rng_.normal();
        if (!(prop[j] > kOmegaGuard && prop[j] < 1.0 - kOmegaGuard)) in_support = false;
      }
      if (!in_support) return false;
      const Vec prop_kappa = sticks_to_kappa(prop);
      const double prop_ll = eval_.group_with(prop_kappa, g);
      const double prop_prior = log_prior_omega(prop);
      const double log_ratio =
          (prop_ll + prop_prior) - (cur_group_ll_[g] + cur_prior_omega_[g]);
      if (!accept_ratio(log_ratio)) return false;
      state_.omega.row(g) = prop.transpose();
      state_.kappa.row(g) = prop_kappa.transpose();
      cur_total_ll_ += prop_ll - cur_group_ll_[g];
      cur_group_ll_[g] = prop_ll;
      cur_prior_omega_[g] = prop_prior;
      return true;
    }

    case Block::Kind::kAlpha: {
      const Index f = block.index;
      const Vec old_alpha = state_.alpha[f];
      const Index n_levels = old_alpha.size();
      Vec prop = old_alpha;
      if (n_levels == 1) {
        // single-level factor: pinned to zero by either constraint
        return true;
      }
      for (Index h = 1; h < n_levels; ++h) prop[h] = old_alpha[h] + scale * rng_.normal();
      prop[0] = spec_.alpha_constraint == AlphaConstraint::kZeroSum
                    ? -prop.tail(n_levels - 1).sum()
                    : 0.0;
      state_.alpha[f] = prop;
      eval_.refresh_shifts(state_);
      for (Index g = 0; g < cells_.n_groups; ++g) prop_group_ll_[g] = eval_.group(state_, g);
      const double prop_total = cells_.n_groups > 0 ? prop_group_ll_.sum() : 0.0;
      if (!accept_ratio(prop_total - cur_total_ll_)) {
        state_.alpha[f] = old_alpha;
        eval_.refresh_shifts(state_);
        return false;
      }
      cur_group_ll_ = prop_group_ll_;
      cur_total_ll_ = prop_total;
      return true;
    }

    case Block::Kind::kTheta: {
      const Vec old_theta = state_.theta;
      Vec step(old_theta.size());
      for (Index k = 0; k < step.size(); ++k) step[k] = scale * rng_.normal();
      // project the whole proposal so the chain stays on the constraint
      // subspace; the projected increment is still symmetric
      const Vec prop = cons_.project(old_theta + step);
      const double prop_struct = graph_.structure_quadratic(prop);
      const double prop_sqnorm = prop.squaredNorm();
      const double prop_lcar =
          lcar_logdensity_terms(prop_struct, prop_sqnorm, graph_.r_eigenvalues(), state_.hyper);
      state_.theta = prop;
      eval_.refresh_shifts(state_);
      for (Index g = 0; g < cells_.n_groups; ++g) prop_group_ll_[g] = eval_.group(state_, g);
      const double prop_total = cells_.n_groups > 0 ? prop_group_ll_.sum() : 0.0;
      const double log_ratio = (prop_total + prop_lcar) - (cur_total_ll_ + cur_lcar_);
      if (!accept_ratio(log_ratio)) {
        state_.theta = old_theta;
        eval_.refresh_shifts(state_);
        return false;
      }
      cur_group_ll_ = prop_group_ll_;
      cur_total_ll_ = prop_total;
      cur_struct_quad_ = prop_struct;
      cur_sqnorm_ = prop_sqnorm;
      cur_lcar_ = prop_lcar;
      return true;
    }

    case Block::Kind::kSigma: {
      const double prop = state_.hyper.sigma + scale * rng_.normal();
      if (!(prop > 0.0 && prop <= config_.sigma_max)) return false;
      const LcarHyper hyper{prop, state_.hyper.lambda};
      const double prop_lcar =
          lcar_logdensity_terms(cur_struct_quad_, cur_sqnorm_, graph_.r_eigenvalues(), hyper);
      if (!accept_ratio(prop_lcar - cur_lcar_)) return false;
      state_.hyper.sigma = prop;
      cur_lcar_ = prop_lcar;
      return true;
    }

    case Block::Kind::kLambda: {
      const double prop = state_.hyper.lambda + scale * rng_.normal();
      if (!(prop > kLambdaGuard && prop < 1.0 - kLambdaGuard)) return false;
      const LcarHyper hyper{state_.hyper.sigma, prop};
      const double prop_lcar =
          lcar_logdensity_terms(cur_struct_quad_, cur_sqnorm_, graph_.r_eigenvalues(), hyper);
      if (!accept_ratio(prop_lcar - cur_lcar_)) return false;
      state_.hyper.lambda = prop;
      cur_lcar_ = prop_lcar;
      return true;
    }
  }
  return false;
}

ChainDraws ChainRunner::run() {
  const ParamLayout layout = ParamLayout::make(spec_, graph_);
  ChainDraws draws;
  draws.samples.resize(config_.stored_per_chain(), layout.n_cols());
  draws.iterations.reserve(config_.stored_per_chain());

  // Hold the hyperparameter blocks for the first stretch of burn-in, with
  // sigma pinned at a loose value. At the deterministic start theta is
  // exactly zero, where the sigma conditional is proportional to sigma^-K:
  // every downward move is accepted and sigma ratchets towards zero faster
  // than theta can leave the origin, freezing the field. Pinning sigma wide
  // lets theta reach the data scale first; sigma is then released above its
  // posterior mass and descends without entering the funnel neck. Only the
  // burn-in trajectory changes; the post-burn-in kernel is untouched.
  const long hyper_warmup = spec_.include_spatial ? config_.burnin / 5 : 0;
  if (hyper_warmup > 0) {
    state_.hyper.sigma = std::min(1.0, config_.sigma_max);
    recompute_caches();
  }

  long adapt_batch = 0;
  Index stored = 0;
  for (long t = 1; t <= config_.iterations; ++t) {
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const bool is_hyper =
          blocks_[b].kind == Block::Kind::kSigma || blocks_[b].kind == Block::Kind::kLambda;
      if (is_hyper && t <= hyper_warmup) continue;
      const bool accepted = step_block(blocks_[b], std::exp(log_scale_[b]));
      if (t <= config_.burnin) {
        window_accepts_[b] += accepted ? 1 : 0;
        window_proposals_[b] += 1;
      } else {
        post_accepts_[b] += accepted ? 1 : 0;
        post_proposals_[b] += 1;
      }
    }
    if (t <= config_.burnin && t % config_.adapt_window == 0) {
      ++adapt_batch;
      const double step = 2.0 / std::sqrt(double(adapt_batch));
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (window_proposals_[b] == 0) continue;
        const double rate = double(window_accepts_[b]) / double(window_proposals_[b]);
        log_scale_[b] += step * (rate - target_accept(blocks_[b]));
        log_scale_[b] = std::clamp(log_scale_[b], std::log(1e-8), std::log(1e4));
        window_accepts_[b] = 0;
        window_proposals_[b] = 0;
      }
    }
    if (t > config_.burnin && (t - config_.burnin) % config_.thin == 0) {
      state_to_row(state_, layout, cur_total_ll_, draws.samples.row(stored));
      draws.iterations.push_back(t);
      ++stored;
    }
  }

  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    draws.block_names.push_back(blocks_[b].name);
    draws.final_scales.push_back(std::exp(log_scale_[b]));
    draws.post_accept_rate.push_back(
        post_proposals_[b] > 0 ? double(post_accepts_[b]) / double(post_proposals_[b]) : 0.0);
  }
  return draws;
}

ChainDraws run_chain(const CellTable& cells, const ModelSpec& spec, const SpatialGraph& graph,
                     const ConstraintSet& cons, const McmcConfig& config, int chain_index) {
  ChainRunner runner(cells, spec, graph, cons, config, chain_index);
  return runner.run();
}

RunResult run(const SurveyDataset& data, const ModelSpec& spec, const SpatialGraph& graph,
              const McmcConfig& config, const std::vector<std::string>& monitor_patterns,
              double rhat_max, double ess_min) {
  config.validate();
  const CellTable cells = compile_cells(data, spec, graph);
  const ConstraintSet cons = spec.include_spatial
                                 ? ConstraintSet::from_cells(cells, spec, graph.size())
                                 : ConstraintSet();

  RunResult result;
  result.constraint_rows = cons.n_rows();
  result.constraint_rank = cons.rank();
  if (cons.n_dropped() > 0) {
    result.warnings.push_back("constraints: dropped " + std::to_string(cons.n_dropped()) +
                              " redundant row(s) of the weight matrix");
  }

  result.draws.layout = ParamLayout::make(spec, graph);
  result.draws.chains.resize(config.chains);
  std::vector<std::exception_ptr> errors(config.chains);
  std::vector<std::thread> workers;
  workers.reserve(config.chains);
  for (int c = 0; c < config.chains; ++c) {
    workers.emplace_back([&, c] {
      try {
        result.draws.chains[c] = run_chain(cells, spec, graph, cons, config, c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  result.report = summarize(result.draws, monitor_patterns);
  for (const auto& p : result.report.unmatched_patterns)
    result.warnings.push_back("monitor pattern matched nothing: '" + p + "'");
  if (config.chains < 2)
    result.warnings.push_back("R-hat not applicable with a single chain");
  for (const auto& name : result.report.threshold_failures(rhat_max, ess_min))
    result.warnings.push_back("convergence: '" + name + "' violates R-hat <= " +
                              std::to_string(rhat_max) + " or ESS >= " + std::to_string(ess_min));
  return result;
}

}  // namespace spord
