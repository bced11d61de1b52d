#include "spord/synth.hpp"

#include "spord/constraints.hpp"
#include "spord/cutpoints.hpp"
#include "spord/model.hpp"
#include "spord/rng.hpp"

#include <algorithm>
#include <cstdio>

namespace spord {

ParameterState SyntheticTruth::as_state() const {
  ParameterState state;
  state.omega = omega;
  state.kappa = kappa;
  state.alpha = alpha;
  state.theta = theta;
  state.hyper = {sigma, lambda};
  return state;
}

SpatialGraph grid_graph(Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw input_error("grid_graph: need at least one row and column");
  std::vector<std::string> areas;
  char buf[24];
  for (Index i = 0; i < rows * cols; ++i) {
    std::snprintf(buf, sizeof(buf), "a%03lld", static_cast<long long>(i + 1));
    areas.emplace_back(buf);
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const Index i = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(areas[i], areas[i + 1]);
      if (r + 1 < rows) edges.emplace_back(areas[i], areas[i + cols]);
    }
  }
  return SpatialGraph::build(areas, edges);
}

namespace {

// omega_j ~ Beta(1, J-j) by inversion: 1-(1-u)^(1/(J-j)).
Vec draw_prior_omega(Index j_cats, Rng& rng) {
  Vec omega(j_cats - 1);
  for (Index j = 0; j + 1 < j_cats; ++j) {
    const double b = double(j_cats - (j + 1));
    omega[j] = 1.0 - std::pow(1.0 - rng.uniform(), 1.0 / b);
    omega[j] = std::clamp(omega[j], 1e-8, 1.0 - 1e-8);
  }
  return omega;
}

}  // namespace

std::pair<SyntheticTruth, PopulationTable> generate_population(const ModelSpec& spec,
                                                               const SpatialGraph& graph,
                                                               const TruthConfig& cfg,
                                                               std::uint64_t seed) {
  spec.validate();
  if (spec.n_categories < 2) throw input_error("generate_population: need J >= 2");
  if (graph.size() < 1) throw input_error("generate_population: need K >= 1");
  if (cfg.pop_cell_min < 0 || cfg.pop_cell_max < cfg.pop_cell_min)
    throw input_error("generate_population: bad population cell count range");
  if (!(cfg.sigma > 0.0) || !(cfg.lambda > 0.0 && cfg.lambda < 1.0))
    throw input_error("generate_population: sigma/lambda outside the prior support");

  const CutLayout cuts(spec);
  const Index n_groups = cuts.n_groups();
  const Index jm1 = spec.n_categories - 1;
  const Index n_areas = graph.size();
  const Index n_add = spec.n_additive();

  Rng rng(substream_seed(seed, 0xbeef));

  SyntheticTruth truth;
  truth.sigma = cfg.sigma;
  truth.lambda = cfg.lambda;
  truth.omega.resize(n_groups, jm1);
  truth.kappa.resize(n_groups, jm1);
  for (Index g = 0; g < n_groups; ++g) {
    Vec omega_row(jm1);
    if (cfg.uniform_kappa) {
      for (Index j = 0; j < jm1; ++j) omega_row[j] = 1.0 / double(spec.n_categories - j);
    } else {
      omega_row = draw_prior_omega(spec.n_categories, rng);
    }
    truth.omega.row(g) = omega_row.transpose();
    truth.kappa.row(g) = sticks_to_kappa(omega_row).transpose();
  }
  for (Index f = 0; f < n_add; ++f) {
    const Index n_levels = spec.factor(spec.additive_factors[f]).n_levels();
    Vec a = Vec::Zero(n_levels);
    for (Index h = 1; h < n_levels; ++h) a[h] = cfg.alpha_sd * rng.normal();
    a[0] = spec.alpha_constraint == AlphaConstraint::kZeroSum ? -a.tail(n_levels - 1).sum() : 0.0;
    truth.alpha.push_back(a);
  }

  // population cells: the full (cut group x additive levels x area) lattice
  PopulationTable pop;
  pop.add_factor_idx.resize(n_add);
  for (Index f = 0; f < n_add; ++f) pop.add_factor_idx[f] = f;
  pop.add_levels.assign(n_add, {});
  std::vector<Index> add_cards(n_add);
  Index n_combo = 1;
  for (Index f = 0; f < n_add; ++f) {
    add_cards[f] = spec.factor(spec.additive_factors[f]).n_levels();
    n_combo *= add_cards[f];
  }
  const long span = cfg.pop_cell_max - cfg.pop_cell_min + 1;
  std::vector<double> area_tot(n_areas, 0.0);
  std::vector<double> counts;
  for (Index g = 0; g < n_groups; ++g) {
    for (Index combo = 0; combo < n_combo; ++combo) {
      for (Index k = 0; k < n_areas; ++k) {
        pop.cut_group.push_back(g);
        Index rest = combo;
        for (Index f = n_add - 1; f >= 0; --f) {
          pop.add_levels[f].push_back(rest % add_cards[f]);
          rest /= add_cards[f];
        }
        pop.area.push_back(k);
        const double n = double(cfg.pop_cell_min + long(rng.uniform_below(span)));
        counts.push_back(n);
        area_tot[k] += n;
      }
    }
  }
  pop.count = Eigen::Map<Vec>(counts.data(), static_cast<Index>(counts.size()));
  pop.area_total = Eigen::Map<Vec>(area_tot.data(), n_areas);

  // spatial field from its prior, then projected against population weights
  if (spec.include_spatial) {
    Vec z(n_areas);
    for (Index k = 0; k < n_areas; ++k) z[k] = rng.normal();
    const Arr marginal =
        (cfg.lambda * graph.r_eigenvalues().array() + (1.0 - cfg.lambda)).inverse().sqrt();
    const Vec raw = cfg.sigma * (graph.r_eigenvectors() * (marginal * z.array()).matrix());
    const ConstraintSet cons =
        ConstraintSet::from_weights(pop.constraint_weights(spec, n_areas));
    truth.theta = cons.project(raw);
  } else {
    truth.theta = Vec::Zero(n_areas);
  }

  return {std::move(truth), std::move(pop)};
}

namespace {

Index factor_level_of_row(const PopulationTable& pop, const ModelSpec& spec, const CutLayout& cuts,
                          Index row, Index factor_idx) {
  // cut factor: decode from the group index
  const auto& cut_idx = cuts.cut_factor_indices();
  for (std::size_t i = 0; i < cut_idx.size(); ++i) {
    if (cut_idx[i] == factor_idx) return cuts.decode(pop.cut_group[row])[i];
  }
  // additive factor: read the stored level
  for (std::size_t f = 0; f < pop.add_factor_idx.size(); ++f) {
    const Index fi = spec.factor_index(spec.additive_factors[pop.add_factor_idx[f]]);
    if (fi == factor_idx) return pop.add_levels[f][row];
  }
  throw input_error("survey design: factor '" + spec.factors[factor_idx].name +
                    "' not present in the population table");
}

}  // namespace

SurveyDataset draw_survey(const SyntheticTruth& truth, const PopulationTable& pop,
                          const ModelSpec& spec, const SpatialGraph& graph,
                          const SurveyDesign& design, std::uint64_t seed) {
  spec.validate();
  const CutLayout cuts(spec);
  const Index n_areas = graph.size();
  const ParameterState truth_state = truth.as_state();

  Index stratum_factor_idx = -1;
  Index n_strata = 1;
  if (!design.stratum_factor.empty()) {
    stratum_factor_idx = spec.factor_index(design.stratum_factor);
    n_strata = spec.factors[stratum_factor_idx].n_levels();
  }
  Index second_factor_idx = -1;
  if (!design.second_stage_factor.empty())
    second_factor_idx = spec.factor_index(design.second_stage_factor);

  // rows grouped by (area, stratum level)
  std::vector<std::vector<Index>> rows_of(n_areas * n_strata);
  for (Index i = 0; i < pop.n_rows(); ++i) {
    const Index s =
        stratum_factor_idx >= 0 ? factor_level_of_row(pop, spec, cuts, i, stratum_factor_idx) : 0;
    rows_of[pop.area[i] * n_strata + s].push_back(i);
  }

  // category probabilities at the truth, one row per population cell
  const Mat pi = cell_probabilities(truth_state, spec, pop.cut_group, pop.add_factor_idx,
                                    pop.add_levels, pop.area);

  SurveyDataset data;
  long next_id = 1;
  std::vector<Index> all_levels(spec.factors.size());
  for (Index k = 0; k < n_areas; ++k) {
    long area_quota = design.quota;
    if (const auto it = design.quota_override.find(graph.area_ids()[k]);
        it != design.quota_override.end())
      area_quota = it->second;
    for (Index s = 0; s < n_strata; ++s) {
      const auto& rows = rows_of[k * n_strata + s];
      double stratum_pop = 0.0;
      for (const Index i : rows) stratum_pop += pop.count[i];
      const long n_pop = std::lround(stratum_pop);
      long n_target = design.fraction >= 0.0
                          ? std::lround(design.fraction * stratum_pop)
                          : area_quota;
      if (n_target > n_pop)
        throw input_error("survey design: requested sample exceeds the population of area '" +
                          graph.area_ids()[k] + "'");
      if (n_target <= 0) continue;

      Rng rng(substream_seed(seed, std::uint64_t(k) + 1, std::uint64_t(s) + 1));

      // SRS without replacement: partial Fisher-Yates over individual slots
      std::vector<Index> slot_cell(n_pop);
      Index pos = 0;
      for (const Index i : rows) {
        const long n = std::lround(pop.count[i]);
        for (long r = 0; r < n; ++r) slot_cell[pos++] = i;
      }
      for (long t = 0; t < n_target; ++t) {
        const long pick = t + long(rng.uniform_below(std::uint64_t(n_pop - t)));
        std::swap(slot_cell[t], slot_cell[pick]);
      }

      for (long t = 0; t < n_target; ++t) {
        const Index i = slot_cell[t];
        // second stage: keep with the level's subsampling rate
        if (second_factor_idx >= 0) {
          const Index lev = factor_level_of_row(pop, spec, cuts, i, second_factor_idx);
          const std::string& lev_name = spec.factors[second_factor_idx].levels[lev];
          double rate = 1.0;
          if (const auto it = design.second_stage_rate.find(lev_name);
              it != design.second_stage_rate.end())
            rate = it->second;
          if (rng.uniform() >= rate) continue;
        }

        // outcome from the cell's category distribution
        const double u = rng.uniform();
        double acc = 0.0;
        int y = int(spec.n_categories);
        for (Index j = 0; j < spec.n_categories; ++j) {
          acc += pi(i, j);
          if (u <= acc) {
            y = int(j) + 1;
            break;
          }
        }

        SurveyRecord rec;
        char idbuf[24];
        std::snprintf(idbuf, sizeof(idbuf), "r%06ld", next_id++);
        rec.respondent_id = idbuf;
        rec.area_id = graph.area_ids()[k];
        rec.outcome = y;
        rec.factor_levels.resize(spec.factors.size());
        const auto cut_levels = cuts.decode(pop.cut_group[i]);
        for (std::size_t c = 0; c < cut_levels.size(); ++c) {
          const Index fi = cuts.cut_factor_indices()[c];
          rec.factor_levels[fi] = spec.factors[fi].levels[cut_levels[c]];
        }
        for (std::size_t f = 0; f < pop.add_factor_idx.size(); ++f) {
          const Index fi = spec.factor_index(spec.additive_factors[pop.add_factor_idx[f]]);
          rec.factor_levels[fi] = spec.factors[fi].levels[pop.add_levels[f][i]];
        }
        data.records.push_back(std::move(rec));
      }
    }
  }
  return data;
}

}  // namespace spord
