#include "spord/poststrat.hpp"

#include "spord/diagnostics.hpp"
#include "spord/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spord {

Mat PopulationTable::constraint_weights(const ModelSpec& spec, Index n_areas) const {
  Index n_rows_w = 0;
  for (const Index f : add_factor_idx)
    n_rows_w += spec.factor(spec.additive_factors[f]).n_levels();
  if (n_rows_w == 0) n_rows_w = 1;

  Mat weights = Mat::Zero(n_rows_w, n_areas);
  if (add_factor_idx.empty()) {
    for (Index i = 0; i < n_rows(); ++i) weights(0, area[i]) += count[i];
  } else {
    Index row0 = 0;
    for (std::size_t f = 0; f < add_factor_idx.size(); ++f) {
      for (Index i = 0; i < n_rows(); ++i) weights(row0 + add_levels[f][i], area[i]) += count[i];
      row0 += spec.factor(spec.additive_factors[add_factor_idx[f]]).n_levels();
    }
  }
  return weights;
}

AreaEstimates poststratify(const PosteriorDraws& draws, const PopulationTable& pop,
                           const ModelSpec& spec, const SpatialGraph& graph) {
  if (draws.total_stored() == 0) throw input_error("poststratify: no stored draws");
  const Index n_areas = graph.size();
  const Index j_cats = spec.n_categories;
  if (pop.area_total.size() != n_areas)
    throw input_error("poststratify: population table does not cover the area set");

  const Index n_draws = draws.total_stored();
  std::vector<Mat> shares(n_areas, Mat(n_draws, j_cats));  // per-draw shares, per area

  Index d = 0;
  for (const auto& chain : draws.chains) {
    for (Index row = 0; row < chain.n_stored(); ++row, ++d) {
      const ParameterState state = state_from_row(draws.layout, chain.samples.row(row));
      const Mat pi = cell_probabilities(state, spec, pop.cut_group, pop.add_factor_idx,
                                        pop.add_levels, pop.area);
      Mat acc = Mat::Zero(n_areas, j_cats);
      for (Index i = 0; i < pop.n_rows(); ++i) acc.row(pop.area[i]) += pop.count[i] * pi.row(i);
      for (Index k = 0; k < n_areas; ++k) {
        if (pop.area_total[k] > 0.0)
          shares[k].row(d) = acc.row(k) / pop.area_total[k];
        else
          shares[k].row(d).setConstant(std::numeric_limits<double>::quiet_NaN());
      }
    }
  }

  AreaEstimates est;
  est.area_ids = graph.area_ids();
  est.mean.resize(n_areas, j_cats);
  est.sd.resize(n_areas, j_cats);
  est.q025.resize(n_areas, j_cats);
  est.q500.resize(n_areas, j_cats);
  est.q975.resize(n_areas, j_cats);
  est.valid.assign(n_areas, true);
  for (Index k = 0; k < n_areas; ++k) {
    if (!(pop.area_total[k] > 0.0)) {
      est.valid[k] = false;
      est.mean.row(k).setZero();
      est.sd.row(k).setZero();
      est.q025.row(k).setZero();
      est.q500.row(k).setZero();
      est.q975.row(k).setZero();
      continue;
    }
    for (Index j = 0; j < j_cats; ++j) {
      const Vec col = shares[k].col(j);
      const double mean = col.mean();
      est.mean(k, j) = mean;
      est.sd(k, j) = col.size() > 1
                         ? std::sqrt((col.array() - mean).square().sum() / double(col.size() - 1))
                         : 0.0;
      std::vector<double> vals(col.data(), col.data() + col.size());
      est.q025(k, j) = quantile_linear(vals, 0.025);
      est.q500(k, j) = quantile_linear(vals, 0.5);
      est.q975(k, j) = quantile_linear(vals, 0.975);
    }
  }
  return est;
}

double relevance(const PosteriorDraws& draws, Index area) {
  if (area < 0 || area >= draws.layout.n_areas) throw input_error("relevance: area out of range");
  const Vec pooled = draws.pooled_column(draws.layout.theta_col(area));
  if (pooled.size() == 0) throw input_error("relevance: no stored draws");
  return double((pooled.array() < 0.0).count()) / double(pooled.size());
}

Vec relevance_all(const PosteriorDraws& draws) {
  Vec out(draws.layout.n_areas);
  for (Index k = 0; k < draws.layout.n_areas; ++k) out[k] = relevance(draws, k);
  return out;
}

std::string relevance_flag(double prob, double hi, double lo) {
  if (prob > hi) return "high";
  if (prob < lo) return "low";
  return "";
}

PpcTable posterior_predictive_check(const PosteriorDraws& draws, const CellTable& cells,
                                    const ModelSpec& spec, const SpatialGraph& graph,
                                    const std::vector<Index>& areas, std::uint64_t seed) {
  if (draws.total_stored() == 0) throw input_error("ppc: no stored draws");
  const Index j_cats = spec.n_categories;

  std::vector<std::vector<Index>> cells_of_area(graph.size());
  for (Index i = 0; i < cells.n_cells(); ++i) cells_of_area[cells.area[i]].push_back(i);

  PpcTable table;
  std::vector<Index> kept;
  for (const Index k : areas) {
    if (k < 0 || k >= graph.size()) throw input_error("ppc: area index out of range");
    if (cells_of_area[k].empty()) {
      table.excluded.push_back(graph.area_ids()[k]);
      continue;
    }
    kept.push_back(k);
  }

  // flatten the kept areas' cells so probabilities come from one call per draw
  std::vector<Index> sub_group, sub_area, sub_cell;
  std::vector<std::vector<Index>> sub_levels(spec.n_additive());
  std::vector<std::pair<Index, Index>> area_span;  // [begin,end) into sub_* per kept area
  for (const Index k : kept) {
    const Index begin = static_cast<Index>(sub_cell.size());
    for (const Index i : cells_of_area[k]) {
      sub_cell.push_back(i);
      sub_group.push_back(cells.cut_group[i]);
      sub_area.push_back(cells.area[i]);
      for (Index f = 0; f < spec.n_additive(); ++f)
        sub_levels[f].push_back(cells.add_levels[f][i]);
    }
    area_span.emplace_back(begin, static_cast<Index>(sub_cell.size()));
  }
  std::vector<Index> add_idx(spec.n_additive());
  for (Index f = 0; f < spec.n_additive(); ++f) add_idx[f] = f;

  const Index n_kept = static_cast<Index>(kept.size());
  const Index n_draws = draws.total_stored();
  std::vector<Mat> pct(n_kept, Mat(n_draws, j_cats));

  Index d = 0;
  for (const auto& chain : draws.chains) {
    for (Index row = 0; row < chain.n_stored(); ++row, ++d) {
      const ParameterState state = state_from_row(draws.layout, chain.samples.row(row));
      const Mat pi = cell_probabilities(state, spec, sub_group, add_idx, sub_levels, sub_area);
      for (Index a = 0; a < n_kept; ++a) {
        Rng rng(substream_seed(seed, d + 1, std::uint64_t(kept[a]) + 1));
        Vec counts = Vec::Zero(j_cats);
        double n_area = 0.0;
        const auto [begin, end] = area_span[a];
        for (Index s = begin; s < end; ++s) {
          // cumulative-inversion draws of the cell's n respondents
          Vec cum(j_cats);
          double acc = 0.0;
          for (Index j = 0; j < j_cats; ++j) {
            acc += pi(s, j);
            cum[j] = acc;
          }
          const long n_cell = std::lround(cells.cell_total[sub_cell[s]]);
          for (long r = 0; r < n_cell; ++r) {
            const double u = rng.uniform() * cum[j_cats - 1];
            Index j = 0;
            while (j + 1 < j_cats && u > cum[j]) ++j;
            counts[j] += 1.0;
          }
          n_area += double(n_cell);
        }
        pct[a].row(d) = (100.0 / n_area) * counts.transpose();
      }
    }
  }

  table.pred_mean.resize(n_kept, j_cats);
  table.pred_lo.resize(n_kept, j_cats);
  table.pred_hi.resize(n_kept, j_cats);
  table.observed.resize(n_kept, j_cats);
  for (Index a = 0; a < n_kept; ++a) {
    table.area_ids.push_back(graph.area_ids()[kept[a]]);
    Vec obs = Vec::Zero(j_cats);
    double n_area = 0.0;
    const auto [begin, end] = area_span[a];
    for (Index s = begin; s < end; ++s) {
      obs += cells.counts.row(sub_cell[s]).transpose();
      n_area += cells.cell_total[sub_cell[s]];
    }
    table.observed.row(a) = (100.0 / n_area) * obs.transpose();
    for (Index j = 0; j < j_cats; ++j) {
      const Vec col = pct[a].col(j);
      table.pred_mean(a, j) = col.mean();
      std::vector<double> vals(col.data(), col.data() + col.size());
      table.pred_lo(a, j) = quantile_linear(vals, 0.025);
      table.pred_hi(a, j) = quantile_linear(vals, 0.975);
    }
  }
  return table;
}

}  // namespace spord
