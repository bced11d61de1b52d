#include "spord/data.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace spord {

Index FactorSchema::level_index(const std::string& level) const {
  for (Index i = 0; i < n_levels(); ++i) {
    if (levels[i] == level) return i;
  }
  throw input_error("factor '" + name + "': unknown level '" + level + "'");
}

void ModelSpec::validate() const {
  if (n_categories < 2) throw input_error("model: need at least 2 outcome categories");
  std::set<std::string> names;
  for (const auto& f : factors) {
    if (f.name.empty()) throw input_error("model: factor with empty name");
    if (!names.insert(f.name).second) throw input_error("model: duplicate factor '" + f.name + "'");
    if (f.levels.empty()) throw input_error("factor '" + f.name + "' has no levels");
    std::set<std::string> lv;
    for (const auto& l : f.levels) {
      if (l.empty() || !lv.insert(l).second)
        throw input_error("factor '" + f.name + "' has empty or duplicate level '" + l + "'");
    }
  }
  for (const auto& n : cut_factors) factor_index(n);
  for (const auto& n : additive_factors) factor_index(n);
  for (const auto& n : cut_factors) {
    if (std::find(additive_factors.begin(), additive_factors.end(), n) != additive_factors.end())
      throw input_error("factor '" + n + "' declared both cut and additive");
  }
  std::set<std::string> cut(cut_factors.begin(), cut_factors.end());
  if (cut.size() != cut_factors.size()) throw input_error("duplicate cut factor");
  std::set<std::string> add(additive_factors.begin(), additive_factors.end());
  if (add.size() != additive_factors.size()) throw input_error("duplicate additive factor");
}

Index ModelSpec::factor_index(const std::string& name) const {
  for (Index i = 0; i < static_cast<Index>(factors.size()); ++i) {
    if (factors[i].name == name) return i;
  }
  throw input_error("unknown factor '" + name + "'");
}

const FactorSchema& ModelSpec::factor(const std::string& name) const {
  return factors[factor_index(name)];
}

CutLayout::CutLayout(const ModelSpec& spec) {
  for (const auto& name : spec.cut_factors) {
    const Index fi = spec.factor_index(name);
    factor_idx_.push_back(fi);
    cards_.push_back(spec.factors[fi].n_levels());
    level_names_.push_back(spec.factors[fi].levels);
  }
  strides_.assign(factor_idx_.size(), 1);
  n_groups_ = 1;
  for (Index i = static_cast<Index>(cards_.size()) - 1; i >= 0; --i) {
    strides_[i] = n_groups_;
    n_groups_ *= cards_[i];
  }
}

Index CutLayout::group_of(const std::vector<Index>& factor_levels) const {
  Index g = 0;
  for (std::size_t i = 0; i < factor_idx_.size(); ++i)
    g += strides_[i] * factor_levels[factor_idx_[i]];
  return g;
}

std::vector<Index> CutLayout::decode(Index group) const {
  std::vector<Index> levels(factor_idx_.size());
  for (std::size_t i = 0; i < factor_idx_.size(); ++i) levels[i] = (group / strides_[i]) % cards_[i];
  return levels;
}

std::string CutLayout::label(Index group) const {
  if (factor_idx_.empty()) return "global";
  const auto levels = decode(group);
  std::string out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0) out += ':';
    out += level_names_[i][levels[i]];
  }
  return out;
}

void validate_dataset(const SurveyDataset& data, const ModelSpec& spec,
                      const SpatialGraph& graph) {
  spec.validate();
  std::set<std::string> missing_areas;
  for (const auto& rec : data.records) {
    if (rec.outcome < 1 || rec.outcome > static_cast<int>(spec.n_categories)) {
      std::ostringstream msg;
      msg << "respondent '" << rec.respondent_id << "': outcome " << rec.outcome << " outside 1.."
          << spec.n_categories;
      throw input_error(msg.str());
    }
    if (rec.factor_levels.size() != spec.factors.size())
      throw input_error("respondent '" + rec.respondent_id + "': wrong number of factor values");
    for (std::size_t f = 0; f < spec.factors.size(); ++f)
      spec.factors[f].level_index(rec.factor_levels[f]);  // throws on unknown level
    if (!graph.has_area(rec.area_id)) missing_areas.insert(rec.area_id);
  }
  if (!missing_areas.empty()) {
    std::string msg = "survey references areas absent from the adjacency structure:";
    for (const auto& a : missing_areas) msg += " '" + a + "'";
    throw input_error(msg);
  }
}

CellTable compile_cells(const SurveyDataset& data, const ModelSpec& spec,
                        const SpatialGraph& graph) {
  validate_dataset(data, spec, graph);
  const CutLayout layout(spec);
  const Index n_add = spec.n_additive();
  std::vector<Index> add_idx(n_add);
  for (Index f = 0; f < n_add; ++f) add_idx[f] = spec.factor_index(spec.additive_factors[f]);

  // Encode (cut group, additive levels, area) into one integer key.
  const auto key_of = [&](Index g, const std::vector<Index>& levels, Index area) {
    std::int64_t key = g;
    for (Index f = 0; f < n_add; ++f)
      key = key * spec.factors[add_idx[f]].n_levels() + levels[add_idx[f]];
    return key * graph.size() + area;
  };

  struct CellAccum {
    Index cut_group;
    std::vector<Index> add_levels;
    Index area;
    std::vector<double> counts;
  };
  std::unordered_map<std::int64_t, std::size_t> cell_of_key;
  std::vector<CellAccum> accum;

  std::vector<Index> levels(spec.factors.size());
  for (const auto& rec : data.records) {
    for (std::size_t f = 0; f < spec.factors.size(); ++f)
      levels[f] = spec.factors[f].level_index(rec.factor_levels[f]);
    const Index g = layout.group_of(levels);
    const Index k = graph.area_index(rec.area_id);
    auto [it, inserted] = cell_of_key.emplace(key_of(g, levels, k), accum.size());
    if (inserted) {
      CellAccum c;
      c.cut_group = g;
      c.area = k;
      c.add_levels.resize(n_add);
      for (Index f = 0; f < n_add; ++f) c.add_levels[f] = levels[add_idx[f]];
      c.counts.assign(spec.n_categories, 0.0);
      accum.push_back(std::move(c));
    }
    accum[it->second].counts[rec.outcome - 1] += 1.0;
  }

  // Sort cells by cut group (then area) so each group's slice is contiguous.
  std::vector<std::size_t> order(accum.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (accum[a].cut_group != accum[b].cut_group) return accum[a].cut_group < accum[b].cut_group;
    if (accum[a].area != accum[b].area) return accum[a].area < accum[b].area;
    return accum[a].add_levels < accum[b].add_levels;
  });

  CellTable table;
  table.n_categories = spec.n_categories;
  table.n_groups = layout.n_groups();
  const Index n_cells = static_cast<Index>(accum.size());
  table.cut_group.resize(n_cells);
  table.area.resize(n_cells);
  table.add_levels.assign(n_add, std::vector<Index>(n_cells));
  table.counts.resize(n_cells, spec.n_categories);
  table.cell_total.resize(n_cells);
  for (Index i = 0; i < n_cells; ++i) {
    const CellAccum& c = accum[order[i]];
    table.cut_group[i] = c.cut_group;
    table.area[i] = c.area;
    for (Index f = 0; f < n_add; ++f) table.add_levels[f][i] = c.add_levels[f];
    for (Index j = 0; j < spec.n_categories; ++j) table.counts(i, j) = c.counts[j];
    table.cell_total[i] = table.counts.row(i).sum();
  }
  table.total = n_cells > 0 ? table.cell_total.sum() : 0.0;

  table.group_ranges.assign(table.n_groups, {0, 0});
  Index pos = 0;
  for (Index g = 0; g < table.n_groups; ++g) {
    const Index begin = pos;
    while (pos < n_cells && table.cut_group[pos] == g) ++pos;
    table.group_ranges[g] = {begin, pos};
  }
  return table;
}

}  // namespace spord
