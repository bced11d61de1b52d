#pragma once

#include "spord/spatial_graph.hpp"
#include "spord/types.hpp"

#include <string>
#include <vector>

namespace spord {

struct FactorSchema {
  std::string name;
  std::vector<std::string> levels;

  Index n_levels() const { return static_cast<Index>(levels.size()); }
  Index level_index(const std::string& level) const;
};

enum class AlphaConstraint { kCorner, kZeroSum };

// Which factors index the cut-point blocks (full interaction) and which enter
// the linear predictor additively, plus the identifiability convention for the
// additive effects.
struct ModelSpec {
  Index n_categories = 0;  // J
  std::vector<FactorSchema> factors;
  std::vector<std::string> cut_factors;
  std::vector<std::string> additive_factors;
  AlphaConstraint alpha_constraint = AlphaConstraint::kZeroSum;
  bool include_spatial = true;

  void validate() const;
  Index factor_index(const std::string& name) const;
  const FactorSchema& factor(const std::string& name) const;
  Index n_additive() const { return static_cast<Index>(additive_factors.size()); }
};

// Resolved indexing of the cut-point blocks: one block per combination of
// cut-factor levels, a single block labelled "global" when no cut factors are
// declared. Combination order is row-major in the declared factor order.
class CutLayout {
 public:
  explicit CutLayout(const ModelSpec& spec);

  Index n_groups() const { return n_groups_; }
  // factor_levels holds one level index per spec factor (all factors).
  Index group_of(const std::vector<Index>& factor_levels) const;
  std::vector<Index> decode(Index group) const;  // level index per cut factor
  std::string label(Index group) const;          // "m:a3" style
  const std::vector<Index>& cut_factor_indices() const { return factor_idx_; }

 private:
  std::vector<Index> factor_idx_;  // positions of the cut factors in spec.factors
  std::vector<Index> cards_;
  std::vector<Index> strides_;
  std::vector<std::vector<std::string>> level_names_;
  Index n_groups_ = 1;
};

struct SurveyRecord {
  std::string respondent_id;
  std::string area_id;
  std::vector<std::string> factor_levels;  // aligned with ModelSpec::factors
  int outcome = 0;                         // 1..J
};

struct SurveyDataset {
  std::vector<SurveyRecord> records;
  Index size() const { return static_cast<Index>(records.size()); }
};

// Throws input_error naming every offending record/area on failure.
void validate_dataset(const SurveyDataset& data, const ModelSpec& spec, const SpatialGraph& graph);

// Survey data collapsed to sufficient statistics: per unique
// (cut-group, additive levels, area) cell, the count of each outcome
// category. Cells are sorted by cut group so each block's likelihood slice is
// contiguous.
struct CellTable {
  Index n_categories = 0;
  Index n_groups = 0;
  std::vector<Index> cut_group;                // per cell
  std::vector<std::vector<Index>> add_levels;  // [additive factor][cell]
  std::vector<Index> area;                     // per cell
  Mat counts;                                  // n_cells x J
  Vec cell_total;                              // row sums of counts
  double total = 0.0;
  std::vector<std::pair<Index, Index>> group_ranges;  // [begin,end) per cut group

  Index n_cells() const { return static_cast<Index>(cut_group.size()); }
};

CellTable compile_cells(const SurveyDataset& data, const ModelSpec& spec,
                        const SpatialGraph& graph);

}  // namespace spord
