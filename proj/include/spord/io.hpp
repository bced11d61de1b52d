#pragma once

#include "spord/data.hpp"
#include "spord/diagnostics.hpp"
#include "spord/draws.hpp"
#include "spord/poststrat.hpp"
#include "spord/sampler.hpp"
#include "spord/synth.hpp"

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace spord {

// Everything a command needs, read from one JSON config file. CLI flags may
// override individual fields after loading.
struct RunConfig {
  ModelSpec spec;
  McmcConfig mcmc;
  std::vector<std::string> monitor_patterns = {"kappa[*]", "alpha[*]", "theta[*]", "sigma",
                                               "lambda"};
  double rhat_max = 1.10;
  double ess_min = 100.0;

  std::string survey_path, adjacency_path, population_path, out_dir;
  bool require_exact_adjacency = false;

  // synthetic-data settings (simulate command)
  Index grid_rows = 10, grid_cols = 5;
  TruthConfig truth;
  SurveyDesign design;
};

RunConfig load_config(const std::string& path);
// Canonical JSON echo of the config (stable key order), for manifests.
std::string config_to_json(const RunConfig& config);
// Hash of the model-defining part of the config; persisted draws must match.
std::string spec_fingerprint(const ModelSpec& spec);

// FNV-1a over the file bytes, hex-encoded.
std::string file_hash_hex(const std::string& path);

// --- survey / adjacency / population files ---------------------------------

SurveyDataset read_survey(const std::string& path, const ModelSpec& spec);
void write_survey(const std::string& path, const SurveyDataset& data, const ModelSpec& spec);
std::vector<std::string> survey_area_ids(const SurveyDataset& data);

// Edge list, one "areaA,areaB" per line, '#' comments.
std::vector<std::pair<std::string, std::string>> read_edge_list(const std::string& path);
void write_edge_list(const std::string& path, const SpatialGraph& graph);
std::set<std::string> edge_list_area_ids(const std::string& path);

std::vector<std::string> population_area_ids(const std::string& path);
PopulationTable read_population(const std::string& path, const ModelSpec& spec,
                                const SpatialGraph& graph);
void write_population(const std::string& path, const PopulationTable& pop, const ModelSpec& spec,
                      const SpatialGraph& graph);

// --- truth manifest (simulate) ----------------------------------------------

void write_truth(const std::string& path, const SyntheticTruth& truth, const ParamLayout& layout,
                 const std::vector<std::string>& notes);
std::map<std::string, double> read_truth(const std::string& path);

// --- posterior draws --------------------------------------------------------

void write_chain_csv(const std::string& path, const ParamLayout& layout, const ChainDraws& chain);
ChainDraws read_chain_csv(const std::string& path, const ParamLayout& expected);
void write_draws(const std::string& dir, const PosteriorDraws& draws);
PosteriorDraws read_draws(const std::string& dir, const ParamLayout& expected, int n_chains);

// --- reports and estimates ---------------------------------------------------

void write_report_csv(const std::string& path, const ConvergenceReport& report);
void write_area_estimates_csv(const std::string& path, const AreaEstimates& est);
void write_relevance_csv(const std::string& path, const std::vector<std::string>& area_ids,
                         const Vec& probs);
void write_ppc_csv(const std::string& path, const PpcTable& table);

// --- run manifest -------------------------------------------------------------

struct ManifestInfo {
  std::string command;
  std::string config_json;
  std::vector<std::pair<std::string, std::string>> input_hashes;
  std::string fingerprint;
  std::uint64_t seed = 0;
  int n_chains = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
};

void write_manifest(const std::string& path, const ManifestInfo& info,
                    const PosteriorDraws* draws = nullptr);
// Reads one top-level string field back from a manifest.
std::string manifest_string_field(const std::string& path, const std::string& key);

// Refuses to reuse a non-empty directory unless force is set.
void prepare_out_dir(const std::string& dir, bool force);

}  // namespace spord
