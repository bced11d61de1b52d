// spord: Bayesian small-area estimation for spatial ordinal survey data.
//
// Subcommands:
//   simulate     write a synthetic survey/population/adjacency/truth set
//   fit          run the MCMC sampler and persist draws + diagnostics
//   poststratify population-weighted small-area estimates from saved draws
//   ppc          posterior predictive check against observed percentages
//   diagnose     recompute the convergence report from saved draws

#include "spord/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

namespace fs = std::filesystem;
using namespace spord;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> chains;
  std::optional<long> iterations, burnin, thin;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", flags.config_path, "JSON config file");
  if (needs_config) opt->required();
  cmd->add_option("--seed", flags.seed, "override mcmc.seed");
  cmd->add_option("--out", flags.out, "override paths.out");
  cmd->add_option("--chains", flags.chains, "override mcmc.chains");
  cmd->add_option("--iterations", flags.iterations, "override mcmc.iterations");
  cmd->add_option("--burnin", flags.burnin, "override mcmc.burnin");
  cmd->add_option("--thin", flags.thin, "override mcmc.thin");
  cmd->add_flag("--force", flags.force, "overwrite a non-empty output directory");
}

RunConfig load_with_overrides(const CommonFlags& flags) {
  RunConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.mcmc.seed = *flags.seed;
  if (flags.out) cfg.out_dir = *flags.out;
  if (flags.chains) cfg.mcmc.chains = *flags.chains;
  if (flags.iterations) cfg.mcmc.iterations = *flags.iterations;
  if (flags.burnin) cfg.mcmc.burnin = *flags.burnin;
  if (flags.thin) cfg.mcmc.thin = *flags.thin;
  return cfg;
}

// Areas come from the survey/population union; the adjacency file must stay
// inside that set and, with require_exact_adjacency, cover it exactly.
SpatialGraph build_graph(const RunConfig& cfg, const SurveyDataset& survey) {
  std::set<std::string> areas;
  for (const auto& id : survey_area_ids(survey)) areas.insert(id);
  if (!cfg.population_path.empty() && fs::exists(cfg.population_path))
    for (const auto& id : population_area_ids(cfg.population_path)) areas.insert(id);
  if (areas.empty()) throw input_error("no areas found in the survey/population files");

  const auto edges = read_edge_list(cfg.adjacency_path);
  if (cfg.require_exact_adjacency) {
    const auto edge_ids = edge_list_area_ids(cfg.adjacency_path);
    std::string missing;
    for (const auto& id : areas)
      if (!edge_ids.count(id)) missing += " '" + id + "'";
    for (const auto& id : edge_ids)
      if (!areas.count(id)) missing += " '" + id + "'";
    if (!missing.empty())
      throw input_error("adjacency area set does not match the survey/population areas:" +
                        missing);
  }
  return SpatialGraph::build({areas.begin(), areas.end()}, edges);
}

int cmd_simulate(const CommonFlags& flags) {
  RunConfig cfg = load_with_overrides(flags);
  cfg.spec.validate();
  prepare_out_dir(cfg.out_dir, flags.force);

  const SpatialGraph graph = grid_graph(cfg.grid_rows, cfg.grid_cols);
  auto [truth, pop] = generate_population(cfg.spec, graph, cfg.truth, cfg.mcmc.seed);
  const SurveyDataset survey =
      draw_survey(truth, pop, cfg.spec, graph, cfg.design, substream_seed(cfg.mcmc.seed, 0x5eed));

  // identifiability note: sample-weighted constraints vs the
  // population-projected truth
  const CellTable cells = compile_cells(survey, cfg.spec, graph);
  const ConstraintSet sample_cons = ConstraintSet::from_cells(cells, cfg.spec, graph.size());
  std::vector<std::string> notes;
  notes.push_back("config: " + fs::absolute(flags.config_path).string());
  notes.push_back("seed: " + std::to_string(cfg.mcmc.seed));
  notes.push_back("theta is projected against population-weighted constraints; max sample-weighted "
                  "violation |sum_k n_hk theta_k| = " +
                  std::to_string(sample_cons.max_violation(truth.theta)));

  const fs::path out(cfg.out_dir);
  write_survey((out / "survey.csv").string(), survey, cfg.spec);
  write_population((out / "population.csv").string(), pop, cfg.spec, graph);
  write_edge_list((out / "adjacency.txt").string(), graph);
  write_truth((out / "truth.csv").string(), truth, ParamLayout::make(cfg.spec, graph), notes);

  std::cout << "simulate: " << survey.size() << " respondents, " << pop.n_rows()
            << " population cells, " << graph.size() << " areas, "
            << graph.edge_list().size() << " edges -> " << cfg.out_dir << "\n";
  return 0;
}

int cmd_fit(const CommonFlags& flags) {
  RunConfig cfg = load_with_overrides(flags);
  cfg.spec.validate();
  const SurveyDataset survey = read_survey(cfg.survey_path, cfg.spec);
  const SpatialGraph graph = build_graph(cfg, survey);
  prepare_out_dir(cfg.out_dir, flags.force);

  const auto t0 = std::chrono::steady_clock::now();
  const RunResult result =
      run(survey, cfg.spec, graph, cfg.mcmc, cfg.monitor_patterns, cfg.rhat_max, cfg.ess_min);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path out(cfg.out_dir);
  write_draws(cfg.out_dir, result.draws);
  write_report_csv((out / "report.csv").string(), result.report);

  ManifestInfo info;
  info.command = "fit";
  info.config_json = config_to_json(cfg);
  info.input_hashes.emplace_back("survey", file_hash_hex(cfg.survey_path));
  info.input_hashes.emplace_back("adjacency", file_hash_hex(cfg.adjacency_path));
  if (!cfg.population_path.empty() && fs::exists(cfg.population_path))
    info.input_hashes.emplace_back("population", file_hash_hex(cfg.population_path));
  info.fingerprint = spec_fingerprint(cfg.spec);
  info.seed = cfg.mcmc.seed;
  info.n_chains = cfg.mcmc.chains;
  info.warnings = result.warnings;
  info.notes.push_back("runtime_seconds: " + std::to_string(seconds));
  info.notes.push_back("constraint_rows: " + std::to_string(result.constraint_rows) +
                       ", rank: " + std::to_string(result.constraint_rank));
  write_manifest((out / "manifest.json").string(), info, &result.draws);

  std::cout << "fit: " << result.draws.n_chains() << " chains x "
            << cfg.mcmc.stored_per_chain() << " stored draws in " << seconds << " s -> "
            << cfg.out_dir << "\n";
  for (const auto& w : result.warnings) std::cout << "warning: " << w << "\n";
  return 0;
}

PosteriorDraws load_draws_for(const RunConfig& cfg, const std::string& draws_dir,
                              const SpatialGraph& graph) {
  const fs::path manifest = fs::path(draws_dir) / "manifest.json";
  if (fs::exists(manifest)) {
    const std::string fp = manifest_string_field(manifest.string(), "spec_fingerprint");
    if (fp != spec_fingerprint(cfg.spec))
      throw input_error("draws in '" + draws_dir + "' were fitted under a different model spec");
  }
  const std::string chains_str = manifest_string_field(manifest.string(), "chains");
  const int n_chains = static_cast<int>(std::stol(chains_str));
  return read_draws(draws_dir, ParamLayout::make(cfg.spec, graph), n_chains);
}

int cmd_poststratify(const CommonFlags& flags, const std::string& draws_dir_flag) {
  RunConfig cfg = load_with_overrides(flags);
  cfg.spec.validate();
  const std::string draws_dir = draws_dir_flag.empty() ? cfg.out_dir : draws_dir_flag;
  const SurveyDataset survey = read_survey(cfg.survey_path, cfg.spec);
  const SpatialGraph graph = build_graph(cfg, survey);
  const PopulationTable pop = read_population(cfg.population_path, cfg.spec, graph);
  const PosteriorDraws draws = load_draws_for(cfg, draws_dir, graph);

  const AreaEstimates est = poststratify(draws, pop, cfg.spec, graph);
  const Vec rel = relevance_all(draws);

  const fs::path out(draws_dir);
  write_area_estimates_csv((out / "area_estimates.csv").string(), est);
  write_relevance_csv((out / "relevance.csv").string(), graph.area_ids(), rel);

  int skipped = 0;
  for (const bool v : est.valid)
    if (!v) ++skipped;
  std::cout << "poststratify: " << est.area_ids.size() << " areas -> " << draws_dir << "\n";
  if (skipped > 0)
    std::cout << "warning: " << skipped << " area(s) have zero population; estimates set to na\n";
  return 0;
}

int cmd_ppc(const CommonFlags& flags, const std::string& draws_dir_flag,
            std::vector<std::string> area_ids) {
  RunConfig cfg = load_with_overrides(flags);
  cfg.spec.validate();
  const std::string draws_dir = draws_dir_flag.empty() ? cfg.out_dir : draws_dir_flag;
  const SurveyDataset survey = read_survey(cfg.survey_path, cfg.spec);
  const SpatialGraph graph = build_graph(cfg, survey);
  const CellTable cells = compile_cells(survey, cfg.spec, graph);
  const PosteriorDraws draws = load_draws_for(cfg, draws_dir, graph);

  if (area_ids.empty()) {
    // default: the four most populated areas
    if (cfg.population_path.empty() || !fs::exists(cfg.population_path))
      throw input_error("ppc: pass --areas or provide a population file to rank areas");
    const PopulationTable pop = read_population(cfg.population_path, cfg.spec, graph);
    std::vector<Index> order(graph.size());
    for (Index k = 0; k < graph.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return pop.area_total[a] > pop.area_total[b]; });
    for (Index i = 0; i < std::min<Index>(4, graph.size()); ++i)
      area_ids.push_back(graph.area_ids()[order[i]]);
  }
  std::vector<Index> areas;
  for (const auto& id : area_ids) areas.push_back(graph.area_index(id));

  const PpcTable table = posterior_predictive_check(draws, cells, cfg.spec, graph, areas,
                                                    substream_seed(cfg.mcmc.seed, 0x99c));
  write_ppc_csv((fs::path(draws_dir) / "ppc.csv").string(), table);

  std::cout << "ppc: " << table.area_ids.size() << " areas x " << table.pred_mean.cols()
            << " categories -> " << draws_dir << "\n";
  for (const auto& id : table.excluded)
    std::cout << "warning: area '" << id << "' has no respondents; excluded\n";
  return 0;
}

int cmd_diagnose(const CommonFlags& flags, const std::string& draws_dir_flag) {
  RunConfig cfg = load_with_overrides(flags);
  cfg.spec.validate();
  const std::string draws_dir = draws_dir_flag.empty() ? cfg.out_dir : draws_dir_flag;
  const SurveyDataset survey = read_survey(cfg.survey_path, cfg.spec);
  const SpatialGraph graph = build_graph(cfg, survey);
  const PosteriorDraws draws = load_draws_for(cfg, draws_dir, graph);

  const ConvergenceReport report = summarize(draws, cfg.monitor_patterns);
  write_report_csv((fs::path(draws_dir) / "report.csv").string(), report);

  const auto failures = report.threshold_failures(cfg.rhat_max, cfg.ess_min);
  std::cout << "diagnose: " << report.rows.size() << " monitored scalars -> " << draws_dir
            << "\n";
  for (const auto& p : report.unmatched_patterns)
    std::cout << "warning: monitor pattern matched nothing: '" << p << "'\n";
  for (const auto& name : failures)
    std::cout << "warning: convergence: '" << name << "' violates R-hat <= " << cfg.rhat_max
              << " or ESS >= " << cfg.ess_min << "\n";
  if (failures.empty()) std::cout << "all monitored scalars within thresholds\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian small-area estimation for spatial ordinal survey data"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string draws_dir;
  std::vector<std::string> ppc_areas;

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(simulate, flags);
  auto* fit = app.add_subcommand("fit", "run the sampler");
  add_common(fit, flags);
  auto* post = app.add_subcommand("poststratify", "small-area estimates from saved draws");
  add_common(post, flags);
  post->add_option("--draws", draws_dir, "directory with saved draws (default: paths.out)");
  auto* ppc = app.add_subcommand("ppc", "posterior predictive check");
  add_common(ppc, flags);
  ppc->add_option("--draws", draws_dir, "directory with saved draws (default: paths.out)");
  ppc->add_option("--areas", ppc_areas, "area ids to assess (default: 4 most populated)")
      ->delimiter(',');
  auto* diagnose = app.add_subcommand("diagnose", "recompute the convergence report");
  add_common(diagnose, flags);
  diagnose->add_option("--draws", draws_dir, "directory with saved draws (default: paths.out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(flags);
    if (fit->parsed()) return cmd_fit(flags);
    if (post->parsed()) return cmd_poststratify(flags, draws_dir);
    if (ppc->parsed()) return cmd_ppc(flags, draws_dir, ppc_areas);
    if (diagnose->parsed()) return cmd_diagnose(flags, draws_dir);
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
