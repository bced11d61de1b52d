#include "spord/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace spord {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot open '" + path + "' for writing");
  return out;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw input_error("");
    return v;
  } catch (...) {
    throw input_error("cannot parse " + what + " from '" + s + "'");
  }
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw input_error("");
    return v;
  } catch (...) {
    throw input_error("cannot parse " + what + " from '" + s + "'");
  }
}

}  // namespace

// --- config -------------------------------------------------------------------

RunConfig load_config(const std::string& path) {
  auto in = open_in(path);
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const std::exception& e) {
    throw input_error("config '" + path + "': " + e.what());
  }

  RunConfig cfg;
  if (j.contains("factors")) {
    for (const auto& [name, levels] : j.at("factors").items()) {
      FactorSchema schema;
      schema.name = name;
      for (const auto& l : levels) schema.levels.push_back(l.get<std::string>());
      cfg.spec.factors.push_back(std::move(schema));
    }
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    cfg.spec.n_categories = m.value("categories", 0);
    for (const auto& f : m.value("cut_factors", std::vector<std::string>{}))
      cfg.spec.cut_factors.push_back(f);
    for (const auto& f : m.value("additive_factors", std::vector<std::string>{}))
      cfg.spec.additive_factors.push_back(f);
    const std::string constraint = m.value("alpha_constraint", "zero_sum");
    if (constraint == "zero_sum") {
      cfg.spec.alpha_constraint = AlphaConstraint::kZeroSum;
    } else if (constraint == "corner") {
      cfg.spec.alpha_constraint = AlphaConstraint::kCorner;
    } else {
      throw input_error("config: alpha_constraint must be 'zero_sum' or 'corner'");
    }
    cfg.spec.include_spatial = m.value("include_spatial", true);
  }
  if (j.contains("mcmc")) {
    const auto& m = j.at("mcmc");
    cfg.mcmc.chains = m.value("chains", cfg.mcmc.chains);
    cfg.mcmc.iterations = m.value("iterations", cfg.mcmc.iterations);
    cfg.mcmc.burnin = m.value("burnin", cfg.mcmc.burnin);
    cfg.mcmc.thin = m.value("thin", cfg.mcmc.thin);
    cfg.mcmc.seed = m.value("seed", cfg.mcmc.seed);
    cfg.mcmc.adapt_window = m.value("adapt_window", cfg.mcmc.adapt_window);
    cfg.mcmc.target_accept_scalar = m.value("target_accept_scalar", cfg.mcmc.target_accept_scalar);
    cfg.mcmc.target_accept_vector = m.value("target_accept_vector", cfg.mcmc.target_accept_vector);
    cfg.mcmc.sigma_max = m.value("sigma_max", cfg.mcmc.sigma_max);
  }
  if (j.contains("monitor")) {
    const auto& m = j.at("monitor");
    if (m.contains("patterns"))
      cfg.monitor_patterns = m.at("patterns").get<std::vector<std::string>>();
    cfg.rhat_max = m.value("rhat_max", cfg.rhat_max);
    cfg.ess_min = m.value("ess_min", cfg.ess_min);
  }
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    cfg.survey_path = p.value("survey", "");
    cfg.adjacency_path = p.value("adjacency", "");
    cfg.population_path = p.value("population", "");
    cfg.out_dir = p.value("out", "");
  }
  if (j.contains("areas"))
    cfg.require_exact_adjacency = j.at("areas").value("require_exact_adjacency", false);
  if (j.contains("simulate")) {
    const auto& s = j.at("simulate");
    cfg.grid_rows = s.value("grid_rows", cfg.grid_rows);
    cfg.grid_cols = s.value("grid_cols", cfg.grid_cols);
    cfg.truth.sigma = s.value("sigma", cfg.truth.sigma);
    cfg.truth.lambda = s.value("lambda", cfg.truth.lambda);
    cfg.truth.alpha_sd = s.value("alpha_sd", cfg.truth.alpha_sd);
    cfg.truth.uniform_kappa = s.value("uniform_kappa", cfg.truth.uniform_kappa);
    cfg.truth.pop_cell_min = s.value("pop_cell_min", cfg.truth.pop_cell_min);
    cfg.truth.pop_cell_max = s.value("pop_cell_max", cfg.truth.pop_cell_max);
    cfg.design.stratum_factor = s.value("stratum_factor", cfg.design.stratum_factor);
    cfg.design.quota = s.value("quota", cfg.design.quota);
    cfg.design.fraction = s.value("fraction", cfg.design.fraction);
    if (s.contains("quota_override"))
      for (const auto& [area, q] : s.at("quota_override").items())
        cfg.design.quota_override[area] = q.get<long>();
    cfg.design.second_stage_factor = s.value("second_stage_factor", cfg.design.second_stage_factor);
    if (s.contains("second_stage_rates"))
      for (const auto& [level, r] : s.at("second_stage_rates").items())
        cfg.design.second_stage_rate[level] = r.get<double>();
  }
  return cfg;
}

namespace {

ojson spec_json(const ModelSpec& spec) {
  ojson m;
  ojson factors;
  for (const auto& f : spec.factors) factors[f.name] = f.levels;
  m["factors"] = factors;
  m["categories"] = spec.n_categories;
  m["cut_factors"] = spec.cut_factors;
  m["additive_factors"] = spec.additive_factors;
  m["alpha_constraint"] =
      spec.alpha_constraint == AlphaConstraint::kZeroSum ? "zero_sum" : "corner";
  m["include_spatial"] = spec.include_spatial;
  return m;
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) {
  ojson j;
  ojson factors;
  for (const auto& f : cfg.spec.factors) factors[f.name] = f.levels;
  j["factors"] = factors;
  j["model"] = {{"categories", cfg.spec.n_categories},
                {"cut_factors", cfg.spec.cut_factors},
                {"additive_factors", cfg.spec.additive_factors},
                {"alpha_constraint",
                 cfg.spec.alpha_constraint == AlphaConstraint::kZeroSum ? "zero_sum" : "corner"},
                {"include_spatial", cfg.spec.include_spatial}};
  j["mcmc"] = {{"chains", cfg.mcmc.chains},
               {"iterations", cfg.mcmc.iterations},
               {"burnin", cfg.mcmc.burnin},
               {"thin", cfg.mcmc.thin},
               {"seed", cfg.mcmc.seed},
               {"adapt_window", cfg.mcmc.adapt_window},
               {"target_accept_scalar", cfg.mcmc.target_accept_scalar},
               {"target_accept_vector", cfg.mcmc.target_accept_vector},
               {"sigma_max", cfg.mcmc.sigma_max}};
  j["monitor"] = {{"patterns", cfg.monitor_patterns},
                  {"rhat_max", cfg.rhat_max},
                  {"ess_min", cfg.ess_min}};
  j["paths"] = {{"survey", cfg.survey_path},
                {"adjacency", cfg.adjacency_path},
                {"population", cfg.population_path},
                {"out", cfg.out_dir}};
  j["areas"] = {{"require_exact_adjacency", cfg.require_exact_adjacency}};
  j["simulate"] = {{"grid_rows", cfg.grid_rows},
                   {"grid_cols", cfg.grid_cols},
                   {"sigma", cfg.truth.sigma},
                   {"lambda", cfg.truth.lambda},
                   {"alpha_sd", cfg.truth.alpha_sd},
                   {"uniform_kappa", cfg.truth.uniform_kappa},
                   {"pop_cell_min", cfg.truth.pop_cell_min},
                   {"pop_cell_max", cfg.truth.pop_cell_max},
                   {"stratum_factor", cfg.design.stratum_factor},
                   {"quota", cfg.design.quota},
                   {"fraction", cfg.design.fraction},
                   {"quota_override", cfg.design.quota_override},
                   {"second_stage_factor", cfg.design.second_stage_factor},
                   {"second_stage_rates", cfg.design.second_stage_rate}};
  return j.dump(2);
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string spec_fingerprint(const ModelSpec& spec) {
  const std::string s = spec_json(spec).dump();
  return hex64(fnv1a(s.data(), s.size()));
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path + "' for hashing");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h = fnv1a(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return hex64(h);
}

// --- survey -------------------------------------------------------------------

SurveyDataset read_survey(const std::string& path, const ModelSpec& spec) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw input_error("survey '" + path + "': empty file");
  const auto header = split_csv_line(line);
  std::vector<std::string> expected = {"id", "area"};
  for (const auto& f : spec.factors) expected.push_back(f.name);
  expected.push_back("y");
  if (header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw input_error("survey '" + path + "': header must be '" + want + "'");
  }

  SurveyDataset data;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != expected.size())
      throw input_error("survey '" + path + "' line " + std::to_string(line_no) +
                        ": wrong field count");
    SurveyRecord rec;
    rec.respondent_id = fields[0];
    rec.area_id = fields[1];
    for (std::size_t f = 0; f < spec.factors.size(); ++f) {
      spec.factors[f].level_index(fields[2 + f]);  // reject unknown levels here
      rec.factor_levels.push_back(fields[2 + f]);
    }
    rec.outcome = static_cast<int>(parse_long(fields.back(), "outcome"));
    if (rec.outcome < 1 || rec.outcome > static_cast<int>(spec.n_categories))
      throw input_error("survey '" + path + "' line " + std::to_string(line_no) + ": outcome " +
                        fields.back() + " outside 1.." + std::to_string(spec.n_categories));
    data.records.push_back(std::move(rec));
  }
  return data;
}

void write_survey(const std::string& path, const SurveyDataset& data, const ModelSpec& spec) {
  auto out = open_out(path);
  out << "id,area";
  for (const auto& f : spec.factors) out << ',' << f.name;
  out << ",y\n";
  for (const auto& rec : data.records) {
    out << rec.respondent_id << ',' << rec.area_id;
    for (const auto& l : rec.factor_levels) out << ',' << l;
    out << ',' << rec.outcome << '\n';
  }
}

std::vector<std::string> survey_area_ids(const SurveyDataset& data) {
  std::set<std::string> ids;
  for (const auto& rec : data.records) ids.insert(rec.area_id);
  return {ids.begin(), ids.end()};
}

// --- adjacency ------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> read_edge_list(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw input_error("adjacency '" + path + "' line " + std::to_string(line_no) +
                        ": expected 'areaA,areaB'");
    edges.emplace_back(fields[0], fields[1]);
  }
  return edges;
}

void write_edge_list(const std::string& path, const SpatialGraph& graph) {
  auto out = open_out(path);
  out << "# adjacency edge list: one undirected pair per line\n";
  for (const auto& [a, b] : graph.edge_list())
    out << graph.area_ids()[a] << ',' << graph.area_ids()[b] << '\n';
}

std::set<std::string> edge_list_area_ids(const std::string& path) {
  std::set<std::string> ids;
  for (const auto& [a, b] : read_edge_list(path)) {
    ids.insert(a);
    ids.insert(b);
  }
  return ids;
}

// --- population -----------------------------------------------------------------

std::vector<std::string> population_area_ids(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw input_error("population '" + path + "': empty file");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "area")
    throw input_error("population '" + path + "': first column must be 'area'");
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (!fields.empty()) ids.insert(fields[0]);
  }
  return {ids.begin(), ids.end()};
}

PopulationTable read_population(const std::string& path, const ModelSpec& spec,
                                const SpatialGraph& graph) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw input_error("population '" + path + "': empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.front() != "area" || header.back() != "count")
    throw input_error("population '" + path + "': header must be 'area,<factors...>,count'");

  const CutLayout cuts(spec);
  // factor columns: all cut factors must be present; additive ones may be
  std::vector<Index> col_factor;  // factor index per middle column
  for (std::size_t c = 1; c + 1 < header.size(); ++c) col_factor.push_back(spec.factor_index(header[c]));
  std::vector<Index> factor_col(spec.factors.size(), -1);
  for (std::size_t c = 0; c < col_factor.size(); ++c) factor_col[col_factor[c]] = static_cast<Index>(c + 1);
  for (const auto& name : spec.cut_factors) {
    if (factor_col[spec.factor_index(name)] < 0)
      throw input_error("population '" + path + "': missing cut factor column '" + name + "'");
  }

  PopulationTable pop;
  for (Index f = 0; f < spec.n_additive(); ++f) {
    if (factor_col[spec.factor_index(spec.additive_factors[f])] >= 0) {
      pop.add_factor_idx.push_back(f);
      pop.add_levels.emplace_back();
    }
  }

  std::vector<double> counts;
  std::vector<double> area_tot(graph.size(), 0.0);
  std::vector<Index> levels(spec.factors.size(), 0);
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw input_error("population '" + path + "' line " + std::to_string(line_no) +
                        ": wrong field count");
    const Index k = graph.area_index(fields[0]);
    for (std::size_t c = 1; c + 1 < fields.size(); ++c)
      levels[col_factor[c - 1]] = spec.factors[col_factor[c - 1]].level_index(fields[c]);
    const double n = parse_double(fields.back(), "population count");
    if (n < 0.0)
      throw input_error("population '" + path + "' line " + std::to_string(line_no) +
                        ": negative count");
    pop.cut_group.push_back(cuts.group_of(levels));
    for (std::size_t f = 0; f < pop.add_factor_idx.size(); ++f) {
      const Index fi = spec.factor_index(spec.additive_factors[pop.add_factor_idx[f]]);
      pop.add_levels[f].push_back(levels[fi]);
    }
    pop.area.push_back(k);
    counts.push_back(n);
    area_tot[k] += n;
  }
  pop.count = Eigen::Map<Vec>(counts.data(), static_cast<Index>(counts.size()));
  pop.area_total = Eigen::Map<Vec>(area_tot.data(), graph.size());
  return pop;
}

void write_population(const std::string& path, const PopulationTable& pop, const ModelSpec& spec,
                      const SpatialGraph& graph) {
  auto out = open_out(path);
  const CutLayout cuts(spec);
  out << "area";
  for (const auto& name : spec.cut_factors) out << ',' << name;
  for (const Index f : pop.add_factor_idx) out << ',' << spec.additive_factors[f];
  out << ",count\n";
  for (Index i = 0; i < pop.n_rows(); ++i) {
    out << graph.area_ids()[pop.area[i]];
    const auto cut_levels = cuts.decode(pop.cut_group[i]);
    for (std::size_t c = 0; c < cut_levels.size(); ++c) {
      const Index fi = cuts.cut_factor_indices()[c];
      out << ',' << spec.factors[fi].levels[cut_levels[c]];
    }
    for (std::size_t f = 0; f < pop.add_factor_idx.size(); ++f) {
      const Index fi = spec.factor_index(spec.additive_factors[pop.add_factor_idx[f]]);
      out << ',' << spec.factors[fi].levels[pop.add_levels[f][i]];
    }
    out << ',' << fmt_short(pop.count[i]) << '\n';
  }
}

// --- truth ----------------------------------------------------------------------

void write_truth(const std::string& path, const SyntheticTruth& truth, const ParamLayout& layout,
                 const std::vector<std::string>& notes) {
  auto out = open_out(path);
  for (const auto& note : notes) out << "# " << note << '\n';
  out << "name,value\n";
  Eigen::RowVectorXd row(layout.n_cols());
  state_to_row(truth.as_state(), layout, 0.0, row);
  for (Index c = 0; c < layout.n_cols(); ++c) {
    if (c == layout.loglik_col) continue;
    out << layout.names[c] << ',' << fmt_full(row[c]) << '\n';
  }
}

std::map<std::string, double> read_truth(const std::string& path) {
  auto in = open_in(path);
  std::map<std::string, double> values;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      if (line != "name,value") throw input_error("truth '" + path + "': bad header");
      seen_header = true;
      continue;
    }
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw input_error("truth '" + path + "': bad row '" + line + "'");
    values[line.substr(0, comma)] = parse_double(line.substr(comma + 1), "truth value");
  }
  return values;
}

// --- draws ----------------------------------------------------------------------

void write_chain_csv(const std::string& path, const ParamLayout& layout, const ChainDraws& chain) {
  auto out = open_out(path);
  out << "iter";
  for (const auto& name : layout.names) out << ',' << name;
  out << '\n';
  for (Index r = 0; r < chain.n_stored(); ++r) {
    out << chain.iterations[r];
    for (Index c = 0; c < layout.n_cols(); ++c) out << ',' << fmt_full(chain.samples(r, c));
    out << '\n';
  }
}

ChainDraws read_chain_csv(const std::string& path, const ParamLayout& expected) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw input_error("draws '" + path + "': empty file");
  const auto header = split_csv_line(line);
  if (header.size() != static_cast<std::size_t>(expected.n_cols()) + 1 || header[0] != "iter")
    throw input_error("draws '" + path + "': header does not match the configured model");
  for (Index c = 0; c < expected.n_cols(); ++c) {
    if (header[c + 1] != expected.names[c])
      throw input_error("draws '" + path + "': column '" + header[c + 1] +
                        "' does not match the configured model (expected '" + expected.names[c] +
                        "')");
  }

  std::vector<long> iters;
  std::vector<double> flat;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw input_error("draws '" + path + "': wrong field count");
    iters.push_back(parse_long(fields[0], "iteration"));
    for (std::size_t c = 1; c < fields.size(); ++c)
      flat.push_back(parse_double(fields[c], "draw value"));
  }
  ChainDraws chain;
  chain.iterations = std::move(iters);
  const Index rows = static_cast<Index>(chain.iterations.size());
  chain.samples.resize(rows, expected.n_cols());
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < expected.n_cols(); ++c)
      chain.samples(r, c) = flat[r * expected.n_cols() + c];
  return chain;
}

void write_draws(const std::string& dir, const PosteriorDraws& draws) {
  for (Index c = 0; c < draws.n_chains(); ++c) {
    const fs::path p = fs::path(dir) / ("chain_" + std::to_string(c + 1) + ".csv");
    write_chain_csv(p.string(), draws.layout, draws.chains[c]);
  }
}

PosteriorDraws read_draws(const std::string& dir, const ParamLayout& expected, int n_chains) {
  PosteriorDraws draws;
  draws.layout = expected;
  for (int c = 0; c < n_chains; ++c) {
    const fs::path p = fs::path(dir) / ("chain_" + std::to_string(c + 1) + ".csv");
    if (!fs::exists(p)) throw input_error("draws: missing file '" + p.string() + "'");
    draws.chains.push_back(read_chain_csv(p.string(), expected));
  }
  return draws;
}

// --- reports / estimates -----------------------------------------------------------

void write_report_csv(const std::string& path, const ConvergenceReport& report) {
  auto out = open_out(path);
  out << "name,rhat,ess,mean,sd,q2.5,q50,q97.5,flag\n";
  for (const auto& row : report.rows) {
    out << row.name << ',' << (row.rhat ? fmt_short(*row.rhat) : "na") << ','
        << fmt_short(row.ess) << ',' << fmt_short(row.mean) << ',' << fmt_short(row.sd) << ','
        << fmt_short(row.q025) << ',' << fmt_short(row.q500) << ',' << fmt_short(row.q975) << ','
        << (row.ess_degenerate ? "constant" : "") << '\n';
  }
}

void write_area_estimates_csv(const std::string& path, const AreaEstimates& est) {
  auto out = open_out(path);
  out << "area,category,mean,sd,q2.5,q50,q97.5\n";
  for (std::size_t k = 0; k < est.area_ids.size(); ++k) {
    for (Index j = 0; j < est.mean.cols(); ++j) {
      out << est.area_ids[k] << ',' << (j + 1);
      if (est.valid[k]) {
        out << ',' << fmt_short(est.mean(k, j)) << ',' << fmt_short(est.sd(k, j)) << ','
            << fmt_short(est.q025(k, j)) << ',' << fmt_short(est.q500(k, j)) << ','
            << fmt_short(est.q975(k, j));
      } else {
        out << ",na,na,na,na,na";
      }
      out << '\n';
    }
  }
}

void write_relevance_csv(const std::string& path, const std::vector<std::string>& area_ids,
                         const Vec& probs) {
  auto out = open_out(path);
  out << "area,prob,flag\n";
  for (std::size_t k = 0; k < area_ids.size(); ++k)
    out << area_ids[k] << ',' << fmt_short(probs[k]) << ',' << relevance_flag(probs[k]) << '\n';
}

void write_ppc_csv(const std::string& path, const PpcTable& table) {
  auto out = open_out(path);
  out << "area,category,pred_mean,pred_lo,pred_hi,observed\n";
  for (std::size_t a = 0; a < table.area_ids.size(); ++a) {
    for (Index j = 0; j < table.pred_mean.cols(); ++j) {
      out << table.area_ids[a] << ',' << (j + 1) << ',' << fmt_short(table.pred_mean(a, j)) << ','
          << fmt_short(table.pred_lo(a, j)) << ',' << fmt_short(table.pred_hi(a, j)) << ','
          << fmt_short(table.observed(a, j)) << '\n';
    }
  }
}

// --- manifest -----------------------------------------------------------------------

void write_manifest(const std::string& path, const ManifestInfo& info,
                    const PosteriorDraws* draws) {
  ojson j;
  j["tool"] = "spord";
  j["version"] = "0.1.0";
  j["command"] = info.command;
  j["seed"] = info.seed;
  j["spec_fingerprint"] = info.fingerprint;
  ojson hashes;
  for (const auto& [name, hash] : info.input_hashes) hashes[name] = hash;
  j["input_hashes"] = hashes;
  j["config"] = ojson::parse(info.config_json);
  j["warnings"] = info.warnings;
  j["notes"] = info.notes;
  if (draws != nullptr) {
    j["chains"] = info.n_chains;
    j["stored_per_chain"] = draws->chains.empty() ? 0 : draws->chains[0].n_stored();
    ojson chains = ojson::array();
    for (const auto& chain : draws->chains) {
      ojson cj;
      ojson scales, accepts;
      for (std::size_t b = 0; b < chain.block_names.size(); ++b) {
        scales[chain.block_names[b]] = chain.final_scales[b];
        accepts[chain.block_names[b]] = chain.post_accept_rate[b];
      }
      cj["proposal_scales"] = scales;
      cj["acceptance_rates"] = accepts;
      chains.push_back(cj);
    }
    j["chain_stats"] = chains;
  }
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string manifest_string_field(const std::string& path, const std::string& key) {
  auto in = open_in(path);
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const std::exception& e) {
    throw input_error("manifest '" + path + "': " + e.what());
  }
  if (!j.contains(key)) throw input_error("manifest '" + path + "': missing field '" + key + "'");
  return j.at(key).is_string() ? j.at(key).get<std::string>() : j.at(key).dump();
}

void prepare_out_dir(const std::string& dir, bool force) {
  if (dir.empty()) throw input_error("output directory not set");
  const fs::path p(dir);
  std::error_code ec;
  if (fs::exists(p, ec)) {
    if (!fs::is_directory(p, ec)) throw input_error("output path '" + dir + "' is not a directory");
    if (!fs::is_empty(p, ec) && !force)
      throw input_error("output directory '" + dir + "' is not empty (use --force to overwrite)");
  } else {
    if (!fs::create_directories(p, ec) || ec)
      throw input_error("cannot create output directory '" + dir + "': " + ec.message());
  }
}

}  // namespace spord
