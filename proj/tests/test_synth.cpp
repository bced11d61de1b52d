#include "spord/synth.hpp"

#include "spord/constraints.hpp"
#include "spord/model.hpp"
#include "spord/rng.hpp"

#include "doctest.h"

using namespace spord;

namespace {

ModelSpec benchmark_spec() {
  ModelSpec spec;
  spec.n_categories = 5;
  spec.factors = {{"sex", {"m", "f"}},
                  {"age", {"a1", "a2", "a3", "a4", "a5"}},
                  {"dw", {"d1", "d2", "d3", "d4"}}};
  spec.cut_factors = {"sex", "age"};
  spec.additive_factors = {"dw"};
  return spec;
}

// Moran's I with binary contiguity weights
double morans_i(const Vec& x, const SpatialGraph& g) {
  const Vec c = x.array() - x.mean();
  double num = 0.0;
  for (const auto& [a, b] : g.edge_list()) num += 2.0 * c[a] * c[b];
  const double denom = c.squaredNorm();
  const double w_total = 2.0 * double(g.edge_list().size());
  return (double(g.size()) / w_total) * (num / denom);
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("grid graph shape") {
  const auto g = grid_graph(10, 5);
  CHECK(g.size() == 50);
  CHECK(g.edge_list().size() == 10 * 4 + 9 * 5);  // horizontal + vertical
  CHECK(g.n_components() == 1);
  CHECK_THROWS_AS(grid_graph(0, 3), input_error);
}

TEST_CASE("same seed reproduces the identical truth, population and survey") {
  const auto spec = benchmark_spec();
  const auto graph = grid_graph(4, 3);
  TruthConfig tcfg;
  const auto [t1, p1] = generate_population(spec, graph, tcfg, 31);
  const auto [t2, p2] = generate_population(spec, graph, tcfg, 31);
  CHECK(t1.kappa == t2.kappa);
  CHECK(t1.theta == t2.theta);
  CHECK(t1.alpha[0] == t2.alpha[0]);
  CHECK(p1.count == p2.count);

  SurveyDesign design;
  design.stratum_factor = "dw";
  design.quota = 8;
  const auto s1 = draw_survey(t1, p1, spec, graph, design, 55);
  const auto s2 = draw_survey(t2, p2, spec, graph, design, 55);
  REQUIRE(s1.size() == s2.size());
  for (Index i = 0; i < s1.size(); ++i) {
    CHECK(s1.records[i].area_id == s2.records[i].area_id);
    CHECK(s1.records[i].outcome == s2.records[i].outcome);
  }
  const auto s3 = draw_survey(t1, p1, spec, graph, design, 56);
  bool differs = s3.size() != s1.size();
  for (Index i = 0; !differs && i < s1.size(); ++i)
    differs = s1.records[i].outcome != s3.records[i].outcome;
  CHECK(differs);
}

TEST_CASE("degenerate configs are input errors") {
  auto spec = benchmark_spec();
  const auto graph = grid_graph(2, 2);
  spec.n_categories = 1;
  CHECK_THROWS_AS(generate_population(spec, graph, TruthConfig{}, 1), input_error);
  spec = benchmark_spec();
  TruthConfig bad;
  bad.lambda = 1.5;
  CHECK_THROWS_AS(generate_population(spec, graph, bad, 1), input_error);
  bad = TruthConfig{};
  bad.pop_cell_max = 5;
  bad.pop_cell_min = 10;
  CHECK_THROWS_AS(generate_population(spec, graph, bad, 1), input_error);
}

TEST_CASE("single area with zero effects and uniform delta gives uniform outcomes") {
  ModelSpec spec;
  spec.n_categories = 4;
  spec.factors = {{"dw", {"d1"}}};
  spec.cut_factors = {};
  spec.additive_factors = {"dw"};
  spec.include_spatial = false;
  const auto graph = grid_graph(1, 1);
  TruthConfig tcfg;
  tcfg.uniform_kappa = true;
  tcfg.alpha_sd = 0.0;
  tcfg.pop_cell_min = 20000;
  tcfg.pop_cell_max = 20000;
  const auto [truth, pop] = generate_population(spec, graph, tcfg, 3);
  CHECK(truth.theta[0] == 0.0);
  CHECK(truth.alpha[0][0] == 0.0);

  const Mat pi = cell_probabilities(truth.as_state(), spec, pop.cut_group, pop.add_factor_idx,
                                    pop.add_levels, pop.area);
  for (Index j = 0; j < 4; ++j) CHECK(pi(0, j) == doctest::Approx(0.25).epsilon(1e-12));

  // census: empirical frequencies converge to 1/J within 3 binomial SEs
  SurveyDesign design;
  design.fraction = 1.0;
  const auto data = draw_survey(truth, pop, spec, graph, design, 17);
  REQUIRE(data.size() == 20000);
  Vec freq = Vec::Zero(4);
  for (const auto& rec : data.records) freq[rec.outcome - 1] += 1.0;
  freq /= 20000.0;
  const double se = std::sqrt(0.25 * 0.75 / 20000.0);
  for (Index j = 0; j < 4; ++j) CHECK(std::abs(freq[j] - 0.25) < 3.0 * se);
}

TEST_CASE("strong spatial dependence shows positive Moran's I") {
  const auto spec = benchmark_spec();
  const auto graph = grid_graph(10, 5);
  TruthConfig tcfg;
  tcfg.lambda = 0.99;
  tcfg.sigma = 1.0;
  const auto [truth, pop] = generate_population(spec, graph, tcfg, 7);
  CHECK(morans_i(truth.theta, graph) > 0.0);
}

TEST_CASE("full-fraction design is a census and quotas add up") {
  const auto spec = benchmark_spec();
  const auto graph = grid_graph(2, 2);
  TruthConfig tcfg;
  tcfg.pop_cell_min = 5;
  tcfg.pop_cell_max = 9;
  const auto [truth, pop] = generate_population(spec, graph, tcfg, 23);

  SurveyDesign census;
  census.fraction = 1.0;
  const auto all = draw_survey(truth, pop, spec, graph, census, 1);
  CHECK(double(all.size()) == pop.count.sum());

  SurveyDesign quotas;
  quotas.stratum_factor = "";  // one stratum per area
  quotas.quota = 10;
  const auto some = draw_survey(truth, pop, spec, graph, quotas, 2);
  CHECK(some.size() == 10 * graph.size());

  SurveyDesign zero_area = quotas;
  zero_area.quota_override[graph.area_ids()[0]] = 0;
  const auto sparse = draw_survey(truth, pop, spec, graph, zero_area, 3);
  CHECK(sparse.size() == 10 * (graph.size() - 1));
  for (const auto& rec : sparse.records) CHECK(rec.area_id != graph.area_ids()[0]);
}

TEST_CASE("oversized quota is an input error") {
  const auto spec = benchmark_spec();
  const auto graph = grid_graph(2, 2);
  TruthConfig tcfg;
  tcfg.pop_cell_min = 2;
  tcfg.pop_cell_max = 3;
  const auto [truth, pop] = generate_population(spec, graph, tcfg, 5);
  SurveyDesign design;
  design.stratum_factor = "dw";
  design.quota = 100000;
  CHECK_THROWS_AS(draw_survey(truth, pop, spec, graph, design, 1), input_error);
}

TEST_CASE("second-stage subsampling keeps about the configured share") {
  ModelSpec spec;
  spec.n_categories = 3;
  spec.factors = {{"age", {"young", "old"}}};
  spec.cut_factors = {"age"};
  spec.additive_factors = {};
  spec.include_spatial = false;
  const auto graph = grid_graph(1, 1);
  TruthConfig tcfg;
  tcfg.uniform_kappa = true;
  tcfg.pop_cell_min = 50000;
  tcfg.pop_cell_max = 50000;
  const auto [truth, pop] = generate_population(spec, graph, tcfg, 9);

  SurveyDesign design;
  design.fraction = 1.0;
  design.second_stage_factor = "age";
  design.second_stage_rate = {{"young", 0.5}};
  const auto data = draw_survey(truth, pop, spec, graph, design, 11);
  double young = 0.0, old = 0.0;
  for (const auto& rec : data.records) (rec.factor_levels[0] == "young" ? young : old) += 1.0;
  CHECK(old == 50000.0);  // rate defaults to 1
  const double se = std::sqrt(0.5 * 0.5 * 50000.0);
  CHECK(std::abs(young - 25000.0) < 3.0 * se);
}

TEST_CASE("cell frequencies converge to the truth probabilities") {
  ModelSpec spec;
  spec.n_categories = 5;
  spec.factors = {{"sex", {"m", "f"}}};
  spec.cut_factors = {"sex"};
  spec.additive_factors = {};
  spec.include_spatial = false;
  const auto graph = grid_graph(1, 1);
  TruthConfig tcfg;
  tcfg.pop_cell_min = 40000;
  tcfg.pop_cell_max = 40000;
  const auto [truth, pop] = generate_population(spec, graph, tcfg, 13);
  SurveyDesign design;
  design.fraction = 1.0;
  const auto data = draw_survey(truth, pop, spec, graph, design, 29);

  const Mat pi = cell_probabilities(truth.as_state(), spec, pop.cut_group, pop.add_factor_idx,
                                    pop.add_levels, pop.area);
  Mat freq = Mat::Zero(2, 5);
  Vec totals = Vec::Zero(2);
  for (const auto& rec : data.records) {
    const Index g = rec.factor_levels[0] == "m" ? 0 : 1;
    freq(g, rec.outcome - 1) += 1.0;
    totals[g] += 1.0;
  }
  for (Index r = 0; r < pop.n_rows(); ++r) {
    const Index g = pop.cut_group[r];
    for (Index j = 0; j < 5; ++j) {
      const double p = pi(r, j);
      const double se = std::sqrt(p * (1 - p) / totals[g]);
      CHECK(std::abs(freq(g, j) / totals[g] - p) < 3.5 * se + 1e-12);
    }
  }
}

TEST_CASE("generated surveys pass dataset validation and truth satisfies population constraints") {
  const auto spec = benchmark_spec();
  const auto graph = grid_graph(3, 3);
  const auto [truth, pop] = generate_population(spec, graph, TruthConfig{}, 77);
  SurveyDesign design;
  design.stratum_factor = "dw";
  design.quota = 12;
  const auto data = draw_survey(truth, pop, spec, graph, design, 78);
  CHECK_NOTHROW(validate_dataset(data, spec, graph));

  const auto pop_cons = ConstraintSet::from_weights(pop.constraint_weights(spec, graph.size()));
  CHECK(pop_cons.max_violation(truth.theta) < 1e-9);
}

}  // TEST_SUITE
