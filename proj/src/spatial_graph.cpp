#include "spord/spatial_graph.hpp"

#include <algorithm>
#include <set>

namespace spord {

namespace {

// Union-find over area indices, for the connected-component count.
class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(n) {
    for (Index i = 0; i < n; ++i) parent_[i] = i;
  }
  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(Index a, Index b) { parent_[find(a)] = find(b); }

 private:
  std::vector<Index> parent_;
};

}  // namespace

SpatialGraph SpatialGraph::build(const std::vector<std::string>& areas,
                                 const std::vector<std::pair<std::string, std::string>>& edges) {
  if (areas.empty()) throw input_error("spatial graph: empty area list");
  SpatialGraph g;
  g.area_ids_ = areas;
  for (Index i = 0; i < static_cast<Index>(areas.size()); ++i) {
    if (!g.index_.emplace(areas[i], i).second)
      throw input_error("spatial graph: duplicate area id '" + areas[i] + "'");
  }

  const Index n = g.size();
  std::set<std::pair<Index, Index>> unique_edges;
  for (const auto& [a, b] : edges) {
    const auto ia = g.index_.find(a);
    if (ia == g.index_.end()) throw input_error("adjacency references unknown area id '" + a + "'");
    const auto ib = g.index_.find(b);
    if (ib == g.index_.end()) throw input_error("adjacency references unknown area id '" + b + "'");
    if (ia->second == ib->second)
      throw input_error("adjacency contains self-loop on area '" + a + "'");
    unique_edges.emplace(std::min(ia->second, ib->second), std::max(ia->second, ib->second));
  }
  g.edges_.assign(unique_edges.begin(), unique_edges.end());

  g.degrees_ = Vec::Zero(n);
  DisjointSets components(n);
  for (const auto& [a, b] : g.edges_) {
    g.degrees_[a] += 1.0;
    g.degrees_[b] += 1.0;
    components.unite(a, b);
  }
  std::set<Index> roots;
  for (Index i = 0; i < n; ++i) roots.insert(components.find(i));
  g.n_components_ = static_cast<int>(roots.size());

  Mat r = Mat::Zero(n, n);
  for (const auto& [a, b] : g.edges_) {
    r(a, b) = -1.0;
    r(b, a) = -1.0;
  }
  r.diagonal() = g.degrees_;
  Eigen::SelfAdjointEigenSolver<Mat> es(r);
  if (es.info() != Eigen::Success)
    throw numeric_error("spatial graph: eigendecomposition of R failed");
  g.r_eigenvalues_ = es.eigenvalues().cwiseMax(0.0);  // R is PSD; clip roundoff
  g.r_eigenvectors_ = es.eigenvectors();
  return g;
}

Index SpatialGraph::area_index(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw input_error("unknown area id '" + id + "'");
  return it->second;
}

double SpatialGraph::structure_quadratic(const Eigen::Ref<const Vec>& theta) const {
  if (theta.size() != size()) throw input_error("theta length does not match the number of areas");
  double q = 0.0;
  for (const auto& [a, b] : edges_) {
    const double d = theta[a] - theta[b];
    q += d * d;
  }
  return q;
}

void validate_hyper(const LcarHyper& hyper, double sigma_max) {
  if (!(hyper.sigma > 0.0)) throw std::domain_error("lcar: sigma must be positive");
  if (!(hyper.sigma <= sigma_max)) throw std::domain_error("lcar: sigma exceeds sigma_max");
  if (!(hyper.lambda > 0.0 && hyper.lambda < 1.0))
    throw std::domain_error("lcar: lambda must lie in (0,1)");
}

SpMat lcar_precision(const SpatialGraph& graph, const LcarHyper& hyper) {
  if (!(hyper.sigma > 0.0)) throw std::domain_error("lcar: sigma must be positive");
  if (!(hyper.lambda > 0.0 && hyper.lambda < 1.0))
    throw std::domain_error("lcar: lambda must lie in (0,1)");
  const double lambda = std::clamp(hyper.lambda, kLambdaGuard, 1.0 - kLambdaGuard);
  const double inv_s2 = 1.0 / (hyper.sigma * hyper.sigma);
  const Index n = graph.size();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) + 2 * graph.edge_list().size());
  for (Index i = 0; i < n; ++i)
    triplets.emplace_back(i, i, inv_s2 * (lambda * graph.degrees()[i] + 1.0 - lambda));
  for (const auto& [a, b] : graph.edge_list()) {
    triplets.emplace_back(a, b, -inv_s2 * lambda);
    triplets.emplace_back(b, a, -inv_s2 * lambda);
  }
  SpMat q(n, n);
  q.setFromTriplets(triplets.begin(), triplets.end());
  return q;
}

double lcar_logdensity_terms(double structure_quad, double squared_norm,
                             const Vec& r_eigenvalues, const LcarHyper& hyper) {
  if (!(hyper.sigma > 0.0)) throw std::domain_error("lcar: sigma must be positive");
  if (!(hyper.lambda > 0.0 && hyper.lambda < 1.0))
    throw std::domain_error("lcar: lambda must lie in (0,1)");
  const double lambda = std::clamp(hyper.lambda, kLambdaGuard, 1.0 - kLambdaGuard);
  const double k = static_cast<double>(r_eigenvalues.size());
  const double logdet =
      -2.0 * k * std::log(hyper.sigma) +
      (lambda * r_eigenvalues.array() + (1.0 - lambda)).log().sum();
  const double quad =
      (lambda * structure_quad + (1.0 - lambda) * squared_norm) / (hyper.sigma * hyper.sigma);
  return 0.5 * logdet - 0.5 * k * kLog2Pi - 0.5 * quad;
}

double lcar_logdensity(const Eigen::Ref<const Vec>& theta, const SpatialGraph& graph,
                       const LcarHyper& hyper) {
  return lcar_logdensity_terms(graph.structure_quadratic(theta), theta.squaredNorm(),
                               graph.r_eigenvalues(), hyper);
}

}  // namespace spord
