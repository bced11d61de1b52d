#pragma once

#include "spord/types.hpp"

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spord {

// Hyperparameters of the Leroux CAR field: sigma scales the effects, lambda
// mixes the neighbourhood structure term against independence.
struct LcarHyper {
  double sigma = 1.0;
  double lambda = 0.5;
};

// lambda is evaluated inside [guard, 1-guard] so the precision stays positive
// definite even on graphs with isolated areas.
inline constexpr double kLambdaGuard = 1e-6;
inline constexpr double kDefaultSigmaMax = 10.0;

// Area adjacency structure. Immutable once built and safe to share across
// chains. The spectral decomposition of R = D - W is cached at construction,
// which makes every later log-determinant O(K).
class SpatialGraph {
 public:
  static SpatialGraph build(const std::vector<std::string>& areas,
                            const std::vector<std::pair<std::string, std::string>>& edges);

  Index size() const { return static_cast<Index>(area_ids_.size()); }
  const std::vector<std::string>& area_ids() const { return area_ids_; }
  bool has_area(const std::string& id) const { return index_.count(id) > 0; }
  Index area_index(const std::string& id) const;

  // Deduplicated undirected edges with first < second (by area index).
  const std::vector<std::pair<Index, Index>>& edge_list() const { return edges_; }
  const Vec& degrees() const { return degrees_; }
  const Vec& r_eigenvalues() const { return r_eigenvalues_; }
  const Mat& r_eigenvectors() const { return r_eigenvectors_; }
  int n_components() const { return n_components_; }

  // theta' (D - W) theta = sum over edges (theta_a - theta_b)^2.
  double structure_quadratic(const Eigen::Ref<const Vec>& theta) const;

 private:
  std::vector<std::string> area_ids_;
  std::unordered_map<std::string, Index> index_;
  std::vector<std::pair<Index, Index>> edges_;
  Vec degrees_;
  Vec r_eigenvalues_;
  Mat r_eigenvectors_;
  int n_components_ = 0;
};

// Throws std::domain_error when hyperparameters leave the prior support.
void validate_hyper(const LcarHyper& hyper, double sigma_max = kDefaultSigmaMax);

// Q = sigma^-2 (lambda R + (1-lambda) I), symmetric positive definite for
// lambda < 1.
SpMat lcar_precision(const SpatialGraph& graph, const LcarHyper& hyper);

// Log density of the zero-mean Gaussian with precision lcar_precision(),
// using the cached eigenvalues of R for the determinant.
double lcar_logdensity(const Eigen::Ref<const Vec>& theta, const SpatialGraph& graph,
                       const LcarHyper& hyper);

// Same density from precomputed quadratic forms; the sampler uses this to
// re-evaluate sigma/lambda moves without touching theta.
double lcar_logdensity_terms(double structure_quad, double squared_norm,
                             const Vec& r_eigenvalues, const LcarHyper& hyper);

}  // namespace spord
