#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qam/hilbert.hpp"
#include "qam/quantum_core.hpp"
#include "qam/types.hpp"

namespace qam {

struct OrthogonalPattern {
  ComplexMatrix rho;  // density operator in the local basis of its block
  std::size_t decaying_dim = 1;
};

struct DfsGroup {
  std::size_t dim = 1;
  std::vector<ComplexVector> patterns;  // unit vectors in the local basis of the block
  std::vector<std::size_t> decaying_dims;
};

// Coefficients c_x^alpha of the decaying block, per decaying basis state.
// Unset states use a single coefficient sqrt(1 - kappa) from the default kappa.
class DecayProfile {
 public:
  DecayProfile() = default;
  static DecayProfile uniform(double kappa);

  void set(const PatternRef& pattern, std::size_t x, std::vector<Complex> coefficients);
  void set_kappa(const PatternRef& pattern, std::size_t x, double kappa);
  std::vector<Complex> coefficients(const PatternRef& pattern, std::size_t x) const;
  // kappa_x = 1 - sum_alpha |c_x^alpha|^2.
  double transfer_rate(const PatternRef& pattern, std::size_t x) const;
  double default_kappa() const { return default_kappa_; }

 private:
  double default_kappa_ = 0.5;
  std::map<std::pair<PatternRef, std::size_t>, std::vector<Complex>> overrides_;
};

struct PatternSet {
  std::vector<OrthogonalPattern> orthogonal;
  std::vector<DfsGroup> dfs;
  DecayProfile decay;

  LayoutSpec layout_spec() const;
  std::size_t orthogonal_count() const { return orthogonal.size(); }
  std::size_t dfs_count() const;
  std::size_t pattern_count() const { return orthogonal_count() + dfs_count(); }
};

// Checks the pattern invariants and the decay profile against a layout.
void validate_pattern_set(const PatternSet& set, const SpaceLayout& layout);

// Eigen-decomposition of an orthogonal pattern: descending eigenvalues,
// ties broken lexicographically on phase-fixed eigenvector components.
struct PatternEigen {
  RealVector weights;
  ComplexMatrix vectors;  // columns, local basis
};
PatternEigen pattern_eigen(const ComplexMatrix& rho);

// Angles theta_k of the two stable-only Kraus operators, one per stable label:
// orthogonal (mu, j) pairs first, then DFS blocks.
std::vector<double> stable_angles(const PatternSet& set);

KrausChannel build_orthogonal(const PatternSet& set, const SpaceLayout& layout);
KrausChannel build_dfs(const PatternSet& set, const SpaceLayout& layout);
// Mixed orthogonal and DFS pattern sets.
KrausChannel build_qam(const PatternSet& set, const SpaceLayout& layout);

DensityOperator pattern_state(const PatternSet& set, const SpaceLayout& layout,
                              const PatternRef& pattern);

struct GusMemory {
  KrausChannel channel;
  SpaceLayout layout;
  PatternSet patterns;
  std::vector<ComplexVector> qubit_patterns;            // U^l |psi>, l = 0..M-1
  std::vector<std::vector<std::size_t>> basin_states;  // decaying labels x per basin
};

// Stable qubit at global indices 0,1; decaying |x> at 2 + x with basin x mod M.
GusMemory build_gus(std::size_t n_qubits, std::size_t pattern_count, const ComplexVector& psi,
                    const DecayProfile& decay = DecayProfile::uniform(0.5));

ComplexMatrix gus_rotation(std::size_t pattern_count);

struct PatternReport {
  PatternRef pattern;
  double fixed_point_residual = 0.0;
  double convergence_residual = 0.0;
  std::size_t max_iterations = 0;
  bool converged = true;
  double rate_residual = 0.0;
  double leakage = 0.0;
};

struct QamReport {
  std::vector<PatternReport> patterns;
  double spurious_mixture_residual = 0.0;
  double tolerance = kDefaultTolerance;
  bool passes = false;
  double max_fixed_point() const;
  double max_convergence() const;
  double max_rate() const;
  double max_leakage() const;
};

struct ValidationOptions {
  std::size_t max_iters = 100000;
  double iterate_tol = 1e-13;
};

QamReport validate_qam(const KrausChannel& channel, const PatternSet& set,
                       const SpaceLayout& layout, double tol,
                       const ValidationOptions& options = {});

// True when no Kraus operator carries both a stable part and a stable-decaying part.
bool stable_and_mixing_disjoint(const KrausChannel& channel);

}  // namespace qam
