#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "qam/quantum_core.hpp"
#include "qam/types.hpp"

namespace qam {

struct JumpOperator {
  ComplexMatrix op;
  double rate = 1.0;
};

// GKSL generator L(rho) = -i[H, rho] + sum_l gamma_l (F rho F^dag - {F^dag F, rho}/2).
// The superoperator acts on column-stacked vec(rho): vec(A X B) = (B^T (x) A) vec(X).
class Liouvillian {
 public:
  Liouvillian(ComplexMatrix hamiltonian, std::vector<JumpOperator> jumps);

  const ComplexMatrix& hamiltonian() const { return h_; }
  const std::vector<JumpOperator>& jumps() const { return jumps_; }
  Eigen::Index dim() const { return h_.rows(); }

  ComplexMatrix apply(const ComplexMatrix& rho) const;
  ComplexMatrix effective_hamiltonian() const;

  const ComplexMatrix& superoperator() const;
  // Index sets of the superoperator that are not coupled to each other.
  const std::vector<std::vector<Eigen::Index>>& components() const;

 private:
  ComplexMatrix h_;
  std::vector<JumpOperator> jumps_;
  std::shared_ptr<struct LiouvillianCache> cache_;
};

Liouvillian build_liouvillian(const ComplexMatrix& hamiltonian, std::vector<JumpOperator> jumps,
                              double tol = kDefaultTolerance);

// exp(t L) restricted to each uncoupled component.
class Propagator {
 public:
  Propagator(const Liouvillian& liouvillian, double t);
  ComplexMatrix apply(const ComplexMatrix& rho) const;
  double time() const { return t_; }

 private:
  double t_;
  Eigen::Index dim_;
  std::vector<std::vector<Eigen::Index>> components_;
  std::vector<ComplexMatrix> blocks_;
};

DensityOperator evolve(const Liouvillian& liouvillian, const DensityOperator& rho0, double t);
// States at each time of an ascending grid; equal increments reuse one propagator.
std::vector<DensityOperator> evolve_grid(const Liouvillian& liouvillian,
                                         const DensityOperator& rho0,
                                         const std::vector<double>& times);

struct Spectrum {
  std::vector<Complex> eigenvalues;  // ascending decay rate -Re(lambda)
  std::vector<ComplexMatrix> right;
  std::vector<ComplexMatrix> left;   // tr(L_j^dag R_k) = delta_jk
  double biorthogonality_residual = 0.0;
  std::size_t total_modes = 0;
};

Spectrum spectrum_of(const Liouvillian& liouvillian, std::size_t k);
// sum_k tr(L_k^dag rho0) e^{lambda_k t} R_k over the modes held in the spectrum.
ComplexMatrix spectral_evolve(const Spectrum& spectrum, const ComplexMatrix& rho0, double t);

// Largest n >= 2 with rate_{n+1} / rate_n > threshold and rate_n > 0.
std::size_t metastable_mode_count(const std::vector<Complex>& eigenvalues, double threshold);

struct MetastableManifold {
  std::size_t n = 0;
  double gap_ratio = 0.0;
  double tau_s = 0.0;
  double tau_f = 0.0;
  std::vector<DensityOperator> phases;
  std::vector<ComplexMatrix> basin_observables;
  RealMatrix overlaps;  // tr(P_mu rho_nu)
  double completeness_residual = 0.0;  // max |sum P_mu - I|
  std::vector<std::size_t> cluster_sizes;
};

// Probe states are projected onto the slow modes; the n most extreme projections
// seed clusters whose means are the metastable phases.
MetastableManifold detect_metastable_manifold(const Spectrum& spectrum, double threshold,
                                              const std::vector<ComplexMatrix>& probes);
MetastableManifold detect_metastable_manifold(const Spectrum& spectrum, double threshold);

// Index mu with tr(P_mu rho) >= 1/2, if any.
std::optional<std::size_t> classify_basin(const MetastableManifold& manifold,
                                          const ComplexMatrix& rho);

struct SymmetryReport {
  double hamiltonian_commutator = 0.0;
  std::vector<double> jump_commutators;
  double conservation_residual = 0.0;
  bool strong = false;
};

SymmetryReport check_strong_symmetry(const Liouvillian& liouvillian, const ComplexMatrix& j,
                                     double tol = 1e-10, std::uint64_t seed = 7);

struct ConservedReport {
  double max_commutator = 0.0;
  double dual_residual = 0.0;
  bool conserved = false;
  bool consistent = false;
};

ConservedReport check_conserved_projector(const KrausChannel& channel, const ComplexMatrix& j,
                                          double tol = 1e-10);

struct JumpEvent {
  double time;
  std::size_t channel;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<ComplexVector> states;  // normalized snapshots
  std::vector<JumpEvent> jumps;
};

struct TrajectoryOptions {
  std::size_t record_every = 1;  // snapshot every this many steps (and at the end)
  double max_norm_loss = 0.1;
  std::size_t max_halvings = 30;
};

// Monte Carlo wave-function unraveling with the exact no-jump propagator
// exp(-i H_eff dt) and waiting-time jump sampling.
class JumpIntegrator {
 public:
  JumpIntegrator(const Liouvillian& liouvillian, double dt, TrajectoryOptions options = {});

  TrajectoryRecord run(const ComplexVector& psi0, double t_final, std::uint64_t seed) const;
  double dt() const { return dt_; }

 private:
  const ComplexMatrix& propagator(std::size_t level) const;
  void advance(ComplexVector& psi, std::size_t level, double& threshold, double& t, Rng& rng,
               TrajectoryRecord& rec) const;

  const Liouvillian* liouvillian_;
  double dt_;
  TrajectoryOptions options_;
  std::vector<ComplexMatrix> jump_ops_;  // sqrt(gamma) F
  ComplexMatrix h_eff_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::unique_ptr<ComplexMatrix>> propagators_;
};

TrajectoryRecord trajectory(const Liouvillian& liouvillian, const ComplexVector& psi0,
                            double t_final, double dt, std::uint64_t seed,
                            TrajectoryOptions options = {});

// Average of |psi><psi| over n trajectories with seeds derive_seed(master, i).
// Reduction is in trajectory order, so the result does not depend on `threads`.
struct EnsembleResult {
  std::vector<double> times;
  std::vector<ComplexMatrix> mean_states;
};

EnsembleResult trajectory_ensemble(const JumpIntegrator& integrator, const ComplexVector& psi0,
                                   double t_final, std::size_t n_traj, std::uint64_t master_seed,
                                   std::size_t threads = 1);

}  // namespace qam
