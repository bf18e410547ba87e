#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qam/hilbert.hpp"
#include "qam/lindblad.hpp"
#include "qam/qam_builder.hpp"
#include "qam/quantum_core.hpp"
#include "qam/table.hpp"

namespace qam {

// ---- dissipative walk on the hypercube ----

struct WalkSpec {
  std::size_t n_qubits = 3;
  std::vector<std::string> patterns;
  double gamma = 1.0;
  double eta = 0.1;
  double kappa = 0.0;
};

struct WalkModel {
  Liouvillian liouvillian;
  SpaceLayout layout;
  PatternSet patterns;
  std::vector<int> basin_of;  // pattern index per basis state, -1 for ties
  std::vector<std::size_t> pattern_indices;
};

// Bit strings map to basis indices with the first character most significant.
std::size_t bitstring_index(const std::string& bits);
std::string index_bitstring(std::size_t index, std::size_t n_qubits);
ComplexMatrix pauli_z(std::size_t qubit, std::size_t n_qubits);

WalkModel build_walk(const WalkSpec& spec);

Table walk_retrieval_curve(const WalkSpec& spec, const std::string& initial,
                           const std::vector<std::string>& observables,
                           const std::vector<double>& times);

// ---- driven-dissipative n-photon resonator ----

struct ResonatorSpec {
  std::size_t n = 3;
  double delta = 0.4;
  double eta = 1.56;
  double theta0 = 0.0;
  double gamma1 = 1.0;
  double gamma_n = 0.2;
  std::size_t fock_dim = 40;
};

struct ResonatorModel {
  ResonatorSpec spec;
  Liouvillian liouvillian;
  double nominal_radius;               // (2 eta / gamma_n)^(1/n)
  std::vector<double> nominal_angles;  // 2 pi j / n + theta0
  std::vector<Complex> lobes;          // stationary mean-field amplitudes
};

ComplexMatrix annihilation(std::size_t fock_dim);
// Coherent state truncated to fock_dim levels and renormalized.
ComplexVector coherent_state(Complex beta, std::size_t fock_dim);
std::vector<Complex> mean_field_lobes(const ResonatorSpec& spec);
ResonatorModel build_resonator(const ResonatorSpec& spec);
ComplexMatrix parity_projector(std::size_t n, std::size_t mu, std::size_t fock_dim);
// Population of the highest Fock level; TruncationTooSmall above tol.
double check_truncation(const ComplexMatrix& rho, double tol = 1e-8);

struct QuadratureGrid {
  std::size_t radial = 80;
  std::size_t angular = 80;
  double r_max = 0.0;      // 0 selects sqrt(fock_dim)
  bool normalize = true;   // renormalize truncated coherent states
};

ComplexMatrix lobe_basin_projector(const ResonatorModel& model, std::size_t lobe,
                                   const QuadratureGrid& grid = {});

struct BasinProjectors {
  std::vector<ComplexMatrix> projectors;
  double completeness_residual;  // on Fock levels m <= r^2
};

BasinProjectors lobe_basin_projectors(const ResonatorModel& model, const QuadratureGrid& grid = {});

struct ClassificationOptions {
  double measure_factor = 3.0;  // t_measure = factor * tau_s
  double dt = 0.002;
  double input_radius = 0.0;    // 0 selects the lobe radius
  double gap_threshold = 10.0;
  bool exact_lobes = false;     // inputs cycle through the lobe coherent states
  std::size_t threads = 1;
  QuadratureGrid grid{};
};

struct ClassifiedInput {
  Complex beta;
  std::size_t label;
  std::size_t outcome;  // == lobe count for the inconclusive outcome
  double overlap;
};

struct ClassificationReport {
  std::size_t n_inputs = 0;
  std::size_t correct = 0;
  std::size_t wrong = 0;
  std::size_t unclassified = 0;
  double accuracy = 0.0;  // correct / (correct + wrong)
  double unclassified_fraction = 0.0;
  std::vector<double> per_class_accuracy;
  std::vector<std::vector<std::size_t>> confusion;  // label x (outcome, then "?")
  double povm_scale = 1.0;
  double tau_s = 0.0;
  double tau_f = 0.0;
  double gap_ratio = 0.0;
  std::size_t metastable_modes = 0;
  double t_measure = 0.0;
  std::vector<ClassifiedInput> inputs;
};

ClassificationReport lobe_classification_experiment(const ResonatorSpec& spec,
                                                    std::size_t n_inputs, double delta,
                                                    std::uint64_t seed,
                                                    const ClassificationOptions& options = {});

struct CatPatterns {
  std::vector<ComplexVector> states;
  double gram_residual;
};

CatPatterns cat_patterns(const ResonatorModel& model);

struct CatRunReport {
  Table series;  // t, overlap with C_0, sector-0 population
  double reset_time = 0.0;
  double max_overlap_after_reset = 0.0;
  double final_overlap = 0.0;
  double parity_drift = 0.0;  // max |<P_0>(t) - <P_0>(0)|
  std::size_t jumps = 0;
};

CatRunReport cat_error_correction_run(const ResonatorSpec& spec, double reset_time, double t_final,
                                      double dt, std::uint64_t seed, std::size_t record_every = 10);

// ---- classical Hopfield network ----

struct HopfieldNet {
  std::size_t n = 0;
  Eigen::MatrixXi weights;  // sum_mu xi_i xi_j, zero diagonal
  double scale = 1.0;       // J = scale * weights
  std::vector<std::vector<int>> patterns;
  RealMatrix couplings() const { return scale * weights.cast<double>(); }
};

HopfieldNet make_hopfield(const std::vector<std::vector<int>>& patterns);
RealMatrix hebbian_couplings(const std::vector<std::vector<int>>& patterns);
// E / scale = -1/2 sum_ij w_ij s_i s_j, exact in integers.
long long hopfield_energy_units(const HopfieldNet& net, const std::vector<int>& state);
double hopfield_energy(const HopfieldNet& net, const std::vector<int>& state);

struct HopfieldRun {
  std::vector<int> final_state;
  std::vector<long long> energies;  // in weight units, one per flip plus the start
  std::size_t flips = 0;
  std::size_t sweeps = 0;
  bool converged = false;
};

HopfieldRun hopfield_update(const HopfieldNet& net, const std::vector<int>& state,
                            std::size_t max_sweeps, std::uint64_t seed);

struct HopfieldExperiment {
  std::size_t n = 0;
  std::size_t patterns = 0;
  std::size_t trials = 0;
  double flip_fraction = 0.0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  bool energy_monotone = true;
  double mean_overlap = 0.0;
};

HopfieldExperiment hopfield_recall_experiment(std::size_t n, std::size_t m, double flip_fraction,
                                              std::size_t trials, std::uint64_t seed,
                                              std::size_t threads = 1);

// ---- local amplitude damping (one stable and one decaying level per pattern) ----

struct AmplitudeDampingChannel {
  KrausChannel channel;
  SpaceLayout layout;
};

// K0 = sum cos(theta_mu)|mu><mu| + sqrt(1-q_mu)|w_mu><w_mu|,
// K1 = sum sin(theta_mu)|mu><mu|, K2 = sum sqrt(q_mu)|mu><w_mu|.
AmplitudeDampingChannel local_amplitude_damping(const std::vector<double>& q,
                                                const std::vector<double>& theta);

}  // namespace qam
