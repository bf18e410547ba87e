#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qam/hilbert.hpp"
#include "qam/rng.hpp"
#include "qam/types.hpp"

namespace qam {

class DensityOperator {
 public:
  // Validates Hermiticity, unit trace and positivity; eigenvalues in (-tol, 0) are clamped.
  explicit DensityOperator(const ComplexMatrix& m, double tol = kDefaultTolerance);

  static DensityOperator pure(const ComplexVector& psi);
  static DensityOperator basis(Eigen::Index dim, Eigen::Index index);
  static DensityOperator maximally_mixed(Eigen::Index dim);
  // Skips the spectral check; only the Hermitian part is kept.
  static DensityOperator trusted(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double expectation(const ComplexMatrix& op) const;

 private:
  DensityOperator() = default;
  ComplexMatrix m_;
};

// Which layout blocks an operator occupies.
struct BlockTags {
  bool s = false;
  bool sd = false;
  bool d = false;
  bool lower_left = false;
};

class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> ops,
                        std::optional<SpaceLayout> layout = std::nullopt);

  const std::vector<ComplexMatrix>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  Eigen::Index dim() const { return dim_; }
  const std::optional<SpaceLayout>& layout() const { return layout_; }
  const std::vector<BlockTags>& block_tags() const { return tags_; }
  double completeness_residual() const { return completeness_; }

  // Column-stacking superoperator sum_a conj(K_a) (x) K_a, built on first use.
  const ComplexMatrix& superoperator() const;

 private:
  std::vector<ComplexMatrix> ops_;
  std::optional<SpaceLayout> layout_;
  std::vector<BlockTags> tags_;
  Eigen::Index dim_ = 0;
  double completeness_ = 0.0;
  std::shared_ptr<struct SuperopCache> cache_;
};

struct CptpReport {
  double completeness = 0.0;
  std::optional<double> s_block;
  std::optional<double> sd_block;
  std::optional<double> d_block;
  std::optional<double> lower_left;
  double tolerance = kDefaultTolerance;
  bool passes = false;
  double max_residual() const;
};

CptpReport check_cptp(const KrausChannel& channel, double tol = kDefaultTolerance);

DensityOperator apply_channel(const KrausChannel& channel, const DensityOperator& state);
ComplexMatrix apply_channel(const KrausChannel& channel, const ComplexMatrix& x);
// Heisenberg picture: sum_a K_a^dagger X K_a.
ComplexMatrix apply_dual(const KrausChannel& channel, const ComplexMatrix& x);

struct FixedPointResult {
  DensityOperator state;
  std::size_t iterations;
  bool converged;
  double last_step;  // trace distance between the last two iterates
};

FixedPointResult iterate_to_fixed_point(const KrausChannel& channel, const DensityOperator& state,
                                        std::size_t max_iters, double tol);

// Applies the channel r times to an arbitrary operator.
ComplexMatrix iterate_channel(const KrausChannel& channel, const ComplexMatrix& x, std::size_t r);

struct FixedPointCheck {
  bool is_fixed;
  double residual;
};

FixedPointCheck check_fixed_point(const KrausChannel& channel, const DensityOperator& state,
                                  double tol = kDefaultTolerance);

struct ChoiMatrix {
  ComplexMatrix matrix;
  Eigen::Index dim;  // dimension of the underlying space
};

// J = sum_a vec(K_a) vec(K_a)^dagger with column stacking:
// row index i + j*N carries output i and input j.
ChoiMatrix choi_of(const KrausChannel& channel);
ComplexMatrix apply_choi(const ChoiMatrix& choi, const ComplexMatrix& x);
// Kraus operators from the spectral decomposition of J.
KrausChannel channel_from_choi(const ChoiMatrix& choi, double tol = 1e-12);
// Trace over the output factor; equals I for trace-preserving maps.
ComplexMatrix choi_input_marginal(const ChoiMatrix& choi);

struct Povm {
  std::vector<ComplexMatrix> effects;
};

void validate_povm(const Povm& povm, double tol = kDefaultTolerance);

struct MeasurementResult {
  std::size_t outcome;
  std::vector<double> probabilities;
};

std::vector<double> outcome_probabilities(const Povm& povm, const DensityOperator& state);
MeasurementResult measure(const Povm& povm, const DensityOperator& state, Rng& rng);
MeasurementResult measure(const Povm& povm, const DensityOperator& state, std::uint64_t seed);

// E_k = Phi^{-1/2}|psi_k><psi_k|Phi^{-1/2}, plus the projector onto the
// complement of span{psi_k} when that complement is non-trivial.
Povm square_root_measurement(const std::vector<ComplexVector>& states);

// p_k = <psi_k|E_k|psi_k>.
std::vector<double> success_probabilities(const Povm& povm,
                                          const std::vector<ComplexVector>& states);

struct UnambiguousPovm {
  Povm povm;  // effects Pi_0..Pi_{M-1}, then Pi_?
  double scale;
};

// Pi_mu = c |psi_mu><psi_mu|, Pi_? = I - sum Pi_mu, c = 1 unless Pi_? would be
// negative, in which case c = 1 / lambda_max(sum |psi><psi|).
UnambiguousPovm unambiguous_povm(const std::vector<ComplexVector>& states,
                                 double tol = kDefaultTolerance);

}  // namespace qam
