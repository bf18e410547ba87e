#include "qam/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "qam/errors.hpp"
#include "qam/linalg.hpp"

namespace qam {

DensityOperator::DensityOperator(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0)
    fail(ErrorCode::DimMismatch, "density operator must be a non-empty square matrix");
  if (hermiticity_residual(m) > tol) fail(ErrorCode::InvalidState, "matrix is not Hermitian");
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol)
    fail(ErrorCode::InvalidState, "trace is " + std::to_string(tr) + ", expected 1");
  const RealVector w = hermitian_eigenvalues(m);
  if (w.minCoeff() < -tol)
    fail(ErrorCode::InvalidState, "negative eigenvalue " + std::to_string(w.minCoeff()));
  m_ = clamp_psd(m, tol);
}

DensityOperator DensityOperator::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) fail(ErrorCode::InvalidState, "zero state vector");
  const ComplexVector v = psi / norm;
  return trusted(v * v.adjoint());
}

DensityOperator DensityOperator::basis(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) fail(ErrorCode::LengthMismatch, "basis index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return trusted(m);
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index dim) {
  return trusted(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::trusted(const ComplexMatrix& m) {
  DensityOperator out;
  out.m_ = hermitian_part(m);
  return out;
}

double DensityOperator::expectation(const ComplexMatrix& op) const {
  if (op.rows() != m_.rows() || op.cols() != m_.cols())
    fail(ErrorCode::DimMismatch, "observable dimension mismatch");
  return (op * m_).trace().real();
}

struct SuperopCache {
  std::once_flag once;
  ComplexMatrix superop;
};

namespace {

double completeness_of(const std::vector<ComplexMatrix>& ops, Eigen::Index n) {
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& k : ops) sum.noalias() += k.adjoint() * k;
  return max_abs(sum - ComplexMatrix::Identity(n, n));
}

ComplexMatrix sub(const ComplexMatrix& m, const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& cols) {
  ComplexMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i) out(i, j) = m(rows[i], cols[j]);
  return out;
}

}  // namespace

KrausChannel::KrausChannel(std::vector<ComplexMatrix> ops, std::optional<SpaceLayout> layout)
    : ops_(std::move(ops)), layout_(std::move(layout)), cache_(std::make_shared<SuperopCache>()) {
  if (ops_.empty()) fail(ErrorCode::DimMismatch, "channel needs at least one Kraus operator");
  dim_ = ops_.front().rows();
  for (const auto& k : ops_) {
    if (k.rows() != dim_ || k.cols() != dim_)
      fail(ErrorCode::DimMismatch, "Kraus operators must be square and of equal size");
  }
  if (layout_ && static_cast<Eigen::Index>(layout_->total_dim()) != dim_)
    fail(ErrorCode::DimMismatch, "layout dimension differs from Kraus dimension");
  completeness_ = completeness_of(ops_, dim_);
  if (layout_) {
    const auto s = layout_->stable_indices();
    const auto d = layout_->decaying_indices();
    for (const auto& k : ops_) {
      BlockTags t;
      t.s = max_abs(sub(k, s, s)) > 0.0;
      t.sd = max_abs(sub(k, s, d)) > 0.0;
      t.d = max_abs(sub(k, d, d)) > 0.0;
      t.lower_left = max_abs(sub(k, d, s)) > 0.0;
      tags_.push_back(t);
    }
  }
}

const ComplexMatrix& KrausChannel::superoperator() const {
  std::call_once(cache_->once, [this] {
    const Eigen::Index n2 = dim_ * dim_;
    cache_->superop = ComplexMatrix::Zero(n2, n2);
    for (const auto& k : ops_) cache_->superop += kron(k.conjugate(), k);
  });
  return cache_->superop;
}

double CptpReport::max_residual() const {
  double m = completeness;
  for (const auto& v : {s_block, sd_block, d_block, lower_left})
    if (v) m = std::max(m, *v);
  return m;
}

CptpReport check_cptp(const KrausChannel& channel, double tol) {
  CptpReport r;
  r.tolerance = tol;
  r.completeness = channel.completeness_residual();
  if (channel.layout()) {
    const auto s = channel.layout()->stable_indices();
    const auto d = channel.layout()->decaying_indices();
    const auto ns = static_cast<Eigen::Index>(s.size());
    const auto nd = static_cast<Eigen::Index>(d.size());
    ComplexMatrix ss = ComplexMatrix::Zero(ns, ns);
    ComplexMatrix sd = ComplexMatrix::Zero(ns, nd);
    ComplexMatrix dd = ComplexMatrix::Zero(nd, nd);
    double ll = 0.0;
    for (const auto& k : channel.ops()) {
      const ComplexMatrix ks = sub(k, s, s);
      const ComplexMatrix ksd = sub(k, s, d);
      const ComplexMatrix kd = sub(k, d, d);
      ss.noalias() += ks.adjoint() * ks;
      sd.noalias() += ks.adjoint() * ksd;
      dd.noalias() += ksd.adjoint() * ksd + kd.adjoint() * kd;
      ll = std::max(ll, max_abs(sub(k, d, s)));
    }
    r.s_block = max_abs(ss - ComplexMatrix::Identity(ns, ns));
    r.sd_block = max_abs(sd);
    r.d_block = max_abs(dd - ComplexMatrix::Identity(nd, nd));
    r.lower_left = ll;
  }
  r.passes = r.max_residual() < tol;
  return r;
}

namespace {

void require_cptp(const KrausChannel& channel) {
  if (channel.completeness_residual() > kDefaultTolerance)
    fail(ErrorCode::NotCptp, "completeness residual " +
                                 std::to_string(channel.completeness_residual()));
}

bool use_superop(const KrausChannel& channel) { return channel.dim() <= 32; }

}  // namespace

ComplexMatrix apply_channel(const KrausChannel& channel, const ComplexMatrix& x) {
  if (x.rows() != channel.dim() || x.cols() != channel.dim())
    fail(ErrorCode::DimMismatch, "operator and channel dimensions differ");
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const auto& k : channel.ops()) out.noalias() += k * x * k.adjoint();
  return out;
}

DensityOperator apply_channel(const KrausChannel& channel, const DensityOperator& state) {
  if (state.dim() != channel.dim())
    fail(ErrorCode::DimMismatch, "state and channel dimensions differ");
  require_cptp(channel);
  return DensityOperator::trusted(apply_channel(channel, state.matrix()));
}

ComplexMatrix apply_dual(const KrausChannel& channel, const ComplexMatrix& x) {
  if (x.rows() != channel.dim() || x.cols() != channel.dim())
    fail(ErrorCode::DimMismatch, "operator and channel dimensions differ");
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const auto& k : channel.ops()) out.noalias() += k.adjoint() * x * k;
  return out;
}

ComplexMatrix iterate_channel(const KrausChannel& channel, const ComplexMatrix& x, std::size_t r) {
  if (x.rows() != channel.dim() || x.cols() != channel.dim())
    fail(ErrorCode::DimMismatch, "operator and channel dimensions differ");
  if (use_superop(channel)) {
    const ComplexMatrix& s = channel.superoperator();
    ComplexVector v = vec(x);
    for (std::size_t i = 0; i < r; ++i) v = s * v;
    return unvec(v, x.rows());
  }
  ComplexMatrix cur = x;
  for (std::size_t i = 0; i < r; ++i) cur = apply_channel(channel, cur);
  return cur;
}

FixedPointResult iterate_to_fixed_point(const KrausChannel& channel, const DensityOperator& state,
                                        std::size_t max_iters, double tol) {
  if (state.dim() != channel.dim())
    fail(ErrorCode::DimMismatch, "state and channel dimensions differ");
  require_cptp(channel);
  const Eigen::Index n = channel.dim();
  const bool fast = use_superop(channel);
  ComplexMatrix cur = state.matrix();
  double step = 0.0;
  for (std::size_t r = 0; r < max_iters; ++r) {
    ComplexMatrix next =
        fast ? unvec(channel.superoperator() * vec(cur), n) : apply_channel(channel, cur);
    next = hermitian_part(next);
    step = trace_distance(cur, next);
    if (step < tol) return {DensityOperator::trusted(cur), r, true, step};
    cur = std::move(next);
  }
  return {DensityOperator::trusted(cur), max_iters, false, step};
}

FixedPointCheck check_fixed_point(const KrausChannel& channel, const DensityOperator& state,
                                  double tol) {
  if (state.dim() != channel.dim())
    fail(ErrorCode::DimMismatch, "state and channel dimensions differ");
  const double residual = trace_distance(apply_channel(channel, state.matrix()), state.matrix());
  return {residual < tol, residual};
}

ChoiMatrix choi_of(const KrausChannel& channel) {
  const Eigen::Index n = channel.dim();
  ComplexMatrix j = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& k : channel.ops()) {
    const ComplexVector v = vec(k);
    j.noalias() += v * v.adjoint();
  }
  return {j, n};
}

ComplexMatrix apply_choi(const ChoiMatrix& choi, const ComplexMatrix& x) {
  const Eigen::Index n = choi.dim;
  if (x.rows() != n || x.cols() != n) fail(ErrorCode::DimMismatch, "operator and Choi dims differ");
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex xjl = x(j, l);
      if (xjl == Complex(0.0, 0.0)) continue;
      out += xjl * choi.matrix.block(j * n, l * n, n, n);
    }
  return out;
}

KrausChannel channel_from_choi(const ChoiMatrix& choi, double tol) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(choi.matrix));
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
    const double w = es.eigenvalues()(k);
    if (w <= tol) continue;
    ops.push_back(std::sqrt(w) * unvec(es.eigenvectors().col(k), choi.dim));
  }
  if (ops.empty()) ops.push_back(ComplexMatrix::Zero(choi.dim, choi.dim));
  return KrausChannel(std::move(ops));
}

ComplexMatrix choi_input_marginal(const ChoiMatrix& choi) {
  const Eigen::Index n = choi.dim;
  ComplexMatrix out(n, n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index j = 0; j < n; ++j) out(j, l) = choi.matrix.block(j * n, l * n, n, n).trace();
  return out;
}

void validate_povm(const Povm& povm, double tol) {
  if (povm.effects.empty()) fail(ErrorCode::InvalidPovm, "POVM has no effects");
  const Eigen::Index n = povm.effects.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < povm.effects.size(); ++k) {
    const auto& e = povm.effects[k];
    if (e.rows() != n || e.cols() != n) fail(ErrorCode::InvalidPovm, "effect dimensions differ");
    if (hermiticity_residual(e) > tol)
      fail(ErrorCode::InvalidPovm, "effect " + std::to_string(k) + " is not Hermitian");
    if (hermitian_eigenvalues(e).minCoeff() < -tol)
      fail(ErrorCode::InvalidPovm, "effect " + std::to_string(k) + " is not positive");
    sum += e;
  }
  if (max_abs(sum - ComplexMatrix::Identity(n, n)) > tol)
    fail(ErrorCode::InvalidPovm, "effects do not sum to the identity");
}

std::vector<double> outcome_probabilities(const Povm& povm, const DensityOperator& state) {
  std::vector<double> p;
  for (const auto& e : povm.effects) {
    if (e.rows() != state.dim()) fail(ErrorCode::DimMismatch, "effect and state dims differ");
    double v = (e * state.matrix()).trace().real();
    if (v < -1e-9) fail(ErrorCode::InvalidPovm, "negative outcome probability");
    p.push_back(std::max(v, 0.0));
  }
  return p;
}

MeasurementResult measure(const Povm& povm, const DensityOperator& state, Rng& rng) {
  MeasurementResult r{0, outcome_probabilities(povm, state)};
  double total = 0.0;
  for (double v : r.probabilities) total += v;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  r.outcome = r.probabilities.size() - 1;
  for (std::size_t k = 0; k < r.probabilities.size(); ++k) {
    acc += r.probabilities[k];
    if (u < acc) {
      r.outcome = k;
      break;
    }
  }
  return r;
}

MeasurementResult measure(const Povm& povm, const DensityOperator& state, std::uint64_t seed) {
  Rng rng(seed);
  return measure(povm, state, rng);
}

Povm square_root_measurement(const std::vector<ComplexVector>& states) {
  if (states.empty()) fail(ErrorCode::SingularFrame, "no states given");
  const Eigen::Index n = states.front().size();
  ComplexMatrix phi = ComplexMatrix::Zero(n, n);
  for (const auto& s : states) {
    if (s.size() != n) fail(ErrorCode::DimMismatch, "states have different dimensions");
    if (s.norm() == 0.0) fail(ErrorCode::SingularFrame, "zero vector in frame");
    phi.noalias() += s * s.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(phi));
  const RealVector w = es.eigenvalues();
  const double top = w.maxCoeff();
  RealVector inv_sqrt = RealVector::Zero(n);
  RealVector comp = RealVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (w(k) > 1e-10 * top) {
      inv_sqrt(k) = 1.0 / std::sqrt(w(k));
    } else if (w(k) > 1e-14 * top) {
      fail(ErrorCode::SingularFrame, "frame operator is ill-conditioned on its span");
    } else {
      comp(k) = 1.0;
    }
  }
  const ComplexMatrix& v = es.eigenvectors();
  const ComplexMatrix root = v * inv_sqrt.cast<Complex>().asDiagonal() * v.adjoint();
  Povm povm;
  for (const auto& s : states) {
    const ComplexVector e = root * s;
    povm.effects.push_back(e * e.adjoint());
  }
  if (comp.sum() > 0.0) povm.effects.push_back(v * comp.cast<Complex>().asDiagonal() * v.adjoint());
  validate_povm(povm, 1e-8);
  return povm;
}

std::vector<double> success_probabilities(const Povm& povm,
                                          const std::vector<ComplexVector>& states) {
  std::vector<double> out;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const ComplexVector psi = states[k] / states[k].norm();
    out.push_back((psi.adjoint() * povm.effects.at(k) * psi)(0, 0).real());
  }
  return out;
}

UnambiguousPovm unambiguous_povm(const std::vector<ComplexVector>& states, double tol) {
  if (states.empty()) fail(ErrorCode::InvalidPovm, "no states given");
  const Eigen::Index n = states.front().size();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  std::vector<ComplexMatrix> proj;
  for (const auto& s : states) {
    const ComplexVector u = s / s.norm();
    proj.push_back(u * u.adjoint());
    sum += proj.back();
  }
  const double top = hermitian_eigenvalues(sum).maxCoeff();
  const double scale = top > 1.0 + tol ? 1.0 / top : 1.0;
  UnambiguousPovm out{{}, scale};
  for (auto& p : proj) out.povm.effects.push_back(scale * p);
  out.povm.effects.push_back(ComplexMatrix::Identity(n, n) - scale * sum);
  validate_povm(out.povm, std::max(tol, 1e-8));
  return out;
}

}  // namespace qam
