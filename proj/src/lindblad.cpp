#include "qam/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qam/errors.hpp"
#include "qam/linalg.hpp"

namespace qam {

struct LiouvillianCache {
  std::once_flag superop_once;
  ComplexMatrix superop;
  std::once_flag components_once;
  std::vector<std::vector<Eigen::Index>> components;
};

Liouvillian::Liouvillian(ComplexMatrix hamiltonian, std::vector<JumpOperator> jumps)
    : h_(std::move(hamiltonian)), jumps_(std::move(jumps)),
      cache_(std::make_shared<LiouvillianCache>()) {}

Liouvillian build_liouvillian(const ComplexMatrix& hamiltonian, std::vector<JumpOperator> jumps,
                              double tol) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0)
    fail(ErrorCode::DimMismatch, "Hamiltonian must be a non-empty square matrix");
  if (hermiticity_residual(hamiltonian) > tol)
    fail(ErrorCode::NonHermitianH, "Hamiltonian is not Hermitian");
  for (const auto& j : jumps) {
    if (j.op.rows() != hamiltonian.rows() || j.op.cols() != hamiltonian.cols())
      fail(ErrorCode::DimMismatch, "jump operator dimension differs from the Hamiltonian");
    if (!(j.rate >= 0.0)) fail(ErrorCode::RateOutOfRange, "jump rates must be non-negative");
  }
  return Liouvillian(hermitian_part(hamiltonian), std::move(jumps));
}

ComplexMatrix Liouvillian::apply(const ComplexMatrix& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim())
    fail(ErrorCode::DimMismatch, "state dimension differs from the generator");
  ComplexMatrix out = -kI * (h_ * rho - rho * h_);
  for (const auto& j : jumps_) {
    const ComplexMatrix fdf = j.op.adjoint() * j.op;
    out += j.rate * (j.op * rho * j.op.adjoint() - 0.5 * (fdf * rho + rho * fdf));
  }
  return out;
}

ComplexMatrix Liouvillian::effective_hamiltonian() const {
  ComplexMatrix h = h_;
  for (const auto& j : jumps_) h -= 0.5 * kI * j.rate * (j.op.adjoint() * j.op);
  return h;
}

const ComplexMatrix& Liouvillian::superoperator() const {
  std::call_once(cache_->superop_once, [this] {
    const Eigen::Index n = dim();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    ComplexMatrix s = -kI * (kron(id, h_) - kron(h_.transpose(), id));
    for (const auto& j : jumps_) {
      const ComplexMatrix fdf = j.op.adjoint() * j.op;
      s += j.rate * (kron(j.op.conjugate(), j.op) - 0.5 * kron(id, fdf) -
                     0.5 * kron(fdf.transpose(), id));
    }
    cache_->superop = std::move(s);
  });
  return cache_->superop;
}

const std::vector<std::vector<Eigen::Index>>& Liouvillian::components() const {
  std::call_once(cache_->components_once,
                 [this] { cache_->components = connected_components(superoperator()); });
  return cache_->components;
}

namespace {

ComplexMatrix sub_block(const ComplexMatrix& m, const std::vector<Eigen::Index>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  ComplexMatrix out(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < k; ++i) out(i, j) = m(idx[i], idx[j]);
  return out;
}

}  // namespace

Propagator::Propagator(const Liouvillian& liouvillian, double t)
    : t_(t), dim_(liouvillian.dim()), components_(liouvillian.components()) {
  if (t < 0.0) fail(ErrorCode::DimMismatch, "evolution time must be non-negative");
  const ComplexMatrix& s = liouvillian.superoperator();
  for (const auto& c : components_) blocks_.push_back(expm(t * sub_block(s, c)));
}

ComplexMatrix Propagator::apply(const ComplexMatrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_)
    fail(ErrorCode::DimMismatch, "state dimension differs from the generator");
  const ComplexVector v = vec(rho);
  ComplexVector out(v.size());
  for (std::size_t b = 0; b < components_.size(); ++b) {
    const auto& idx = components_[b];
    ComplexVector part(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) part(i) = v(idx[i]);
    const ComplexVector res = blocks_[b] * part;
    for (std::size_t i = 0; i < idx.size(); ++i) out(idx[i]) = res(i);
  }
  return hermitian_part(unvec(out, dim_));
}

DensityOperator evolve(const Liouvillian& liouvillian, const DensityOperator& rho0, double t) {
  if (rho0.dim() != liouvillian.dim())
    fail(ErrorCode::DimMismatch, "state dimension differs from the generator");
  if (t == 0.0) return rho0;
  return DensityOperator::trusted(Propagator(liouvillian, t).apply(rho0.matrix()));
}

std::vector<DensityOperator> evolve_grid(const Liouvillian& liouvillian,
                                         const DensityOperator& rho0,
                                         const std::vector<double>& times) {
  if (rho0.dim() != liouvillian.dim())
    fail(ErrorCode::DimMismatch, "state dimension differs from the generator");
  std::vector<DensityOperator> out;
  std::vector<std::pair<double, std::unique_ptr<Propagator>>> cache;
  ComplexMatrix cur = rho0.matrix();
  double t_cur = 0.0;
  for (double t : times) {
    if (t < t_cur) fail(ErrorCode::DimMismatch, "time grid must be ascending and non-negative");
    const double step = t - t_cur;
    if (step > 0.0) {
      const Propagator* prop = nullptr;
      for (const auto& [dt, p] : cache)
        if (std::abs(dt - step) <= 1e-12 * std::max(1.0, step)) prop = p.get();
      if (!prop) {
        cache.emplace_back(step, std::make_unique<Propagator>(liouvillian, step));
        prop = cache.back().second.get();
      }
      cur = prop->apply(cur);
    }
    t_cur = t;
    out.push_back(DensityOperator::trusted(cur));
  }
  return out;
}

Spectrum spectrum_of(const Liouvillian& liouvillian, std::size_t k) {
  const ComplexMatrix& s = liouvillian.superoperator();
  const Eigen::Index n = liouvillian.dim();
  struct Mode {
    Complex value;
    std::size_t block;
    Eigen::Index local;
  };
  std::vector<Mode> modes;
  std::vector<ComplexMatrix> rights;
  std::vector<ComplexMatrix> inverses;
  const auto& comps = liouvillian.components();
  for (std::size_t b = 0; b < comps.size(); ++b) {
    GeneralEigen eg = eig_general(sub_block(s, comps[b]));
    Eigen::FullPivLU<ComplexMatrix> lu(eg.right);
    if (!lu.isInvertible())
      fail(ErrorCode::EigensolverFailure, "eigenvector matrix of block " + std::to_string(b) +
                                              " is singular (defective generator)");
    inverses.push_back(lu.inverse());
    for (Eigen::Index i = 0; i < eg.values.size(); ++i) modes.push_back({eg.values(i), b, i});
    rights.push_back(std::move(eg.right));
  }
  std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    const double ra = -a.value.real();
    const double rb = -b.value.real();
    if (ra != rb) return ra < rb;
    return a.value.imag() < b.value.imag();
  });

  Spectrum out;
  out.total_modes = modes.size();
  k = std::min(k, modes.size());
  for (std::size_t m = 0; m < k; ++m) {
    const Mode& md = modes[m];
    const auto& idx = comps[md.block];
    ComplexVector r = ComplexVector::Zero(n * n);
    ComplexVector l = ComplexVector::Zero(n * n);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      r(idx[i]) = rights[md.block](static_cast<Eigen::Index>(i), md.local);
      l(idx[i]) = std::conj(inverses[md.block](md.local, static_cast<Eigen::Index>(i)));
    }
    ComplexMatrix rm = unvec(r, n);
    ComplexMatrix lm = unvec(l, n);
    const Complex tr = rm.trace();
    Complex scale;
    if (std::abs(tr) > 1e-6 * rm.norm()) {
      scale = 1.0 / tr;
    } else {
      Eigen::Index bi = 0;
      r.cwiseAbs().maxCoeff(&bi);
      scale = std::conj(r(bi)) / std::abs(r(bi)) / rm.norm();
    }
    rm *= scale;
    lm /= std::conj(scale);
    out.eigenvalues.push_back(md.value);
    out.right.push_back(std::move(rm));
    out.left.push_back(std::move(lm));
  }
  double resid = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const Complex g = (out.left[a].adjoint() * out.right[b]).trace();
      resid = std::max(resid, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  out.biorthogonality_residual = resid;
  return out;
}

ComplexMatrix spectral_evolve(const Spectrum& spectrum, const ComplexMatrix& rho0, double t) {
  ComplexMatrix out = ComplexMatrix::Zero(rho0.rows(), rho0.cols());
  for (std::size_t k = 0; k < spectrum.eigenvalues.size(); ++k) {
    const Complex c = (spectrum.left[k].adjoint() * rho0).trace();
    out += c * std::exp(spectrum.eigenvalues[k] * t) * spectrum.right[k];
  }
  return out;
}

SymmetryReport check_strong_symmetry(const Liouvillian& liouvillian, const ComplexMatrix& j,
                                     double tol, std::uint64_t seed) {
  if (j.rows() != liouvillian.dim() || j.cols() != liouvillian.dim())
    fail(ErrorCode::DimMismatch, "symmetry operator dimension differs from the generator");
  SymmetryReport r;
  r.hamiltonian_commutator = commutator(j, liouvillian.hamiltonian()).norm();
  bool strong = r.hamiltonian_commutator < tol;
  for (const auto& f : liouvillian.jumps()) {
    r.jump_commutators.push_back(commutator(j, f.op).norm());
    strong = strong && r.jump_commutators.back() < tol;
  }
  Rng rng(seed);
  for (int s = 0; s < 8; ++s) {
    const ComplexMatrix rho = random_density(liouvillian.dim(), rng);
    const double rate = std::abs((j * liouvillian.apply(rho)).trace());
    r.conservation_residual = std::max(r.conservation_residual, rate);
  }
  r.strong = strong;
  return r;
}

ConservedReport check_conserved_projector(const KrausChannel& channel, const ComplexMatrix& j,
                                          double tol) {
  if (j.rows() != channel.dim() || j.cols() != channel.dim())
    fail(ErrorCode::DimMismatch, "projector dimension differs from the channel");
  if (hermiticity_residual(j) > 1e-9 || max_abs(j * j - j) > 1e-9)
    fail(ErrorCode::NotAProjector, "operator is not a Hermitian idempotent");
  ConservedReport r;
  for (const auto& k : channel.ops())
    r.max_commutator = std::max(r.max_commutator, commutator(j, k).norm());
  r.dual_residual = (apply_dual(channel, j) - j).norm();
  const bool a = r.max_commutator < tol;
  const bool b = r.dual_residual < tol;
  r.conserved = a && b;
  r.consistent = a == b;
  return r;
}

}  // namespace qam
