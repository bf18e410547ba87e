#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qam/errors.hpp"
#include "qam/lindblad.hpp"
#include "qam/linalg.hpp"

namespace qam {

namespace {

constexpr double kZeroRate = 1e-10;

// Distance from x to the affine hull of the given points.
double hull_distance(const RealMatrix& pts, const std::vector<std::size_t>& hull, Eigen::Index x) {
  const RealVector base = pts.col(static_cast<Eigen::Index>(hull.front()));
  RealVector d = pts.col(x) - base;
  if (hull.size() == 1) return d.norm();
  RealMatrix a(pts.rows(), static_cast<Eigen::Index>(hull.size() - 1));
  for (std::size_t j = 1; j < hull.size(); ++j)
    a.col(static_cast<Eigen::Index>(j - 1)) = pts.col(static_cast<Eigen::Index>(hull[j])) - base;
  const RealVector w = a.colPivHouseholderQr().solve(d);
  return (d - a * w).norm();
}

std::size_t farthest(const RealMatrix& pts, const std::vector<std::size_t>& hull,
                     const std::vector<std::size_t>& exclude) {
  double best = -1.0;
  std::size_t arg = 0;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    if (std::find(exclude.begin(), exclude.end(), static_cast<std::size_t>(i)) != exclude.end())
      continue;
    const double d = hull_distance(pts, hull, i);
    if (d > best + 1e-14) {
      best = d;
      arg = static_cast<std::size_t>(i);
    }
  }
  return arg;
}

std::vector<std::size_t> simplex_vertices(const RealMatrix& pts, std::size_t n) {
  const RealVector mean = pts.rowwise().mean();
  std::size_t v0 = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    const double d = (pts.col(i) - mean).norm();
    if (d > best + 1e-14) {
      best = d;
      v0 = static_cast<std::size_t>(i);
    }
  }
  std::vector<std::size_t> verts{v0};
  while (verts.size() < n) verts.push_back(farthest(pts, verts, verts));
  for (int pass = 0; pass < 10; ++pass) {
    bool changed = false;
    for (std::size_t j = 0; j < verts.size() && verts.size() > 1; ++j) {
      std::vector<std::size_t> others;
      for (std::size_t k = 0; k < verts.size(); ++k)
        if (k != j) others.push_back(verts[k]);
      const std::size_t cand = farthest(pts, others, others);
      if (hull_distance(pts, others, static_cast<Eigen::Index>(cand)) >
          hull_distance(pts, others, static_cast<Eigen::Index>(verts[j])) * (1.0 + 1e-12)) {
        verts[j] = cand;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::sort(verts.begin(), verts.end());
  return verts;
}

ComplexMatrix to_density(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  RealVector w = es.eigenvalues().cwiseMax(0.0);
  const double s = w.sum();
  if (s <= 0.0) fail(ErrorCode::EigensolverFailure, "metastable phase has no positive part");
  w /= s;
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

std::size_t metastable_mode_count(const std::vector<Complex>& eigenvalues, double threshold) {
  for (std::size_t n = eigenvalues.size() - (eigenvalues.empty() ? 0 : 1); n >= 2; --n) {
    const double rn = -eigenvalues[n - 1].real();
    const double rnext = -eigenvalues[n].real();
    if (rn > kZeroRate && rnext / rn > threshold) return n;
  }
  fail(ErrorCode::NoGapFound, "no spectral gap above ratio " + std::to_string(threshold));
}

MetastableManifold detect_metastable_manifold(const Spectrum& spectrum, double threshold,
                                              const std::vector<ComplexMatrix>& probes) {
  const std::size_t n = metastable_mode_count(spectrum.eigenvalues, threshold);
  if (probes.size() < n) fail(ErrorCode::NoGapFound, "fewer probe states than metastable modes");
  MetastableManifold mm;
  mm.n = n;
  const double rn = -spectrum.eigenvalues[n - 1].real();
  const double rnext = -spectrum.eigenvalues[n].real();
  mm.gap_ratio = rnext / rn;
  mm.tau_s = 1.0 / rnext;
  mm.tau_f = 1.0 / rn;

  const auto np = static_cast<Eigen::Index>(probes.size());
  ComplexMatrix coords(static_cast<Eigen::Index>(n), np);
  for (Eigen::Index p = 0; p < np; ++p)
    for (std::size_t k = 0; k < n; ++k)
      coords(static_cast<Eigen::Index>(k), p) = (spectrum.left[k].adjoint() * probes[p]).trace();
  RealMatrix pts(2 * static_cast<Eigen::Index>(n), np);
  pts.topRows(static_cast<Eigen::Index>(n)) = coords.real();
  pts.bottomRows(static_cast<Eigen::Index>(n)) = coords.imag();

  const auto verts = simplex_vertices(pts, n);
  RealMatrix a(pts.rows(), static_cast<Eigen::Index>(n - 1));
  for (std::size_t j = 1; j < n; ++j)
    a.col(static_cast<Eigen::Index>(j - 1)) =
        pts.col(static_cast<Eigen::Index>(verts[j])) - pts.col(static_cast<Eigen::Index>(verts[0]));
  const auto qr = a.colPivHouseholderQr();

  const Eigen::Index dim = spectrum.right.front().rows();
  std::vector<ComplexMatrix> sums(n, ComplexMatrix::Zero(dim, dim));
  mm.cluster_sizes.assign(n, 0);
  for (Eigen::Index p = 0; p < np; ++p) {
    RealVector w(static_cast<Eigen::Index>(n));
    const RealVector tail = qr.solve(RealVector(pts.col(p) - pts.col(static_cast<Eigen::Index>(verts[0]))));
    w(0) = 1.0 - tail.sum();
    w.tail(static_cast<Eigen::Index>(n - 1)) = tail;
    Eigen::Index mu = 0;
    if (w.maxCoeff(&mu) < 0.9) continue;
    ComplexMatrix proj = ComplexMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < n; ++k) proj += coords(static_cast<Eigen::Index>(k), p) * spectrum.right[k];
    sums[mu] += proj;
    ++mm.cluster_sizes[mu];
  }
  for (std::size_t mu = 0; mu < n; ++mu) {
    const ComplexMatrix mean = sums[mu] / static_cast<double>(std::max<std::size_t>(1, mm.cluster_sizes[mu]));
    mm.phases.push_back(DensityOperator::trusted(to_density(mean)));
  }

  ComplexMatrix c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t nu = 0; nu < n; ++nu)
    for (std::size_t k = 0; k < n; ++k)
      c(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(k)) =
          (spectrum.left[k].adjoint() * mm.phases[nu].matrix()).trace();
  Eigen::FullPivLU<ComplexMatrix> lu(c.transpose());
  if (!lu.isInvertible()) fail(ErrorCode::EigensolverFailure, "metastable phases are degenerate");
  const ComplexMatrix x = lu.inverse();
  ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
  for (std::size_t mu = 0; mu < n; ++mu) {
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < n; ++k)
      p += x(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(k)) * spectrum.left[k].adjoint();
    p = hermitian_part(p);
    total += p;
    mm.basin_observables.push_back(std::move(p));
  }
  mm.completeness_residual = max_abs(total - ComplexMatrix::Identity(dim, dim));
  mm.overlaps.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = 0; nu < n; ++nu)
      mm.overlaps(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(nu)) =
          mm.phases[nu].expectation(mm.basin_observables[mu]);
  return mm;
}

MetastableManifold detect_metastable_manifold(const Spectrum& spectrum, double threshold) {
  if (spectrum.right.empty()) fail(ErrorCode::NoGapFound, "empty spectrum");
  const Eigen::Index dim = spectrum.right.front().rows();
  std::vector<ComplexMatrix> probes;
  for (Eigen::Index i = 0; i < dim; ++i) {
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    p(i, i) = 1.0;
    probes.push_back(std::move(p));
  }
  return detect_metastable_manifold(spectrum, threshold, probes);
}

std::optional<std::size_t> classify_basin(const MetastableManifold& manifold,
                                          const ComplexMatrix& rho) {
  for (std::size_t mu = 0; mu < manifold.basin_observables.size(); ++mu) {
    if ((manifold.basin_observables[mu] * rho).trace().real() >= 0.5) return mu;
  }
  return std::nullopt;
}

}  // namespace qam
