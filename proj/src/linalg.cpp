#include "qam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <lapacke.h>

#include "qam/errors.hpp"

namespace qam {

ComplexMatrix expm(const ComplexMatrix& a) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  static constexpr double theta13 = 5.371920351148152;

  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const ComplexMatrix x = a / std::ldexp(1.0, s);

  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const ComplexMatrix x2 = x * x;
  const ComplexMatrix x4 = x2 * x2;
  const ComplexMatrix x6 = x4 * x2;
  ComplexMatrix inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
  ComplexMatrix u = x6 * inner;
  u += b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id;
  u = x * u;
  inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
  ComplexMatrix v = x6 * inner;
  v += b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

  ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double hermiticity_residual(const ComplexMatrix& a) { return max_abs(a - a.adjoint()); }

RealVector hermitian_eigenvalues(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double hermitian_trace_norm(const ComplexMatrix& a) {
  return hermitian_eigenvalues(a).cwiseAbs().sum();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return 0.5 * hermitian_trace_norm(a - b);
}

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

ComplexMatrix clamp_psd(const ComplexMatrix& a, double tol) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a));
  RealVector w = es.eigenvalues();
  bool changed = false;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < 0.0 && w(i) > -tol) {
      w(i) = 0.0;
      changed = true;
    }
  }
  if (!changed) return hermitian_part(a);
  return es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

ComplexVector vec(const ComplexMatrix& x) {
  return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim) {
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

GeneralEigen eig_general(const ComplexMatrix& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  GeneralEigen out;
  out.values.resize(n);
  out.right.resize(n, n);
  if (n == 0) return out;
  ComplexMatrix work = a;
  ComplexMatrix unused(1, 1);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'V', n, reinterpret_cast<lapack_complex_double*>(work.data()), n,
      reinterpret_cast<lapack_complex_double*>(out.values.data()),
      reinterpret_cast<lapack_complex_double*>(unused.data()), 1,
      reinterpret_cast<lapack_complex_double*>(out.right.data()), n);
  if (info != 0) fail(ErrorCode::EigensolverFailure, "zgeev returned " + std::to_string(info));
  return out;
}

std::vector<std::vector<Eigen::Index>> connected_components(const ComplexMatrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && a(i, j) != Complex(0.0, 0.0)) {
        const Eigen::Index ri = find(i);
        const Eigen::Index rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(groups.size());
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

ComplexMatrix random_unitary(Eigen::Index dim, Rng& rng) {
  ComplexMatrix z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) z(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

ComplexVector random_pure_state(Eigen::Index dim, Rng& rng) {
  ComplexVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

ComplexMatrix random_density(Eigen::Index dim, Rng& rng) {
  ComplexMatrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = rng.complex_normal();
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

}  // namespace qam
