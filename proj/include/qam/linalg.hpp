#pragma once

#include <cstddef>
#include <vector>

#include "qam/rng.hpp"
#include "qam/types.hpp"

namespace qam {

// exp(A) by scaling and squaring with a degree-13 Pade approximant.
ComplexMatrix expm(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix hermitian_part(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);
double hermiticity_residual(const ComplexMatrix& a);

RealVector hermitian_eigenvalues(const ComplexMatrix& a);

// Trace norm of a Hermitian matrix (sum of |eigenvalues|).
double hermitian_trace_norm(const ComplexMatrix& a);
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

// Largest singular value.
double operator_norm(const ComplexMatrix& a);

// Hermitian PSD input; eigenvalues in (-tol, 0) are set to zero.
ComplexMatrix clamp_psd(const ComplexMatrix& a, double tol);

// vec(X) with column stacking, and its inverse.
ComplexVector vec(const ComplexMatrix& x);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index dim);

struct GeneralEigen {
  ComplexVector values;
  ComplexMatrix right;  // columns are right eigenvectors
};

// Dense complex eigensolver (LAPACK zgeev).
GeneralEigen eig_general(const ComplexMatrix& a);

// Connected components of the sparsity graph of a square matrix.
std::vector<std::vector<Eigen::Index>> connected_components(const ComplexMatrix& a);

ComplexMatrix random_unitary(Eigen::Index dim, Rng& rng);
ComplexVector random_pure_state(Eigen::Index dim, Rng& rng);
ComplexMatrix random_density(Eigen::Index dim, Rng& rng);

}  // namespace qam
