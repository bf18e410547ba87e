#include "doctest.h"

#include <cmath>

#include "qam/linalg.hpp"
#include "qam/rng.hpp"

using namespace qam;

TEST_CASE("expm against closed forms") {
  SUBCASE("nilpotent") {
    ComplexMatrix n = ComplexMatrix::Zero(2, 2);
    n(0, 1) = 1.0;
    ComplexMatrix expected = ComplexMatrix::Identity(2, 2);
    expected(0, 1) = 1.0;
    CHECK(max_abs(expm(n) - expected) < 1e-15);
  }
  SUBCASE("sigma_y rotation") {
    ComplexMatrix sy(2, 2);
    sy << 0.0, -kI, kI, 0.0;
    const double phi = 0.731;
    ComplexMatrix expected(2, 2);
    expected << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    CHECK(max_abs(expm(-kI * phi * sy) - expected) < 1e-14);
  }
  SUBCASE("large norm Hermitian generator vs eigendecomposition") {
    Rng rng(3);
    ComplexMatrix a(6, 6);
    for (Eigen::Index i = 0; i < 6; ++i)
      for (Eigen::Index j = 0; j < 6; ++j) a(i, j) = 5.0 * rng.complex_normal();
    const ComplexMatrix h = hermitian_part(a);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    const ComplexVector phases = (-kI * es.eigenvalues().cast<Complex>()).array().exp();
    const ComplexMatrix expected = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    CHECK(max_abs(expm(-kI * h) - expected) < 1e-11);
  }
}

TEST_CASE("column-stacking vectorization") {
  Rng rng(5);
  const ComplexMatrix a = random_unitary(3, rng);
  const ComplexMatrix b = random_unitary(3, rng);
  const ComplexMatrix x = random_density(3, rng);
  CHECK((unvec(vec(x), 3) - x).norm() == 0.0);
  CHECK((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).norm() < 1e-13);
}

TEST_CASE("trace distance") {
  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  CHECK(trace_distance(p0, p1) == doctest::Approx(1.0));
  CHECK(trace_distance(p0, 0.5 * (p0 + p1)) == doctest::Approx(0.5));
}

TEST_CASE("general eigensolver") {
  ComplexMatrix a(2, 2);
  a << 1.0, 2.0, 0.0, 3.0;
  const GeneralEigen e = eig_general(a);
  for (Eigen::Index k = 0; k < 2; ++k)
    CHECK((a * e.right.col(k) - e.values(k) * e.right.col(k)).norm() < 1e-13);
}

TEST_CASE("connected components of a block-diagonal pattern") {
  ComplexMatrix a = ComplexMatrix::Zero(4, 4);
  a(0, 2) = 1.0;
  a(3, 1) = 2.0;
  const auto comps = connected_components(a);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == std::vector<Eigen::Index>{0, 2});
  CHECK(comps[1] == std::vector<Eigen::Index>{1, 3});
}

TEST_CASE("seeded generator is reproducible") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}
