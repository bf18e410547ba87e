#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qam/errors.hpp"
#include "qam/linalg.hpp"
#include "qam/models.hpp"
#include "qam/qam_builder.hpp"
#include "qam/quantum_core.hpp"

using namespace qam;

namespace {

ComplexVector ket(Eigen::Index dim, Eigen::Index i) {
  ComplexVector v = ComplexVector::Zero(dim);
  v(i) = 1.0;
  return v;
}

std::vector<ComplexVector> qubit_gus(std::size_t m) {
  std::vector<ComplexVector> out;
  ComplexVector psi(2);
  psi << std::cos(0.3), std::sin(0.3);
  const ComplexMatrix u = gus_rotation(m);
  for (std::size_t l = 0; l < m; ++l) {
    out.push_back(psi);
    psi = u * psi;
  }
  return out;
}

}  // namespace

TEST_CASE("density operator validation") {
  ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
  try {
    DensityOperator d(bad);
    FAIL("trace 2 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidState);
  }
  ComplexMatrix slightly_negative = ComplexMatrix::Zero(2, 2);
  slightly_negative(0, 0) = 1.0 + 1e-12;
  slightly_negative(1, 1) = -1e-12;
  const DensityOperator clamped(slightly_negative);
  CHECK(hermitian_eigenvalues(clamped.matrix()).minCoeff() >= 0.0);
}

TEST_CASE("apply_channel") {
  SUBCASE("identity channel") {
    Rng rng(1);
    const ComplexMatrix rho = random_density(3, rng);
    const KrausChannel id({ComplexMatrix::Identity(3, 3)});
    CHECK(max_abs(apply_channel(id, DensityOperator(rho)).matrix() - rho) < 1e-15);
  }
  SUBCASE("local amplitude damping with q = 1 transfers in one step") {
    const auto ad = local_amplitude_damping({1.0, 1.0}, {0.2, 1.1});
    const auto w0 = ad.layout.global_index(ad.layout.decaying_blocks_of({BlockKind::Stable, 0, 0}).front(), 0);
    const DensityOperator out =
        apply_channel(ad.channel, DensityOperator::basis(4, static_cast<Eigen::Index>(w0)));
    CHECK(max_abs(out.matrix() - DensityOperator::basis(4, 0).matrix()) < 1e-15);
  }
  SUBCASE("local amplitude damping population recurrence") {
    const auto ad = local_amplitude_damping({0.5, 0.5}, {0.2, 1.1});
    ComplexMatrix rho = DensityOperator::basis(4, 2).matrix();
    for (int r = 1; r <= 40; ++r) {
      rho = apply_channel(ad.channel, rho);
      CHECK(std::abs(rho(2, 2).real() - std::pow(0.5, r)) < 1e-14);
      CHECK(std::abs(rho(0, 0).real() - (1.0 - std::pow(0.5, r))) < 1e-14);
    }
  }
  SUBCASE("trace, Hermiticity and contractivity") {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<ComplexMatrix> ops;
      const ComplexMatrix u = random_unitary(12, rng);
      for (int k = 0; k < 3; ++k) ops.push_back(u.block(4 * k, 0, 4, 4));
      const KrausChannel ch(ops);
      const ComplexMatrix a = random_density(4, rng);
      const ComplexMatrix b = random_density(4, rng);
      const ComplexMatrix fa = apply_channel(ch, a);
      const ComplexMatrix fb = apply_channel(ch, b);
      CHECK(std::abs(fa.trace() - 1.0) < 1e-12);
      CHECK(hermiticity_residual(fa) < 1e-12);
      CHECK(trace_distance(fa, fb) <= trace_distance(a, b) + 1e-12);
    }
  }
  SUBCASE("non-CPTP channel is rejected") {
    const KrausChannel scaled({0.9 * ComplexMatrix::Identity(2, 2)});
    try {
      apply_channel(scaled, DensityOperator::basis(2, 0));
      FAIL("expected NotCptp");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotCptp);
    }
  }
}

TEST_CASE("iterate_to_fixed_point") {
  const auto ad = local_amplitude_damping({0.5, 0.5}, {0.2, 1.1});
  SUBCASE("pattern is already fixed") {
    const auto r = iterate_to_fixed_point(ad.channel, DensityOperator::basis(4, 0), 100, 1e-10);
    CHECK(r.iterations == 0);
    CHECK(r.converged);
  }
  SUBCASE("decaying state converges after 33 applications") {
    // 0.5^(r+1) < 1e-10 first holds at r = 33.
    const auto r = iterate_to_fixed_point(ad.channel, DensityOperator::basis(4, 2), 1000, 1e-10);
    CHECK(r.converged);
    CHECK(r.iterations == 33);
    CHECK(trace_distance(r.state.matrix(), DensityOperator::basis(4, 0).matrix()) < 1e-9);
  }
  SUBCASE("mixture across basins converges to the pattern mixture") {
    ComplexMatrix sigma = ComplexMatrix::Zero(4, 4);
    sigma(2, 2) = 0.5;
    sigma(3, 3) = 0.5;
    const auto r = iterate_to_fixed_point(ad.channel, DensityOperator(sigma), 1000, 1e-12);
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(0, 0) = expected(1, 1) = 0.5;
    CHECK(trace_distance(r.state.matrix(), expected) < 1e-10);
  }
  SUBCASE("unitary channel is flagged as not converged") {
    ComplexMatrix x = ComplexMatrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    const auto r = iterate_to_fixed_point(KrausChannel({x}), DensityOperator::basis(2, 0), 50, 1e-10);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 50);
  }
}

TEST_CASE("check_cptp") {
  SUBCASE("unitary") {
    Rng rng(2);
    const auto rep = check_cptp(KrausChannel({random_unitary(3, rng)}));
    CHECK(rep.completeness < 1e-14);
    CHECK(rep.passes);
  }
  SUBCASE("scaled Kraus set") {
    const auto ad = local_amplitude_damping({0.3, 0.6}, {0.2, 1.1});
    std::vector<ComplexMatrix> ops;
    for (const auto& k : ad.channel.ops()) ops.push_back(0.9 * k);
    const auto rep = check_cptp(KrausChannel(ops, ad.layout));
    CHECK(rep.completeness == doctest::Approx(0.19).epsilon(1e-12));
    CHECK_FALSE(rep.passes);
    REQUIRE(rep.s_block.has_value());
    CHECK(*rep.s_block == doctest::Approx(0.19).epsilon(1e-12));
  }
  SUBCASE("block residuals of a built channel") {
    const auto ad = local_amplitude_damping({0.3, 0.6}, {0.2, 1.1});
    const auto rep = check_cptp(ad.channel, 1e-10);
    CHECK(rep.passes);
    CHECK(*rep.lower_left == 0.0);
  }
}

TEST_CASE("check_fixed_point") {
  const auto ad = local_amplitude_damping({0.3, 0.6}, {0.2, 1.1});
  CHECK(check_fixed_point(KrausChannel({ComplexMatrix::Identity(3, 3)}),
                          DensityOperator::maximally_mixed(3), 1e-12).is_fixed);
  CHECK(check_fixed_point(ad.channel, DensityOperator::basis(4, 1), 1e-12).is_fixed);
  const auto decaying = check_fixed_point(ad.channel, DensityOperator::basis(4, 2), 1e-12);
  CHECK_FALSE(decaying.is_fixed);
  CHECK(decaying.residual == doctest::Approx(0.3));
}

TEST_CASE("Choi matrix") {
  SUBCASE("identity channel") {
    const ChoiMatrix j = choi_of(KrausChannel({ComplexMatrix::Identity(2, 2)}));
    CHECK(j.matrix.trace().real() == doctest::Approx(2.0));
    const RealVector w = hermitian_eigenvalues(j.matrix);
    CHECK(w.maxCoeff() == doctest::Approx(2.0));
    CHECK(w.minCoeff() > -1e-14);
    CHECK(std::abs(w.sum() - w.maxCoeff()) < 1e-14);
  }
  SUBCASE("reconstruction and Kraus recovery") {
    const auto ad = local_amplitude_damping({0.3, 0.6}, {0.2, 1.1});
    const ChoiMatrix j = choi_of(ad.channel);
    CHECK(max_abs(choi_input_marginal(j) - ComplexMatrix::Identity(4, 4)) < 1e-14);
    const KrausChannel back = channel_from_choi(j);
    Rng rng(4);
    for (int t = 0; t < 5; ++t) {
      const ComplexMatrix x = random_density(4, rng);
      CHECK(operator_norm(apply_choi(j, x) - apply_channel(ad.channel, x)) < 1e-12);
      CHECK(operator_norm(apply_channel(back, x) - apply_channel(ad.channel, x)) < 1e-10);
    }
  }
}

TEST_CASE("measurement") {
  Povm z{{DensityOperator::basis(2, 0).matrix(), DensityOperator::basis(2, 1).matrix()}};
  SUBCASE("projective on |0>") {
    const auto r = measure(z, DensityOperator::basis(2, 0), 17);
    CHECK(r.outcome == 0);
    CHECK(r.probabilities[0] == doctest::Approx(1.0));
    CHECK(r.probabilities[1] == doctest::Approx(0.0));
  }
  SUBCASE("seeded sampling is deterministic") {
    const auto plus = DensityOperator::pure(ComplexVector::Ones(2));
    for (std::uint64_t s = 0; s < 20; ++s) CHECK(measure(z, plus, s).outcome == measure(z, plus, s).outcome);
  }
  SUBCASE("pattern projectors on a spurious state") {
    const auto ad = local_amplitude_damping({0.5, 0.5}, {0.2, 1.1});
    ComplexMatrix sigma = ComplexMatrix::Zero(4, 4);
    sigma(0, 0) = 0.2;
    sigma(1, 1) = 0.1;
    sigma(2, 2) = 0.3;
    sigma(3, 3) = 0.4;
    const auto fixed = iterate_to_fixed_point(ad.channel, DensityOperator(sigma), 1000, 1e-13);
    Povm basins{{projector_onto_indices({0, 2}, 4), projector_onto_indices({1, 3}, 4)}};
    const auto p = outcome_probabilities(Povm{{projector_onto_indices({0}, 4),
                                               projector_onto_indices({1, 2, 3}, 4)}},
                                         fixed.state);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(outcome_probabilities(basins, fixed.state)[1] == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("invalid POVM") {
    try {
      validate_povm(Povm{{DensityOperator::basis(2, 0).matrix()}});
      FAIL("expected InvalidPovm");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidPovm);
    }
  }
}

TEST_CASE("square-root measurement") {
  SUBCASE("orthogonal states give the projective measurement") {
    const Povm p = square_root_measurement({ket(3, 0), ket(3, 2)});
    REQUIRE(p.effects.size() == 3);
    CHECK(max_abs(p.effects[0] - DensityOperator::basis(3, 0).matrix()) < 1e-14);
    CHECK(max_abs(p.effects[1] - DensityOperator::basis(3, 2).matrix()) < 1e-14);
    CHECK(max_abs(p.effects[2] - DensityOperator::basis(3, 1).matrix()) < 1e-14);
  }
  for (std::size_t m : {3u, 4u, 5u, 8u}) {
    CAPTURE(m);
    const auto states = qubit_gus(m);
    const Povm p = square_root_measurement(states);
    validate_povm(p);
    ComplexMatrix frame = ComplexMatrix::Zero(2, 2);
    for (const auto& s : states) frame += s * s.adjoint();
    CHECK(max_abs(frame - (static_cast<double>(m) / 2.0) * ComplexMatrix::Identity(2, 2)) < 1e-13);
    for (double s : success_probabilities(p, states)) CHECK(std::abs(s - 2.0 / static_cast<double>(m)) < 1e-12);
  }
  SUBCASE("singular frame") {
    ComplexVector a = ket(2, 0);
    ComplexVector b = ket(2, 0);
    b(1) = 1e-6;
    try {
      square_root_measurement({a, b});
      FAIL("expected SingularFrame");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularFrame);
    }
  }
}

TEST_CASE("unambiguous POVM") {
  SUBCASE("orthogonal states need no rescaling") {
    const auto u = unambiguous_povm({ket(3, 0), ket(3, 1)});
    CHECK(u.scale == 1.0);
    CHECK(max_abs(u.povm.effects[2] - DensityOperator::basis(3, 2).matrix()) < 1e-15);
  }
  SUBCASE("overlapping states are rescaled to keep the inconclusive effect positive") {
    ComplexVector a(2), b(2);
    a << 1.0, 0.0;
    b << std::cos(0.4), std::sin(0.4);
    const auto u = unambiguous_povm({a, b});
    CHECK(u.scale == doctest::Approx(1.0 / (1.0 + std::cos(0.4))));
    validate_povm(u.povm);
    CHECK(hermitian_eigenvalues(u.povm.effects[2]).minCoeff() > -1e-12);
  }
}
