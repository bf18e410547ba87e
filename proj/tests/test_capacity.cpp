#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qam/capacity.hpp"
#include "qam/errors.hpp"
#include "qam/quantum_core.hpp"

using namespace qam;

namespace {

ComplexVector gus_seed() {
  ComplexVector psi(2);
  psi << std::cos(std::numbers::pi / 8), std::sin(std::numbers::pi / 8);
  return psi;
}

PatternSet rank_one(std::size_t m) {
  PatternSet set;
  for (std::size_t i = 0; i < m; ++i) set.orthogonal.push_back({ComplexMatrix::Identity(1, 1), 1});
  set.decay = DecayProfile::uniform(0.5);
  return set;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("rank-one orthogonal memories saturate one half") {
  for (std::size_t m : {1u, 2u, 5u}) {
    const PatternSet set = rank_one(m);
    const SpaceLayout layout = build_layout(set.layout_spec());
    const CapacityReport r = capacity_of(layout, set);
    CHECK(r.alpha_q == Rational(1, 2));
    CHECK(r.saturates_bound);
    CHECK(r.alpha_qc_exact == Rational(1, 2));
    CHECK(to_string(r.alpha_q) == "1/2");
  }
}

TEST_CASE("GUS capacity") {
  const GusMemory g = build_gus(3, 8, gus_seed());
  const CapacityReport q = capacity_of(g.layout, g.patterns);
  CHECK(q.n == 10);
  CHECK(q.n_s == 2);
  CHECK(q.alpha_q == Rational(4, 5));
  CHECK_FALSE(q.saturates_bound);
  for (std::size_t n : {2u, 3u, 4u}) {
    const std::size_t m = std::size_t{1} << n;
    const GusMemory gm = build_gus(n, m, gus_seed());
    const CapacityReport c = classical_capacity_of(gm.layout, gm.patterns, Rational(2, static_cast<std::int64_t>(m)));
    CHECK(c.alpha_qc_exact == Rational(2, static_cast<std::int64_t>(2 + m)));
    CHECK(c.alpha_qc == doctest::Approx(2.0 / (2.0 + m)));
  }
  const GusMemory g3 = build_gus(3, 3, gus_seed());
  const CapacityReport c3 = classical_capacity_of(g3.layout, g3.patterns, Rational(2, 3));
  CHECK(c3.alpha_qc_exact == Rational(1, 5));
}

TEST_CASE("single DFS block") {
  PatternSet set;
  DfsGroup grp;
  grp.dim = 3;
  for (int l = 0; l < 4; ++l) {
    ComplexVector v = ComplexVector::Zero(3);
    v(l % 3) = 1.0;
    if (l == 3) v = ComplexVector::Ones(3).normalized();
    grp.patterns.push_back(v);
    grp.decaying_dims.push_back(2);
  }
  set.dfs.push_back(grp);
  const SpaceLayout layout = build_layout(set.layout_spec());
  const CapacityReport r = capacity_of(layout, set);
  CHECK(r.alpha_q == Rational(4, 11));
  CHECK(r.m_nonperp == 4);
  CHECK(r.n_s == 3);
}

TEST_CASE("all-orthogonal memories lose nothing classically") {
  PatternSet set = rank_one(3);
  set.orthogonal[1].rho = ComplexMatrix::Identity(2, 2) / 2.0;
  set.orthogonal[2].decaying_dim = 3;
  const SpaceLayout layout = build_layout(set.layout_spec());
  const CapacityReport r = classical_capacity_of(layout, set, Rational(1, 7));
  CHECK(r.alpha_qc_exact == r.alpha_q);
  CHECK(r.alpha_q == Rational(3, 9));
  const CapacityReport d = classical_capacity_of(layout, set, 0.3);
  CHECK(d.alpha_qc == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("asymptotic estimate") {
  CHECK(asymptotic_capacity(4, 0) == doctest::Approx(0.5));
  CHECK(asymptotic_capacity(0, 6, 1.0, 0.5) == doctest::Approx(2.0));
  CHECK(asymptotic_capacity(2, 2, 0.5, 1.0) == doctest::Approx(3.0 / 6.0));
}

TEST_CASE("capacity errors") {
  const PatternSet set = rank_one(2);
  const SpaceLayout layout = build_layout(set.layout_spec());
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ConfigParse;
  };
  CHECK(code_of([&] { classical_capacity_of(layout, set, Rational(3, 2)); }) == ErrorCode::BadProbability);
  CHECK(code_of([&] { classical_capacity_of(layout, set, -0.1); }) == ErrorCode::BadProbability);
  const PatternSet other = rank_one(3);
  CHECK(code_of([&] { capacity_of(layout, other); }) == ErrorCode::InconsistentLayout);
}

TEST_CASE("dimension partitions") {
  // Compositions of N into 2M positive parts.
  for (std::size_t n = 2; n <= 12; ++n)
    for (std::size_t m = 1; m <= 7; ++m) {
      CAPTURE(n);
      CAPTURE(m);
      CHECK(count_dimension_partitions(n, m) == (2 * m <= n ? binomial(n - 1, 2 * m - 1) : 0));
    }
  CHECK(count_dimension_partitions(6, 3) == 1);
  CHECK(count_dimension_partitions(6, 4) == 0);
}

TEST_CASE("dimension audit") {
  for (std::size_t n = 2; n <= 16; n += 2) {
    CAPTURE(n);
    const DimensionAudit a = theorem1_dimension_audit(n);
    CHECK(a.at_bound.accepted);
    CHECK(a.at_bound.partitions == 1);
    CHECK_FALSE(a.past_bound.accepted);
    CHECK(a.past_bound.partitions == 0);
    REQUIRE(a.past_bound.error.has_value());
    CHECK(*a.past_bound.error == "ZeroBasin");
    CHECK(a.capacity_at_bound == Rational(1, 2));
    CHECK(a.saturates);
  }
  CHECK_THROWS_AS(theorem1_dimension_audit(5), Error);
}
