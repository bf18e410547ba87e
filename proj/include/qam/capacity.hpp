#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "qam/hilbert.hpp"
#include "qam/qam_builder.hpp"

namespace qam {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);
double to_double(const Rational& r);

struct CapacityReport {
  std::size_t m_perp = 0;
  std::size_t m_nonperp = 0;
  std::size_t n_s = 0;
  std::size_t n_d = 0;
  std::size_t n = 0;
  Rational alpha_q{0};
  std::optional<Rational> alpha_qc_exact;
  double alpha_qc = 0.0;
  double p_succ = 1.0;
  bool saturates_bound = false;
  // M / (M_perp + c M): stable part of orthogonal patterns plus a decaying part ~ c M.
  double asymptotic_constant = 1.0;
  double asymptotic_estimate = 0.0;
};

CapacityReport capacity_of(const SpaceLayout& layout, const PatternSet& set,
                           double asymptotic_constant = 1.0);

// alpha_QC = (M_perp + p_succ M_nonperp) / N.
CapacityReport classical_capacity_of(const SpaceLayout& layout, const PatternSet& set,
                                     double p_succ, double asymptotic_constant = 1.0);
CapacityReport classical_capacity_of(const SpaceLayout& layout, const PatternSet& set,
                                     const Rational& p_succ, double asymptotic_constant = 1.0);

double asymptotic_capacity(std::size_t m_perp, std::size_t m_nonperp, double p_succ = 1.0,
                           double constant = 1.0);

// Number of ways to write N = sum_mu (s_mu + d_mu) with every s_mu, d_mu >= 1,
// found by exhaustive enumeration.
std::size_t count_dimension_partitions(std::size_t n, std::size_t m);

struct AuditCase {
  std::size_t m = 0;
  std::size_t partitions = 0;
  bool accepted = false;
  std::optional<std::string> error;  // error code name when rejected
};

struct DimensionAudit {
  std::size_t n = 0;
  AuditCase at_bound;    // M = N/2
  AuditCase past_bound;  // M = N/2 + 1
  Rational capacity_at_bound{0};
  bool saturates = false;
};

// Builds rank-1 orthogonal QAMs with M = N/2 and M = N/2 + 1 patterns on N
// dimensions; the second must leave some pattern without a decaying state.
DimensionAudit theorem1_dimension_audit(std::size_t n);

}  // namespace qam
