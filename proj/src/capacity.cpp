#include "qam/capacity.hpp"

#include <functional>
#include <string>

#include "qam/errors.hpp"

namespace qam {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

namespace {

void check_consistent(const SpaceLayout& layout, const PatternSet& set) {
  const auto& st = layout.stable_blocks();
  const auto& dfs = layout.dfs_blocks();
  if (st.size() != set.orthogonal.size() || dfs.size() != set.dfs.size())
    fail(ErrorCode::InconsistentLayout, "block counts do not match the pattern set");
  for (std::size_t i = 0; i < st.size(); ++i) {
    const PatternRef ref{BlockKind::Stable, i, 0};
    if (st[i].dim != static_cast<std::size_t>(set.orthogonal[i].rho.rows()))
      fail(ErrorCode::InconsistentLayout, "stable block " + std::to_string(i) + " dimension mismatch");
    std::size_t d = 0;
    for (const auto& b : layout.decaying_blocks_of(ref)) d += layout.block_dim(b);
    if (d != set.orthogonal[i].decaying_dim)
      fail(ErrorCode::InconsistentLayout, "decaying dimension mismatch for pattern " + std::to_string(i));
  }
  for (std::size_t t = 0; t < dfs.size(); ++t) {
    const auto& g = set.dfs[t];
    if (dfs[t].dim != g.dim || dfs[t].pattern_count != g.patterns.size() ||
        g.decaying_dims.size() != g.patterns.size())
      fail(ErrorCode::InconsistentLayout, "DFS block " + std::to_string(t) + " mismatch");
    for (std::size_t l = 0; l < g.patterns.size(); ++l) {
      std::size_t d = 0;
      for (const auto& b : layout.decaying_blocks_of({BlockKind::Dfs, t, l})) d += layout.block_dim(b);
      if (d != g.decaying_dims[l])
        fail(ErrorCode::InconsistentLayout, "decaying dimension mismatch in DFS block " + std::to_string(t));
    }
  }
}

}  // namespace

double asymptotic_capacity(std::size_t m_perp, std::size_t m_nonperp, double p_succ,
                           double constant) {
  const double m = static_cast<double>(m_perp + m_nonperp);
  const double denom = static_cast<double>(m_perp) + constant * m;
  if (denom <= 0.0) return 0.0;
  return (static_cast<double>(m_perp) + p_succ * static_cast<double>(m_nonperp)) / denom;
}

CapacityReport capacity_of(const SpaceLayout& layout, const PatternSet& set,
                           double asymptotic_constant) {
  check_consistent(layout, set);
  CapacityReport r;
  r.m_perp = set.orthogonal_count();
  r.m_nonperp = set.dfs_count();
  r.n_s = layout.stable_dim();
  r.n_d = layout.decaying_dim();
  r.n = layout.total_dim();
  if (r.n == 0) fail(ErrorCode::InconsistentLayout, "empty layout");
  r.alpha_q = Rational(static_cast<std::int64_t>(r.m_perp + r.m_nonperp), static_cast<std::int64_t>(r.n));
  r.alpha_qc_exact = r.alpha_q;
  r.alpha_qc = to_double(r.alpha_q);
  bool rank_one = r.m_nonperp == 0 && r.m_perp > 0;
  for (const auto& p : set.orthogonal)
    if (p.rho.rows() != 1 || p.decaying_dim != 1) rank_one = false;
  r.saturates_bound = rank_one && 2 * r.m_perp == r.n;
  r.asymptotic_constant = asymptotic_constant;
  r.asymptotic_estimate = asymptotic_capacity(r.m_perp, r.m_nonperp, 1.0, asymptotic_constant);
  return r;
}

CapacityReport classical_capacity_of(const SpaceLayout& layout, const PatternSet& set,
                                     const Rational& p_succ, double asymptotic_constant) {
  if (p_succ < 0 || p_succ > 1) fail(ErrorCode::BadProbability, "p_succ must lie in [0, 1]");
  CapacityReport r = capacity_of(layout, set, asymptotic_constant);
  r.p_succ = to_double(p_succ);
  const Rational qc = (Rational(static_cast<std::int64_t>(r.m_perp)) +
                       p_succ * static_cast<std::int64_t>(r.m_nonperp)) /
                      static_cast<std::int64_t>(r.n);
  if (qc > r.alpha_q) fail(ErrorCode::BadProbability, "classical capacity exceeds quantum capacity");
  r.alpha_qc_exact = qc;
  r.alpha_qc = to_double(qc);
  r.asymptotic_estimate = asymptotic_capacity(r.m_perp, r.m_nonperp, r.p_succ, asymptotic_constant);
  return r;
}

CapacityReport classical_capacity_of(const SpaceLayout& layout, const PatternSet& set,
                                     double p_succ, double asymptotic_constant) {
  if (!(p_succ >= 0.0 && p_succ <= 1.0)) fail(ErrorCode::BadProbability, "p_succ must lie in [0, 1]");
  CapacityReport r = capacity_of(layout, set, asymptotic_constant);
  r.p_succ = p_succ;
  r.alpha_qc = (static_cast<double>(r.m_perp) + p_succ * static_cast<double>(r.m_nonperp)) /
               static_cast<double>(r.n);
  r.alpha_qc_exact.reset();
  if (p_succ == 1.0) r.alpha_qc_exact = r.alpha_q;
  r.asymptotic_estimate = asymptotic_capacity(r.m_perp, r.m_nonperp, p_succ, asymptotic_constant);
  return r;
}

std::size_t count_dimension_partitions(std::size_t n, std::size_t m) {
  if (m == 0) return n == 0 ? 1 : 0;
  const std::size_t parts = 2 * m;
  std::size_t count = 0;
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t part, std::size_t left) {
    if (part + 1 == parts) {
      if (left >= 1) ++count;
      return;
    }
    for (std::size_t v = 1; v + (parts - part - 1) <= left; ++v) walk(part + 1, left - v);
  };
  if (n >= parts) walk(0, n);
  return count;
}

namespace {

AuditCase audit_case(std::size_t n, std::size_t m) {
  AuditCase c;
  c.m = m;
  c.partitions = count_dimension_partitions(n, m);
  PatternSet set;
  std::size_t spare = n >= m ? n - m : 0;
  for (std::size_t mu = 0; mu < m; ++mu) {
    const std::size_t d = spare > 0 ? 1 : 0;
    spare -= d;
    set.orthogonal.push_back({ComplexMatrix::Ones(1, 1), d});
  }
  try {
    const SpaceLayout layout = build_layout(set.layout_spec());
    if (layout.total_dim() != n) fail(ErrorCode::InconsistentLayout, "layout does not fill N");
    const KrausChannel channel = build_orthogonal(set, layout);
    c.accepted = check_cptp(channel, 1e-10).passes;
  } catch (const Error& e) {
    c.error = std::string(to_string(e.code()));
  }
  return c;
}

}  // namespace

DimensionAudit theorem1_dimension_audit(std::size_t n) {
  if (n < 2 || n % 2 != 0) fail(ErrorCode::InconsistentLayout, "N must be even and at least 2");
  DimensionAudit a;
  a.n = n;
  a.at_bound = audit_case(n, n / 2);
  a.past_bound = audit_case(n, n / 2 + 1);
  a.capacity_at_bound = Rational(static_cast<std::int64_t>(n / 2), static_cast<std::int64_t>(n));
  if (a.at_bound.accepted) {
    PatternSet set;
    for (std::size_t mu = 0; mu < n / 2; ++mu) set.orthogonal.push_back({ComplexMatrix::Ones(1, 1), 1});
    const CapacityReport r = capacity_of(build_layout(set.layout_spec()), set);
    a.capacity_at_bound = r.alpha_q;
    a.saturates = r.saturates_bound;
  }
  return a;
}

}  // namespace qam
