#include <algorithm>
#include <bit>
#include <set>
#include <string>

#include "qam/errors.hpp"
#include "qam/models.hpp"

namespace qam {

std::size_t bitstring_index(const std::string& bits) {
  std::size_t v = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') fail(ErrorCode::InvalidPatternSet, "bit string '" + bits + "'");
    v = (v << 1) | static_cast<std::size_t>(c == '1');
  }
  return v;
}

std::string index_bitstring(std::size_t index, std::size_t n_qubits) {
  std::string s(n_qubits, '0');
  for (std::size_t i = 0; i < n_qubits; ++i)
    if ((index >> (n_qubits - 1 - i)) & 1U) s[i] = '1';
  return s;
}

ComplexMatrix pauli_z(std::size_t qubit, std::size_t n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  ComplexMatrix z = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x)
    z(x, x) = ((x >> (n_qubits - 1 - qubit)) & 1U) ? -1.0 : 1.0;
  return z;
}

WalkModel build_walk(const WalkSpec& spec) {
  const std::size_t n = spec.n_qubits;
  if (n == 0 || n > 10) fail(ErrorCode::DimensionOverflow, "walk supports 1..10 qubits");
  if (spec.patterns.empty()) fail(ErrorCode::InvalidPatternSet, "walk needs at least one pattern");
  if (spec.gamma < 0.0 || spec.eta < 0.0 || spec.kappa < 0.0)
    fail(ErrorCode::RateOutOfRange, "walk rates must be non-negative");
  const std::size_t dim = std::size_t{1} << n;

  std::vector<std::size_t> pats;
  std::set<std::size_t> seen;
  for (const auto& p : spec.patterns) {
    if (p.size() != n) fail(ErrorCode::InvalidPatternSet, "pattern '" + p + "' has the wrong length");
    const std::size_t idx = bitstring_index(p);
    if (!seen.insert(idx).second) fail(ErrorCode::DuplicatePatterns, "pattern '" + p + "' repeated");
    pats.push_back(idx);
  }

  std::vector<int> dist(dim);
  std::vector<int> basin(dim, -1);
  std::vector<bool> is_pattern(dim, false);
  for (std::size_t x = 0; x < dim; ++x) {
    int best = 1 << 20;
    int count = 0;
    int arg = -1;
    for (std::size_t m = 0; m < pats.size(); ++m) {
      const int d = std::popcount(x ^ pats[m]);
      if (d < best) {
        best = d;
        count = 1;
        arg = static_cast<int>(m);
      } else if (d == best) {
        ++count;
      }
    }
    dist[x] = best;
    if (count == 1) basin[x] = arg;
    if (best == 0) is_pattern[x] = true;
  }

  const auto nd = static_cast<Eigen::Index>(dim);
  ComplexMatrix h = ComplexMatrix::Zero(nd, nd);
  std::vector<JumpOperator> jumps;
  for (std::size_t x = 0; x < dim; ++x) {
    if (is_pattern[x]) continue;
    h(x, x) = spec.eta;
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t y = x ^ (std::size_t{1} << b);
      if (dist[y] < dist[x]) {
        ComplexMatrix f = ComplexMatrix::Zero(nd, nd);
        f(y, x) = 1.0;
        jumps.push_back({std::move(f), spec.gamma});
      }
      if (!is_pattern[y]) {
        const bool same = basin[x] >= 0 && basin[x] == basin[y];
        h(x, y) = same ? spec.eta : spec.kappa;
      }
    }
  }

  LayoutSpec ls;
  std::vector<std::vector<std::size_t>> indices;
  PatternSet set;
  std::vector<std::vector<std::size_t>> members(pats.size());
  for (std::size_t x = 0; x < dim; ++x)
    if (!is_pattern[x] && basin[x] >= 0) members[basin[x]].push_back(x);
  for (std::size_t m = 0; m < pats.size(); ++m) {
    ls.stable.push_back({1, members[m].size()});
    indices.push_back({pats[m]});
    set.orthogonal.push_back({ComplexMatrix::Ones(1, 1), members[m].size()});
  }
  for (const auto& mem : members) indices.push_back(mem);
  SpaceLayout layout = build_layout(ls, dim, indices);

  return {build_liouvillian(h, std::move(jumps)), std::move(layout), std::move(set), basin, pats};
}

Table walk_retrieval_curve(const WalkSpec& spec, const std::string& initial,
                           const std::vector<std::string>& observables,
                           const std::vector<double>& times) {
  const WalkModel model = build_walk(spec);
  if (initial.size() != spec.n_qubits)
    fail(ErrorCode::InvalidPatternSet, "initial string has the wrong length");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << spec.n_qubits);
  const auto start = DensityOperator::basis(dim, static_cast<Eigen::Index>(bitstring_index(initial)));
  std::vector<Eigen::Index> obs;
  Table table;
  table.columns.push_back("t [1/rate units]");
  for (const auto& o : observables) {
    if (o.size() != spec.n_qubits) fail(ErrorCode::InvalidPatternSet, "observable '" + o + "'");
    obs.push_back(static_cast<Eigen::Index>(bitstring_index(o)));
    table.columns.push_back("P_" + o + " [population]");
  }
  const auto states = evolve_grid(model.liouvillian, start, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> row{times[k]};
    for (auto idx : obs) row.push_back(states[k].matrix()(idx, idx).real());
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace qam
