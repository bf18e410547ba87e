#include "qam/qam_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qam/errors.hpp"
#include "qam/linalg.hpp"

namespace qam {

DecayProfile DecayProfile::uniform(double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0))
    fail(ErrorCode::RateOutOfRange, "kappa must lie in (0, 1], got " + std::to_string(kappa));
  DecayProfile p;
  p.default_kappa_ = kappa;
  return p;
}

void DecayProfile::set(const PatternRef& pattern, std::size_t x, std::vector<Complex> coefficients) {
  overrides_[{pattern, x}] = std::move(coefficients);
}

void DecayProfile::set_kappa(const PatternRef& pattern, std::size_t x, double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0))
    fail(ErrorCode::RateOutOfRange, "kappa must lie in (0, 1], got " + std::to_string(kappa));
  set(pattern, x, {Complex(std::sqrt(1.0 - kappa), 0.0)});
}

std::vector<Complex> DecayProfile::coefficients(const PatternRef& pattern, std::size_t x) const {
  const auto it = overrides_.find({pattern, x});
  if (it != overrides_.end()) return it->second;
  return {Complex(std::sqrt(1.0 - default_kappa_), 0.0)};
}

double DecayProfile::transfer_rate(const PatternRef& pattern, std::size_t x) const {
  double s = 0.0;
  for (const auto& c : coefficients(pattern, x)) s += std::norm(c);
  return 1.0 - s;
}

LayoutSpec PatternSet::layout_spec() const {
  LayoutSpec spec;
  for (const auto& p : orthogonal)
    spec.stable.push_back({static_cast<std::size_t>(p.rho.rows()), p.decaying_dim});
  for (const auto& g : dfs) spec.dfs.push_back({g.dim, g.decaying_dims});
  return spec;
}

std::size_t PatternSet::dfs_count() const {
  std::size_t n = 0;
  for (const auto& g : dfs) n += g.patterns.size();
  return n;
}

PatternEigen pattern_eigen(const ComplexMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho));
  const Eigen::Index n = rho.rows();
  std::vector<ComplexVector> vecs;
  std::vector<double> w;
  for (Eigen::Index k = 0; k < n; ++k) {
    ComplexVector v = es.eigenvectors().col(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        v *= std::conj(v(i)) / std::abs(v(i));
        break;
      }
    }
    vecs.push_back(v);
    w.push_back(es.eigenvalues()(k));
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (std::abs(w[a] - w[b]) > 1e-12) return w[a] > w[b];
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex x = vecs[a](i);
      const Complex y = vecs[b](i);
      if (x.real() != y.real()) return x.real() > y.real();
      if (x.imag() != y.imag()) return x.imag() > y.imag();
    }
    return false;
  });
  PatternEigen out{RealVector(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.weights(k) = w[order[k]];
    out.vectors.col(k) = vecs[order[k]];
  }
  return out;
}

void validate_pattern_set(const PatternSet& set, const SpaceLayout& layout) {
  if (set.pattern_count() == 0) fail(ErrorCode::InvalidPatternSet, "pattern set is empty");
  if (layout.stable_blocks().size() != set.orthogonal.size() ||
      layout.dfs_blocks().size() != set.dfs.size())
    fail(ErrorCode::InvalidPatternSet, "layout block counts do not match the pattern set");
  for (std::size_t mu = 0; mu < set.orthogonal.size(); ++mu) {
    const auto& p = set.orthogonal[mu];
    const std::string tag = "orthogonal pattern " + std::to_string(mu);
    if (p.rho.rows() != p.rho.cols() || p.rho.rows() == 0)
      fail(ErrorCode::InvalidPatternSet, tag + " is not a square matrix");
    if (static_cast<std::size_t>(p.rho.rows()) != layout.stable_blocks()[mu].dim)
      fail(ErrorCode::InvalidPatternSet, tag + " does not match its block dimension");
    if (p.decaying_dim == 0) fail(ErrorCode::ZeroBasin, tag + " has an empty basin");
    if (hermiticity_residual(p.rho) > 1e-9) fail(ErrorCode::InvalidPatternSet, tag + " is not Hermitian");
    if (std::abs(p.rho.trace().real() - 1.0) > 1e-9)
      fail(ErrorCode::InvalidPatternSet, tag + " does not have unit trace");
    if (hermitian_eigenvalues(p.rho).minCoeff() <= 1e-12)
      fail(ErrorCode::InvalidPatternSet, tag + " is not full rank on its block");
  }
  for (std::size_t t = 0; t < set.dfs.size(); ++t) {
    const auto& g = set.dfs[t];
    const std::string tag = "DFS block " + std::to_string(t);
    if (g.dim != layout.dfs_blocks()[t].dim)
      fail(ErrorCode::InvalidPatternSet, tag + " does not match the layout");
    if (g.patterns.empty()) fail(ErrorCode::InvalidPatternSet, tag + " holds no patterns");
    if (g.patterns.size() != g.decaying_dims.size())
      fail(ErrorCode::InvalidPatternSet, tag + " needs one decaying dimension per pattern");
    for (const auto& psi : g.patterns) {
      if (static_cast<std::size_t>(psi.size()) != g.dim)
        fail(ErrorCode::InvalidPatternSet, tag + " pattern has the wrong length");
      if (std::abs(psi.norm() - 1.0) > 1e-9)
        fail(ErrorCode::InvalidPatternSet, tag + " pattern is not normalized");
    }
  }
  for (std::size_t b = 0; b < layout.decaying_blocks().size(); ++b) {
    const auto& blk = layout.decaying_blocks()[b];
    const std::size_t expected = blk.target.kind == BlockKind::Stable
                                     ? set.orthogonal[blk.target.block].decaying_dim
                                     : set.dfs[blk.target.block].decaying_dims[blk.target.pattern];
    if (blk.dim != expected)
      fail(ErrorCode::InvalidPatternSet, "decaying block dimensions do not match the layout");
    for (std::size_t x = 0; x < blk.dim; ++x) {
      const double kappa = set.decay.transfer_rate(blk.target, x);
      if (!(kappa > 0.0 && kappa <= 1.0 + 1e-15))
        fail(ErrorCode::RateOutOfRange, "transfer weight " + std::to_string(kappa) +
                                            " outside (0, 1]");
    }
  }
}

std::vector<double> stable_angles(const PatternSet& set) {
  std::size_t labels = set.dfs.size();
  for (const auto& p : set.orthogonal) labels += static_cast<std::size_t>(p.rho.rows());
  std::vector<double> out(labels);
  for (std::size_t k = 0; k < labels; ++k)
    out[k] = std::numbers::pi * static_cast<double>(k) / static_cast<double>(labels);
  return out;
}

namespace {

// Number of D-block coefficients alpha used anywhere in the profile.
std::size_t decay_channels(const PatternSet& set, const SpaceLayout& layout) {
  std::size_t n = 1;
  for (const auto& blk : layout.decaying_blocks())
    for (std::size_t x = 0; x < blk.dim; ++x)
      n = std::max(n, set.decay.coefficients(blk.target, x).size());
  return n;
}

KrausChannel build_channel(const PatternSet& set, const SpaceLayout& layout) {
  validate_pattern_set(set, layout);
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  const std::vector<double> theta = stable_angles(set);
  const std::size_t extra = std::max<std::size_t>(decay_channels(set, layout), 2);

  std::vector<ComplexMatrix> stable_ops(extra, ComplexMatrix::Zero(n, n));
  std::vector<ComplexMatrix> mixing;

  std::size_t label = 0;
  std::vector<PatternEigen> eig;
  for (std::size_t mu = 0; mu < set.orthogonal.size(); ++mu) {
    eig.push_back(pattern_eigen(set.orthogonal[mu].rho));
    const BlockId block{BlockKind::Stable, mu};
    for (Eigen::Index j = 0; j < eig.back().vectors.cols(); ++j, ++label) {
      const ComplexVector v = embed(eig.back().vectors.col(j), block, layout);
      const ComplexMatrix proj = v * v.adjoint();
      stable_ops[0] += std::cos(theta[label]) * proj;
      stable_ops[1] += std::sin(theta[label]) * proj;
    }
  }
  for (std::size_t t = 0; t < set.dfs.size(); ++t, ++label) {
    const ComplexMatrix proj = projector_onto(BlockId{BlockKind::Dfs, t}, layout);
    stable_ops[0] += std::cos(theta[label]) * proj;
    stable_ops[1] += std::sin(theta[label]) * proj;
  }

  for (std::size_t b = 0; b < layout.decaying_blocks().size(); ++b) {
    const auto& blk = layout.decaying_blocks()[b];
    const BlockId id{BlockKind::Decaying, b};
    for (std::size_t x = 0; x < blk.dim; ++x) {
      const std::size_t gx = layout.global_index(id, x);
      const auto c = set.decay.coefficients(blk.target, x);
      for (std::size_t a = 0; a < c.size(); ++a) stable_ops[a](gx, gx) += c[a];
      const double kappa = std::max(0.0, set.decay.transfer_rate(blk.target, x));
      if (blk.target.kind == BlockKind::Stable) {
        const auto& e = eig[blk.target.block];
        const BlockId sb{BlockKind::Stable, blk.target.block};
        for (Eigen::Index j = 0; j < e.vectors.cols(); ++j) {
          const ComplexVector v = embed(e.vectors.col(j), sb, layout);
          ComplexMatrix k = ComplexMatrix::Zero(n, n);
          k.col(static_cast<Eigen::Index>(gx)) = std::sqrt(e.weights(j) * kappa) * v;
          mixing.push_back(std::move(k));
        }
      } else {
        const auto& psi = set.dfs[blk.target.block].patterns[blk.target.pattern];
        const ComplexVector v = embed(psi, BlockId{BlockKind::Dfs, blk.target.block}, layout);
        ComplexMatrix k = ComplexMatrix::Zero(n, n);
        k.col(static_cast<Eigen::Index>(gx)) = std::sqrt(kappa) * v;
        mixing.push_back(std::move(k));
      }
    }
  }
  std::vector<ComplexMatrix> ops = std::move(stable_ops);
  for (auto& k : mixing) ops.push_back(std::move(k));
  return KrausChannel(std::move(ops), layout);
}

}  // namespace

KrausChannel build_orthogonal(const PatternSet& set, const SpaceLayout& layout) {
  if (!set.dfs.empty()) fail(ErrorCode::InvalidPatternSet, "orthogonal builder given DFS patterns");
  return build_channel(set, layout);
}

KrausChannel build_dfs(const PatternSet& set, const SpaceLayout& layout) {
  if (!set.orthogonal.empty())
    fail(ErrorCode::InvalidPatternSet, "DFS builder given orthogonal patterns");
  return build_channel(set, layout);
}

KrausChannel build_qam(const PatternSet& set, const SpaceLayout& layout) {
  return build_channel(set, layout);
}

DensityOperator pattern_state(const PatternSet& set, const SpaceLayout& layout,
                              const PatternRef& pattern) {
  if (pattern.kind == BlockKind::Stable) {
    if (pattern.block >= set.orthogonal.size()) fail(ErrorCode::UnknownBlock, "no such pattern");
    return DensityOperator::trusted(embed_operator(set.orthogonal[pattern.block].rho,
                                                   {BlockKind::Stable, pattern.block}, layout));
  }
  if (pattern.kind != BlockKind::Dfs || pattern.block >= set.dfs.size() ||
      pattern.pattern >= set.dfs[pattern.block].patterns.size())
    fail(ErrorCode::UnknownBlock, "no such pattern");
  return DensityOperator::pure(embed(set.dfs[pattern.block].patterns[pattern.pattern],
                                     {BlockKind::Dfs, pattern.block}, layout));
}

ComplexMatrix gus_rotation(std::size_t pattern_count) {
  const double phi = 2.0 * std::numbers::pi / static_cast<double>(pattern_count);
  ComplexMatrix u(2, 2);
  // exp(-i phi sigma_y)
  u << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return u;
}

GusMemory build_gus(std::size_t n_qubits, std::size_t pattern_count, const ComplexVector& psi,
                    const DecayProfile& decay) {
  if (n_qubits == 0 || n_qubits > 11)
    fail(ErrorCode::DimensionOverflow, "GUS memory supports 1..11 decaying qubits");
  const std::size_t states = std::size_t{1} << n_qubits;
  if (pattern_count == 0) fail(ErrorCode::InvalidPatternSet, "pattern count must be positive");
  if (pattern_count > states)
    fail(ErrorCode::TooManyPatterns, std::to_string(pattern_count) + " patterns exceed 2^" +
                                         std::to_string(n_qubits) + " decaying states");
  if (psi.size() != 2 || std::abs(psi.norm() - 1.0) > 1e-9)
    fail(ErrorCode::InvalidPatternSet, "seed state must be a normalized qubit vector");

  const ComplexMatrix u = gus_rotation(pattern_count);
  PatternSet set;
  set.decay = decay;
  DfsGroup group;
  group.dim = 2;
  std::vector<std::vector<std::size_t>> basins(pattern_count);
  for (std::size_t x = 0; x < states; ++x) basins[x % pattern_count].push_back(x);
  ComplexVector cur = psi;
  std::vector<ComplexVector> qubit;
  for (std::size_t l = 0; l < pattern_count; ++l) {
    qubit.push_back(cur);
    group.patterns.push_back(cur);
    group.decaying_dims.push_back(basins[l].size());
    cur = u * cur;
  }
  set.dfs.push_back(group);

  std::vector<std::vector<std::size_t>> indices{{0, 1}};
  for (const auto& b : basins) {
    std::vector<std::size_t> g;
    for (auto x : b) g.push_back(2 + x);
    indices.push_back(g);
  }
  SpaceLayout layout = build_layout(set.layout_spec(), 2 + states, indices);
  validate_pattern_set(set, layout);

  const auto n = static_cast<Eigen::Index>(2 + states);
  const double theta = stable_angles(set).front();
  std::size_t extra = 2;
  for (std::size_t l = 0; l < pattern_count; ++l)
    for (std::size_t i = 0; i < basins[l].size(); ++i)
      extra = std::max(extra, decay.coefficients({BlockKind::Dfs, 0, l}, i).size());
  std::vector<ComplexMatrix> ops(extra, ComplexMatrix::Zero(n, n));
  ops[0](0, 0) = ops[0](1, 1) = std::cos(theta);
  ops[1](0, 0) = ops[1](1, 1) = std::sin(theta);
  for (std::size_t x = 0; x < states; ++x) {
    const std::size_t l = x % pattern_count;
    const std::size_t local = x / pattern_count;
    const PatternRef ref{BlockKind::Dfs, 0, l};
    const auto c = decay.coefficients(ref, local);
    const auto gx = static_cast<Eigen::Index>(2 + x);
    for (std::size_t a = 0; a < c.size(); ++a) ops[a](gx, gx) = c[a];
    ComplexMatrix k = ComplexMatrix::Zero(n, n);
    const double b = std::sqrt(std::max(0.0, decay.transfer_rate(ref, local)));
    k(0, gx) = b * qubit[l](0);
    k(1, gx) = b * qubit[l](1);
    ops.push_back(std::move(k));
  }
  KrausChannel channel(std::move(ops), layout);
  return {std::move(channel), std::move(layout), std::move(set), std::move(qubit), std::move(basins)};
}

double QamReport::max_fixed_point() const {
  double m = 0.0;
  for (const auto& p : patterns) m = std::max(m, p.fixed_point_residual);
  return m;
}
double QamReport::max_convergence() const {
  double m = 0.0;
  for (const auto& p : patterns) m = std::max(m, p.convergence_residual);
  return m;
}
double QamReport::max_rate() const {
  double m = 0.0;
  for (const auto& p : patterns) m = std::max(m, p.rate_residual);
  return m;
}
double QamReport::max_leakage() const {
  double m = 0.0;
  for (const auto& p : patterns) m = std::max(m, p.leakage);
  return m;
}

QamReport validate_qam(const KrausChannel& channel, const PatternSet& set,
                       const SpaceLayout& layout, double tol, const ValidationOptions& options) {
  if (static_cast<std::size_t>(channel.dim()) != layout.total_dim())
    fail(ErrorCode::DimMismatch, "channel and layout dimensions differ");
  QamReport report;
  report.tolerance = tol;
  const auto refs = layout.patterns();
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  const ComplexMatrix p_stable = projector_onto_indices(layout.stable_indices(), layout.total_dim());

  std::vector<ComplexMatrix> basin_proj;
  for (const auto& r : refs) basin_proj.push_back(projector_onto(layout.basin_blocks(r), layout));

  ComplexMatrix mixture = ComplexMatrix::Zero(n, n);
  for (std::size_t m = 0; m < refs.size(); ++m) {
    const PatternRef& ref = refs[m];
    PatternReport pr;
    pr.pattern = ref;
    const DensityOperator target = pattern_state(set, layout, ref);
    mixture += target.matrix() / static_cast<double>(refs.size());
    pr.fixed_point_residual = check_fixed_point(channel, target, tol).residual;

    std::vector<ComplexMatrix> leak_proj;
    for (std::size_t v = 0; v < refs.size(); ++v) {
      if (v == m) continue;
      const bool shared = refs[v].kind == BlockKind::Dfs && ref.kind == BlockKind::Dfs &&
                          refs[v].block == ref.block;
      leak_proj.push_back(shared ? projector_onto(layout.decaying_blocks_of(refs[v]), layout)
                                 : basin_proj[v]);
    }
    auto leakage_of = [&](const ComplexMatrix& rho) {
      double worst = 0.0;
      for (const auto& p : leak_proj) worst = std::max(worst, std::abs((p * rho).trace().real()));
      return worst;
    };
    pr.leakage = leakage_of(target.matrix());

    for (const auto& blk : layout.decaying_blocks_of(ref)) {
      for (std::size_t x = 0; x < layout.block_dim(blk); ++x) {
        const auto gx = static_cast<Eigen::Index>(layout.global_index(blk, x));
        const DensityOperator start = DensityOperator::basis(n, gx);
        const double transferred = (p_stable * apply_channel(channel, start.matrix())).trace().real();
        pr.rate_residual =
            std::max(pr.rate_residual, std::abs(transferred - set.decay.transfer_rate(ref, x)));
        const auto fp = iterate_to_fixed_point(channel, start, options.max_iters, options.iterate_tol);
        pr.converged = pr.converged && fp.converged;
        pr.max_iterations = std::max(pr.max_iterations, fp.iterations);
        pr.convergence_residual =
            std::max(pr.convergence_residual, trace_distance(fp.state.matrix(), target.matrix()));
        pr.leakage = std::max(pr.leakage, leakage_of(fp.state.matrix()));
      }
    }
    report.patterns.push_back(pr);
  }
  report.spurious_mixture_residual =
      trace_distance(apply_channel(channel, mixture), mixture);
  report.passes = report.max_fixed_point() < tol && report.max_convergence() < tol &&
                  report.max_rate() < tol && report.max_leakage() < tol &&
                  report.spurious_mixture_residual < tol;
  for (const auto& p : report.patterns) report.passes = report.passes && p.converged;
  return report;
}

bool stable_and_mixing_disjoint(const KrausChannel& channel) {
  if (!channel.layout()) fail(ErrorCode::InconsistentLayout, "channel has no layout");
  for (const auto& t : channel.block_tags())
    if (t.s && t.sd) return false;
  return true;
}

}  // namespace qam
