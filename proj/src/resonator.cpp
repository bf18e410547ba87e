#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <gsl/gsl_integration.h>

#include "qam/errors.hpp"
#include "qam/linalg.hpp"
#include "qam/models.hpp"
#include "qam/parallel.hpp"

namespace qam {

namespace {

double nominal_radius(const ResonatorSpec& spec) {
  if (spec.gamma_n <= 0.0) return 0.0;
  return std::pow(2.0 * spec.eta / spec.gamma_n, 1.0 / static_cast<double>(spec.n));
}

Complex mean_field_rhs(const ResonatorSpec& s, Complex a) {
  const double n = static_cast<double>(s.n);
  const Complex drive = std::polar(1.0, -n * s.theta0);
  return -kI * s.delta * a - n * s.eta * drive * std::pow(std::conj(a), n - 1.0) -
         0.5 * s.gamma1 * a - 0.5 * n * s.gamma_n * std::pow(std::norm(a), n - 1.0) * a;
}

struct Nodes {
  std::vector<double> x;
  std::vector<double> w;
};

Nodes gauss_legendre(std::size_t count, double a, double b) {
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(count);
  Nodes out;
  for (std::size_t i = 0; i < count; ++i) {
    double xi = 0.0;
    double wi = 0.0;
    gsl_integration_glfixed_point(a, b, i, &xi, &wi, table);
    out.x.push_back(xi);
    out.w.push_back(wi);
  }
  gsl_integration_glfixed_table_free(table);
  return out;
}

}  // namespace

ComplexMatrix annihilation(std::size_t fock_dim) {
  const auto d = static_cast<Eigen::Index>(fock_dim);
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  for (Eigen::Index m = 1; m < d; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return a;
}

ComplexVector coherent_state(Complex beta, std::size_t fock_dim) {
  const auto d = static_cast<Eigen::Index>(fock_dim);
  ComplexVector v(d);
  v(0) = std::exp(-0.5 * std::norm(beta));
  for (Eigen::Index m = 1; m < d; ++m) v(m) = v(m - 1) * beta / std::sqrt(static_cast<double>(m));
  return v / v.norm();
}

std::vector<Complex> mean_field_lobes(const ResonatorSpec& spec) {
  const double r = nominal_radius(spec);
  const double n = static_cast<double>(spec.n);
  std::vector<Complex> out;
  for (std::size_t j = 0; j < spec.n; ++j) {
    const double phi = (std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j)) / n -
                       spec.theta0;
    Complex a = std::polar(r, phi);
    for (int it = 0; it < 100 && std::abs(a) > 0.0; ++it) {
      const Complex f = mean_field_rhs(spec, a);
      const double h = 1e-7 * std::max(1.0, std::abs(a));
      const Complex fx = (mean_field_rhs(spec, a + h) - mean_field_rhs(spec, a - h)) / (2.0 * h);
      const Complex fy =
          (mean_field_rhs(spec, a + kI * h) - mean_field_rhs(spec, a - kI * h)) / (2.0 * h);
      Eigen::Matrix2d jac;
      jac << fx.real(), fy.real(), fx.imag(), fy.imag();
      const Eigen::Vector2d step = jac.fullPivLu().solve(Eigen::Vector2d(f.real(), f.imag()));
      a -= Complex(step(0), step(1));
      if (step.norm() < 1e-14 * std::max(1.0, std::abs(a))) break;
    }
    out.push_back(a);
  }
  // Exact Z_n symmetry of the lobe set.
  for (std::size_t j = 1; j < spec.n; ++j)
    out[j] = out[0] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / n);
  return out;
}

ResonatorModel build_resonator(const ResonatorSpec& spec) {
  if (spec.n < 2) fail(ErrorCode::InvalidPatternSet, "resonator order n must be >= 2");
  if (spec.gamma1 < 0.0 || spec.gamma_n < 0.0 || spec.eta < 0.0)
    fail(ErrorCode::RateOutOfRange, "resonator rates must be non-negative");
  const double r = nominal_radius(spec);
  const double mean_n = r * r;
  if (static_cast<double>(spec.fock_dim) <= mean_n + 6.0 * std::sqrt(mean_n) || spec.fock_dim < 2)
    fail(ErrorCode::TruncationTooSmall, "fock_dim " + std::to_string(spec.fock_dim) +
                                            " too small for <n> = " + std::to_string(mean_n));
  const ComplexMatrix a = annihilation(spec.fock_dim);
  ComplexMatrix an = ComplexMatrix::Identity(a.rows(), a.cols());
  for (std::size_t k = 0; k < spec.n; ++k) an = an * a;
  const double nn = static_cast<double>(spec.n);
  const ComplexMatrix drive = std::polar(1.0, nn * spec.theta0) * an;
  ComplexMatrix h = spec.delta * a.adjoint() * a + kI * spec.eta * (drive - drive.adjoint());
  std::vector<JumpOperator> jumps;
  if (spec.gamma1 > 0.0) jumps.push_back({a, spec.gamma1});
  if (spec.gamma_n > 0.0) jumps.push_back({an, spec.gamma_n});

  std::vector<double> angles;
  for (std::size_t j = 0; j < spec.n; ++j)
    angles.push_back(2.0 * std::numbers::pi * static_cast<double>(j) / nn + spec.theta0);
  return {spec, build_liouvillian(h, std::move(jumps)), r, angles, mean_field_lobes(spec)};
}

ComplexMatrix parity_projector(std::size_t n, std::size_t mu, std::size_t fock_dim) {
  const auto d = static_cast<Eigen::Index>(fock_dim);
  ComplexMatrix p = ComplexMatrix::Zero(d, d);
  for (std::size_t m = mu % n; m < fock_dim; m += n) p(m, m) = 1.0;
  return p;
}

double check_truncation(const ComplexMatrix& rho, double tol) {
  const Eigen::Index top = rho.rows() - 1;
  const double tail = rho(top, top).real();
  if (tail > tol)
    fail(ErrorCode::TruncationTooSmall, "top Fock level population " + std::to_string(tail));
  return tail;
}

ComplexMatrix lobe_basin_projector(const ResonatorModel& model, std::size_t lobe,
                                   const QuadratureGrid& grid) {
  if (lobe >= model.lobes.size()) fail(ErrorCode::UnknownBlock, "no such lobe");
  if (grid.radial == 0 || grid.angular == 0)
    fail(ErrorCode::GridTooCoarse, "quadrature grid must have positive resolution");
  const std::size_t dim = model.spec.fock_dim;
  const auto d = static_cast<Eigen::Index>(dim);
  const double n = static_cast<double>(model.spec.n);
  const double r_max = grid.r_max > 0.0 ? grid.r_max : std::sqrt(static_cast<double>(dim));
  const double center = std::arg(model.lobes[lobe]);

  const Nodes rad = gauss_legendre(grid.radial, 0.0, r_max);
  const Nodes ang = gauss_legendre(grid.angular, center - std::numbers::pi / n,
                                   center + std::numbers::pi / n);

  // Angular factor depends on m - m' only.
  std::vector<Complex> angular(2 * dim - 1, Complex(0.0, 0.0));
  for (std::size_t k = 0; k < 2 * dim - 1; ++k) {
    const double diff = static_cast<double>(k) - static_cast<double>(dim - 1);
    for (std::size_t i = 0; i < ang.x.size(); ++i)
      angular[k] += ang.w[i] * std::polar(1.0, diff * ang.x[i]);
  }
  RealMatrix radial = RealMatrix::Zero(d, d);
  for (std::size_t i = 0; i < rad.x.size(); ++i) {
    const double r = rad.x[i];
    RealVector c(d);
    c(0) = std::exp(-0.5 * r * r);
    for (Eigen::Index m = 1; m < d; ++m) c(m) = c(m - 1) * r / std::sqrt(static_cast<double>(m));
    if (grid.normalize) c /= c.norm();
    radial.noalias() += rad.w[i] * r * c * c.transpose();
  }
  ComplexMatrix p(d, d);
  for (Eigen::Index m = 0; m < d; ++m)
    for (Eigen::Index mp = 0; mp < d; ++mp)
      p(m, mp) = radial(m, mp) * angular[static_cast<std::size_t>(m - mp + d - 1)] / std::numbers::pi;
  return hermitian_part(p);
}

BasinProjectors lobe_basin_projectors(const ResonatorModel& model, const QuadratureGrid& grid) {
  BasinProjectors out;
  const auto d = static_cast<Eigen::Index>(model.spec.fock_dim);
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (std::size_t j = 0; j < model.lobes.size(); ++j) {
    out.projectors.push_back(lobe_basin_projector(model, j, grid));
    total += out.projectors.back();
  }
  double rsq = 0.0;
  for (const auto& l : model.lobes) rsq = std::max(rsq, std::norm(l));
  const Eigen::Index k = std::min<Eigen::Index>(d, static_cast<Eigen::Index>(std::floor(rsq)) + 1);
  out.completeness_residual =
      max_abs(total.topLeftCorner(k, k) - ComplexMatrix::Identity(k, k));
  if (out.completeness_residual > 0.02)
    fail(ErrorCode::GridTooCoarse, "basin projectors deviate from the identity by " +
                                       std::to_string(out.completeness_residual));
  return out;
}

ClassificationReport lobe_classification_experiment(const ResonatorSpec& spec,
                                                    std::size_t n_inputs, double delta,
                                                    std::uint64_t seed,
                                                    const ClassificationOptions& options) {
  if (spec.gamma1 <= 0.0)
    fail(ErrorCode::RateOutOfRange, "classification needs linear damping gamma1 > 0");
  const ResonatorModel model = build_resonator(spec);
  const std::size_t m = spec.n;
  ClassificationReport rep;

  const Spectrum spectrum = spectrum_of(model.liouvillian, m + 3);
  rep.metastable_modes = metastable_mode_count(spectrum.eigenvalues, options.gap_threshold);
  const std::size_t nm = rep.metastable_modes;
  rep.tau_s = -1.0 / spectrum.eigenvalues[nm].real();
  rep.tau_f = -1.0 / spectrum.eigenvalues[nm - 1].real();
  rep.gap_ratio = rep.tau_f / rep.tau_s;
  check_truncation(spectrum.right.front());

  const BasinProjectors basins = lobe_basin_projectors(model, options.grid);
  std::vector<ComplexVector> lobe_states;
  for (const auto& l : model.lobes) lobe_states.push_back(coherent_state(l, spec.fock_dim));
  const UnambiguousPovm povm = unambiguous_povm(lobe_states);
  rep.povm_scale = povm.scale;

  const double radius = options.input_radius > 0.0 ? options.input_radius : std::abs(model.lobes[0]);
  Rng sampler(derive_seed(seed, 0));
  std::vector<ComplexVector> inputs;
  for (std::size_t attempts = 0; rep.inputs.size() < n_inputs; ++attempts) {
    if (attempts > 1000 * std::max<std::size_t>(1, n_inputs))
      fail(ErrorCode::BadProbability, "input acceptance rate too low for delta");
    Complex beta;
    if (options.exact_lobes) {
      beta = model.lobes[rep.inputs.size() % m];
    } else {
      const double rr = radius * std::sqrt(sampler.uniform());
      beta = std::polar(rr, 2.0 * std::numbers::pi * sampler.uniform());
    }
    const ComplexVector psi = coherent_state(beta, spec.fock_dim);
    std::size_t label = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double o = (psi.adjoint() * basins.projectors[j] * psi)(0, 0).real();
      if (o > best) {
        best = o;
        label = j;
      }
    }
    if (best < delta && !options.exact_lobes) continue;
    rep.inputs.push_back({beta, label, m, best});
    inputs.push_back(psi);
  }

  rep.t_measure = options.measure_factor * rep.tau_s;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(rep.t_measure / options.dt - 1e-9)));
  const double dt = rep.t_measure / static_cast<double>(steps);
  TrajectoryOptions topt;
  topt.record_every = steps;
  const JumpIntegrator integrator(model.liouvillian, dt, topt);
  std::vector<std::size_t> outcomes(n_inputs, m);
  parallel_for(n_inputs, options.threads, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, 1 + i);
    const TrajectoryRecord rec = integrator.run(inputs[i], static_cast<double>(steps) * dt, s);
    const DensityOperator final_state = DensityOperator::pure(rec.states.back());
    outcomes[i] = measure(povm.povm, final_state, derive_seed(s, 1)).outcome;
  });

  rep.n_inputs = n_inputs;
  rep.confusion.assign(m, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 0; i < n_inputs; ++i) {
    auto& in = rep.inputs[i];
    in.outcome = outcomes[i];
    ++rep.confusion[in.label][in.outcome];
    if (in.outcome == m) {
      ++rep.unclassified;
    } else if (in.outcome == in.label) {
      ++rep.correct;
    } else {
      ++rep.wrong;
    }
  }
  const std::size_t classified = rep.correct + rep.wrong;
  rep.accuracy = classified > 0 ? static_cast<double>(rep.correct) / static_cast<double>(classified) : 0.0;
  rep.unclassified_fraction = static_cast<double>(rep.unclassified) / static_cast<double>(n_inputs);
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t row_classified = 0;
    for (std::size_t k = 0; k < m; ++k) row_classified += rep.confusion[j][k];
    rep.per_class_accuracy.push_back(
        row_classified > 0 ? static_cast<double>(rep.confusion[j][j]) / static_cast<double>(row_classified)
                           : 0.0);
  }
  return rep;
}

CatPatterns cat_patterns(const ResonatorModel& model) {
  const std::size_t n = model.spec.n;
  const std::size_t dim = model.spec.fock_dim;
  CatPatterns out;
  for (std::size_t mu = 0; mu < n; ++mu) {
    ComplexVector c = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(mu * k) / static_cast<double>(n);
      c += std::polar(1.0, phase) * coherent_state(model.lobes[k], dim);
    }
    if (c.norm() < 1e-12) fail(ErrorCode::TruncationTooSmall, "cat state vanishes");
    out.states.push_back(c / c.norm());
  }
  double resid = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      resid = std::max(resid, std::abs(out.states[a].dot(out.states[b]) - (a == b ? 1.0 : 0.0)));
  out.gram_residual = resid;
  return out;
}

CatRunReport cat_error_correction_run(const ResonatorSpec& spec, double reset_time, double t_final,
                                      double dt, std::uint64_t seed, std::size_t record_every) {
  if (spec.gamma1 != 0.0) fail(ErrorCode::RateOutOfRange, "cat correction requires gamma1 = 0");
  if (!(reset_time >= 0.0 && reset_time <= t_final))
    fail(ErrorCode::LengthMismatch, "reset time must lie within the run");
  const ResonatorModel model = build_resonator(spec);
  const CatPatterns cats = cat_patterns(model);
  const ComplexVector& c0 = cats.states[0];
  const ComplexMatrix p0 = parity_projector(spec.n, 0, spec.fock_dim);
  TrajectoryOptions topt;
  topt.record_every = record_every;
  const JumpIntegrator integrator(model.liouvillian, dt, topt);

  CatRunReport rep;
  rep.reset_time = reset_time;
  rep.series.columns = {"t [1/rate units]", "overlap_C0 [probability]", "P_sector0 [population]"};
  const double parity0 = (c0.adjoint() * p0 * c0)(0, 0).real();
  auto push = [&](double t, const ComplexVector& psi, bool after) {
    const double ov = std::norm(c0.dot(psi));
    const double par = (psi.adjoint() * p0 * psi)(0, 0).real();
    rep.series.rows.push_back({t, ov, par});
    rep.parity_drift = std::max(rep.parity_drift, std::abs(par - parity0));
    if (after) rep.max_overlap_after_reset = std::max(rep.max_overlap_after_reset, ov);
  };

  const TrajectoryRecord before = integrator.run(c0, reset_time, derive_seed(seed, 0));
  for (std::size_t k = 0; k < before.times.size(); ++k) push(before.times[k], before.states[k], false);
  ComplexVector vacuum = ComplexVector::Zero(static_cast<Eigen::Index>(spec.fock_dim));
  vacuum(0) = 1.0;
  const TrajectoryRecord after = integrator.run(vacuum, t_final - reset_time, derive_seed(seed, 1));
  for (std::size_t k = 0; k < after.times.size(); ++k)
    push(reset_time + after.times[k], after.states[k], true);
  rep.final_overlap = rep.series.rows.back()[1];
  rep.jumps = before.jumps.size() + after.jumps.size();
  return rep;
}

}  // namespace qam
