#include <cmath>
#include <string>

#include "qam/errors.hpp"
#include "qam/lindblad.hpp"
#include "qam/linalg.hpp"
#include "qam/parallel.hpp"

namespace qam {

JumpIntegrator::JumpIntegrator(const Liouvillian& liouvillian, double dt, TrajectoryOptions options)
    : liouvillian_(&liouvillian), dt_(dt), options_(options),
      h_eff_(liouvillian.effective_hamiltonian()) {
  if (!(dt > 0.0)) fail(ErrorCode::StepTooLarge, "time step must be positive");
  if (options_.record_every == 0) options_.record_every = 1;
  for (const auto& j : liouvillian.jumps()) jump_ops_.push_back(std::sqrt(j.rate) * j.op);
  propagator(0);
}

const ComplexMatrix& JumpIntegrator::propagator(std::size_t level) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = propagators_[level];
  if (!slot) {
    const double h = std::ldexp(dt_, -static_cast<int>(level));
    slot = std::make_unique<ComplexMatrix>(expm(-kI * h * h_eff_));
  }
  return *slot;
}

void JumpIntegrator::advance(ComplexVector& psi, std::size_t level, double& threshold, double& t,
                             Rng& rng, TrajectoryRecord& rec) const {
  const ComplexMatrix& u = propagator(level);
  const double n0 = psi.squaredNorm();
  ComplexVector next = u * psi;
  const double n1 = next.squaredNorm();
  if ((n0 - n1) / n0 > options_.max_norm_loss) {
    if (level >= options_.max_halvings)
      fail(ErrorCode::StepTooLarge, "norm loss per step stays above " +
                                        std::to_string(options_.max_norm_loss) +
                                        " after repeated halving");
    advance(psi, level + 1, threshold, t, rng, rec);
    advance(psi, level + 1, threshold, t, rng, rec);
    return;
  }
  t += std::ldexp(dt_, -static_cast<int>(level));
  psi = std::move(next);
  if (n1 >= threshold || jump_ops_.empty()) return;

  std::vector<double> weights;
  double total = 0.0;
  for (const auto& f : jump_ops_) {
    weights.push_back((f * psi).squaredNorm());
    total += weights.back();
  }
  if (total <= 0.0) return;
  const double u_pick = rng.uniform() * total;
  std::size_t k = 0;
  double acc = weights[0];
  while (k + 1 < weights.size() && u_pick >= acc) acc += weights[++k];
  psi = jump_ops_[k] * psi;
  psi /= psi.norm();
  threshold = rng.uniform_open();
  rec.jumps.push_back({t, k});
}

TrajectoryRecord JumpIntegrator::run(const ComplexVector& psi0, double t_final,
                                     std::uint64_t seed) const {
  if (psi0.size() != liouvillian_->dim())
    fail(ErrorCode::DimMismatch, "state dimension differs from the generator");
  if (std::abs(psi0.norm() - 1.0) > 1e-9) fail(ErrorCode::InvalidState, "initial state not normalized");
  const double ratio = t_final / dt_;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (t_final < 0.0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
    fail(ErrorCode::LengthMismatch, "final time must be a non-negative multiple of dt");

  Rng rng(seed);
  TrajectoryRecord rec;
  ComplexVector psi = psi0;
  double threshold = rng.uniform_open();
  double t = 0.0;
  rec.times.push_back(0.0);
  rec.states.push_back(psi);
  for (std::size_t s = 1; s <= steps; ++s) {
    advance(psi, 0, threshold, t, rng, rec);
    if (s % options_.record_every == 0 || s == steps) {
      rec.times.push_back(static_cast<double>(s) * dt_);
      rec.states.push_back(psi / psi.norm());
    }
  }
  return rec;
}

TrajectoryRecord trajectory(const Liouvillian& liouvillian, const ComplexVector& psi0,
                            double t_final, double dt, std::uint64_t seed,
                            TrajectoryOptions options) {
  return JumpIntegrator(liouvillian, dt, options).run(psi0, t_final, seed);
}

EnsembleResult trajectory_ensemble(const JumpIntegrator& integrator, const ComplexVector& psi0,
                                   double t_final, std::size_t n_traj, std::uint64_t master_seed,
                                   std::size_t threads) {
  EnsembleResult out;
  const std::size_t chunk = std::max<std::size_t>(1, threads) * 8;
  for (std::size_t start = 0; start < n_traj; start += chunk) {
    const std::size_t count = std::min(chunk, n_traj - start);
    std::vector<TrajectoryRecord> recs(count);
    parallel_for(count, threads, [&](std::size_t i) {
      recs[i] = integrator.run(psi0, t_final, derive_seed(master_seed, start + i));
    });
    for (const auto& rec : recs) {
      if (out.times.empty()) {
        out.times = rec.times;
        const auto n = psi0.size();
        out.mean_states.assign(rec.times.size(), ComplexMatrix::Zero(n, n));
      }
      for (std::size_t k = 0; k < rec.states.size(); ++k)
        out.mean_states[k].noalias() += rec.states[k] * rec.states[k].adjoint();
    }
  }
  for (auto& m : out.mean_states) m /= static_cast<double>(n_traj);
  return out;
}

}  // namespace qam
