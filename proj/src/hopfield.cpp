#include <cmath>
#include <numeric>
#include <string>

#include "qam/errors.hpp"
#include "qam/models.hpp"
#include "qam/parallel.hpp"
#include "qam/rng.hpp"

namespace qam {

namespace {

void require_spins(const std::vector<int>& s, std::size_t n) {
  if (s.size() != n)
    fail(ErrorCode::NotSpinVector, "spin vector of length " + std::to_string(s.size()) +
                                       ", expected " + std::to_string(n));
  for (int v : s)
    if (v != 1 && v != -1) fail(ErrorCode::NotSpinVector, "spin entries must be +1 or -1");
}

long long local_field(const HopfieldNet& net, const std::vector<int>& s, std::size_t i) {
  long long h = 0;
  for (std::size_t j = 0; j < net.n; ++j)
    h += static_cast<long long>(net.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) * s[j];
  return h;
}

}  // namespace

HopfieldNet make_hopfield(const std::vector<std::vector<int>>& patterns) {
  if (patterns.empty()) fail(ErrorCode::NotSpinVector, "at least one pattern is required");
  HopfieldNet net;
  net.n = patterns.front().size();
  if (net.n == 0) fail(ErrorCode::NotSpinVector, "empty pattern");
  for (const auto& p : patterns) require_spins(p, net.n);
  const auto n = static_cast<Eigen::Index>(net.n);
  net.weights = Eigen::MatrixXi::Zero(n, n);
  for (const auto& p : patterns)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) net.weights(i, j) += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(j)];
  net.scale = 1.0 / static_cast<double>(net.n);
  net.patterns = patterns;
  return net;
}

RealMatrix hebbian_couplings(const std::vector<std::vector<int>>& patterns) {
  return make_hopfield(patterns).couplings();
}

long long hopfield_energy_units(const HopfieldNet& net, const std::vector<int>& state) {
  require_spins(state, net.n);
  long long twice = 0;
  for (std::size_t i = 0; i < net.n; ++i) twice += state[i] * local_field(net, state, i);
  return -twice / 2;
}

double hopfield_energy(const HopfieldNet& net, const std::vector<int>& state) {
  return net.scale * static_cast<double>(hopfield_energy_units(net, state));
}

HopfieldRun hopfield_update(const HopfieldNet& net, const std::vector<int>& state,
                            std::size_t max_sweeps, std::uint64_t seed) {
  require_spins(state, net.n);
  HopfieldRun run;
  run.final_state = state;
  auto& s = run.final_state;
  long long energy = hopfield_energy_units(net, s);
  run.energies.push_back(energy);
  Rng rng(seed);
  std::vector<std::size_t> order(net.n);
  std::iota(order.begin(), order.end(), 0);
  while (run.sweeps < max_sweeps) {
    rng.shuffle(order);
    ++run.sweeps;
    std::size_t flips = 0;
    for (std::size_t i : order) {
      const long long h = local_field(net, s, i);
      const int target = h >= 0 ? 1 : -1;
      if (target == s[i]) continue;
      // Flipping s_i changes E by 2 s_i h_i in weight units.
      energy += 2LL * s[i] * h;
      s[i] = target;
      run.energies.push_back(energy);
      ++flips;
    }
    run.flips += flips;
    if (flips == 0) {
      run.converged = true;
      break;
    }
  }
  return run;
}

HopfieldExperiment hopfield_recall_experiment(std::size_t n, std::size_t m, double flip_fraction,
                                              std::size_t trials, std::uint64_t seed,
                                              std::size_t threads) {
  if (!(flip_fraction >= 0.0 && flip_fraction <= 1.0))
    fail(ErrorCode::BadProbability, "flip fraction must lie in [0, 1]");
  if (n == 0 || m == 0) fail(ErrorCode::NotSpinVector, "network needs neurons and patterns");
  struct Trial {
    bool success = false;
    bool monotone = true;
    double overlap = 0.0;
  };
  std::vector<Trial> results(trials);
  const auto flips = static_cast<std::size_t>(std::llround(flip_fraction * static_cast<double>(n)));
  parallel_for(trials, threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    Rng rng(trial_seed);
    std::vector<std::vector<int>> patterns(m, std::vector<int>(n));
    for (auto& p : patterns)
      for (auto& v : p) v = rng.uniform() < 0.5 ? -1 : 1;
    const HopfieldNet net = make_hopfield(patterns);
    const std::size_t target = rng.index(m);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    std::vector<int> probe = patterns[target];
    for (std::size_t k = 0; k < flips; ++k) probe[idx[k]] = -probe[idx[k]];
    const HopfieldRun run = hopfield_update(net, probe, 100, derive_seed(trial_seed, 1));
    Trial& out = results[t];
    for (std::size_t k = 1; k < run.energies.size(); ++k)
      if (run.energies[k] > run.energies[k - 1]) out.monotone = false;
    long long dot = 0;
    for (std::size_t i = 0; i < n; ++i) dot += run.final_state[i] * patterns[target][i];
    out.overlap = static_cast<double>(dot) / static_cast<double>(n);
    out.success = run.final_state == patterns[target];
  });
  HopfieldExperiment exp;
  exp.n = n;
  exp.patterns = m;
  exp.trials = trials;
  exp.flip_fraction = flip_fraction;
  double overlap = 0.0;
  for (const auto& r : results) {
    if (r.success) ++exp.successes;
    if (!r.monotone) exp.energy_monotone = false;
    overlap += r.overlap;
  }
  if (trials > 0) {
    exp.success_rate = static_cast<double>(exp.successes) / static_cast<double>(trials);
    exp.mean_overlap = overlap / static_cast<double>(trials);
  }
  return exp;
}

}  // namespace qam
