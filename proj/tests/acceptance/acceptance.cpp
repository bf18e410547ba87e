// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qam/capacity.hpp"
#include "qam/errors.hpp"
#include "qam/lindblad.hpp"
#include "qam/linalg.hpp"
#include "qam/models.hpp"
#include "qam/parallel.hpp"
#include "qam/qam_builder.hpp"
#include "qam/quantum_core.hpp"
#include "qam/runner.hpp"
#include "random_sets.hpp"

using namespace qam;

namespace {

int failures = 0;
std::size_t threads = 1;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct BuiltSet {
  testing::RandomSet rs;
  KrausChannel channel;
};

std::vector<BuiltSet> built;

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t max_n = 0, with_dfs = 0, with_orth = 0;
  bool all = true;
  for (std::uint64_t s = 0; s < 200; ++s) {
    testing::RandomSet rs = testing::random_pattern_set(1000 + s);
    KrausChannel ch = build_qam(rs.set, rs.layout);
    const CptpReport r = check_cptp(ch, 1e-10);
    all = all && r.passes && stable_and_mixing_disjoint(ch);
    worst = std::max(worst, r.max_residual());
    max_n = std::max(max_n, rs.layout.total_dim());
    with_dfs += rs.set.dfs.empty() ? 0 : 1;
    with_orth += rs.set.orthogonal.empty() ? 0 : 1;
    built.push_back({std::move(rs), std::move(ch)});
  }
  const double t = seconds_since(t0);
  report(1, "CPTP synthesis", all && worst < 1e-10 && max_n <= 16 && t < 60.0,
         fmt("200 sets, max residual %.2e, max N %.0f, %.0f with DFS, %.0f with orthogonal", worst,
             static_cast<double>(max_n), static_cast<double>(with_dfs), static_cast<double>(with_orth)) +
             fmt(", %.2f s", t));
}

void criteria_2_to_4() {
  std::vector<QamReport> reports(built.size());
  parallel_for(built.size(), threads, [&](std::size_t i) {
    reports[i] = validate_qam(built[i].channel, built[i].rs.set, built[i].rs.layout, 1e-10);
  });
  double fp = 0.0, conv = 0.0, rate = 0.0, leak = 0.0;
  bool converged = true;
  for (const auto& r : reports) {
    fp = std::max(fp, r.max_fixed_point());
    conv = std::max(conv, r.max_convergence());
    rate = std::max(rate, r.max_rate());
    leak = std::max(leak, r.max_leakage());
    for (const auto& p : r.patterns) converged = converged && p.converged;
  }
  report(2, "fixed points", fp < 1e-10, fmt("max trace distance %.2e", fp));
  report(3, "association", converged && conv < 1e-8 && rate < 1e-10,
         fmt("max distance to pattern %.2e, max transfer-rate error %.2e", conv, rate));
  report(4, "basin isolation", leak < 1e-10, fmt("max cross-basin leakage %.2e", leak));
}

void criterion_5() {
  const std::size_t m = 3;
  const std::vector<double> theta{0.3, 1.1, 2.4};
  double worst = 0.0;
  Rng rng(55);
  for (double q : {0.1, 0.5, 0.9}) {
    const std::vector<double> qs(m, q);
    const AmplitudeDampingChannel ad = local_amplitude_damping(qs, theta);
    const auto dim = static_cast<Eigen::Index>(2 * m);
    ComplexMatrix rho = random_density(dim, rng);
    // x: stable block, y: decaying block, z: stable-decaying coherences.
    ComplexMatrix x = rho.topLeftCorner(m, m), y = rho.bottomRightCorner(m, m), z = rho.topRightCorner(m, m);
    for (int r = 1; r <= 50; ++r) {
      rho = apply_channel(ad.channel, rho);
      ComplexMatrix nx(m, m), ny(m, m), nz(m, m);
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          const double overlap = std::cos(theta[a]) * std::cos(theta[b]) + std::sin(theta[a]) * std::sin(theta[b]);
          nx(a, b) = overlap * x(a, b) + std::sqrt(qs[a] * qs[b]) * y(a, b);
          ny(a, b) = std::sqrt((1 - qs[a]) * (1 - qs[b])) * y(a, b);
          nz(a, b) = std::cos(theta[a]) * std::sqrt(1 - qs[b]) * z(a, b);
        }
      x = nx;
      y = ny;
      z = nz;
      worst = std::max({worst, max_abs(rho.topLeftCorner(m, m) - x), max_abs(rho.bottomRightCorner(m, m) - y),
                        max_abs(rho.topRightCorner(m, m) - z), max_abs(rho.bottomLeftCorner(m, m) - z.adjoint())});
    }
  }
  report(5, "local amplitude damping oracle", worst < 1e-12, fmt("max deviation %.2e over 50 steps", worst));
}

void criterion_6() {
  bool ok = true;
  std::string bad;
  for (std::size_t n = 2; n <= 16; n += 2) {
    const DimensionAudit a = theorem1_dimension_audit(n);
    const bool this_ok = a.at_bound.accepted && !a.past_bound.accepted && a.past_bound.error &&
                         *a.past_bound.error == "ZeroBasin" && a.capacity_at_bound == Rational(1, 2) &&
                         a.saturates;
    if (!this_ok) bad += " N=" + std::to_string(n);
    ok = ok && this_ok;
  }
  report(6, "dimension envelope", ok, ok ? "N = 2..16: M = N/2 accepted at capacity 1/2, M = N/2 + 1 ZeroBasin" : "failed at" + bad);
}

void criterion_7() {
  ComplexVector psi(2);
  psi << std::cos(std::numbers::pi / 8), std::sin(std::numbers::pi / 8);
  bool ok = true;
  const GusMemory g2 = build_gus(3, 2, psi);
  ok = ok && g2.basin_states == std::vector<std::vector<std::size_t>>{{0, 2, 4, 6}, {1, 3, 5, 7}};
  const GusMemory g3 = build_gus(3, 3, psi);
  ok = ok && g3.basin_states == std::vector<std::vector<std::size_t>>{{0, 3, 6}, {1, 4, 7}, {2, 5}};
  double srm_err = 0.0;
  for (std::size_t m : {2u, 3u, 4u, 5u, 8u}) {
    const GusMemory g = build_gus(3, m, psi);
    const auto mm = static_cast<std::int64_t>(m);
    ok = ok && capacity_of(g.layout, g.patterns).alpha_q == Rational(mm, 10);
    // For M = 2 the rotation is -I and both patterns are the same ray.
    if (m >= 3) {
      const auto succ = success_probabilities(square_root_measurement(g.qubit_patterns), g.qubit_patterns);
      for (double s : succ) srm_err = std::max(srm_err, std::abs(s - 2.0 / static_cast<double>(m)));
    }
    const CapacityReport c = classical_capacity_of(g.layout, g.patterns, Rational(std::min<std::int64_t>(2, mm), mm));
    ok = ok && c.alpha_qc_exact == Rational(1, 5);
  }
  for (std::size_t n : {2u, 4u}) {
    const GusMemory g = build_gus(n, 3, psi);
    const auto big_n = static_cast<std::int64_t>(2 + (1u << n));
    ok = ok && capacity_of(g.layout, g.patterns).alpha_q == Rational(3, big_n);
    ok = ok && classical_capacity_of(g.layout, g.patterns, Rational(2, 3)).alpha_qc_exact == Rational(2, big_n);
  }
  report(7, "GUS golden values", ok && srm_err < 1e-10,
         std::string(ok ? "basins and exact capacities match" : "basin or capacity mismatch") +
             fmt(", max |P_succ - 2/M| over M = 3..8 %.2e", srm_err));
}

void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> times;
  for (int k = 0; k <= 50; ++k) times.push_back(k);
  const WalkSpec spec{3, {"011", "111"}, 1.0, 0.1, 0.0};
  const Table t = walk_retrieval_curve(spec, "000", {"011", "111"}, times);
  const double p011 = t.rows.back()[1];
  const auto states = evolve_grid(build_walk(spec).liouvillian, DensityOperator::basis(8, 0), times);
  double drift = 0.0;
  const ComplexMatrix j = pauli_z(0, 3);
  for (const auto& s : states) drift = std::max(drift, std::abs(s.expectation(j) - 1.0));
  WalkSpec mixing = spec;
  mixing.kappa = 2.0;
  const Table late = walk_retrieval_curve(mixing, "000", {"011", "111"}, {0.0, 50.0, 500.0});
  const double a = late.rows.back()[1], b = late.rows.back()[2];
  const bool ok = p011 > 1 - 1e-6 && drift < 1e-8 && a >= 0.45 && a <= 0.55 && b >= 0.45 && b <= 0.55;
  report(8, "walk retrieval", ok,
         fmt("kappa=0: P_011(50) = %.9f, symmetry drift %.1e; kappa=2: P = (%.3f, %.3f)", p011, drift, a, b) +
             fmt(", %.2f s", seconds_since(t0)));
}

void criterion_9() {
  const auto t0 = std::chrono::steady_clock::now();
  ResonatorSpec spec;  // n=3, gamma_3=0.2, eta=1.56, delta=0.4, theta0=0, gamma_1=1, fock 40
  ClassificationOptions opt;
  opt.threads = threads;
  const ClassificationReport weak = lobe_classification_experiment(spec, 100, 0.5, 2024, opt);
  const ClassificationReport strong = lobe_classification_experiment(spec, 100, 0.8, 2024, opt);
  const bool ok = weak.accuracy >= 0.90 && strong.accuracy == 1.0 && strong.wrong == 0;
  report(9, "resonator classification", ok,
         fmt("delta=0.5: accuracy %.3f (%.0f wrong, %.0f inconclusive)", weak.accuracy, static_cast<double>(weak.wrong),
             static_cast<double>(weak.unclassified)) +
             fmt("; delta=0.8: accuracy %.3f (%.0f wrong); %.0f s", strong.accuracy, static_cast<double>(strong.wrong),
                 seconds_since(t0)));
}

void criterion_10() {
  ResonatorSpec spec;
  spec.gamma1 = 0.0;
  const CatRunReport r = cat_error_correction_run(spec, 2.0, 10.0, 0.002, 7, 10);
  report(10, "cat-state correction", r.max_overlap_after_reset > 0.99 && r.parity_drift < 1e-6,
         fmt("overlap after reset %.5f, final %.5f, sector drift %.1e", r.max_overlap_after_reset, r.final_overlap,
             r.parity_drift));
}

void criterion_11() {
  const HopfieldExperiment low = hopfield_recall_experiment(100, 10, 0.1, 200, 11, threads);
  const HopfieldExperiment high = hopfield_recall_experiment(100, 20, 0.1, 200, 11, threads);
  const bool ok = low.success_rate > 0.9 && high.success_rate < 0.5 && low.energy_monotone && high.energy_monotone;
  report(11, "Hopfield baseline", ok,
         fmt("M=10 success %.3f, M=20 success %.3f, energy monotone ", low.success_rate, high.success_rate) +
             (low.energy_monotone && high.energy_monotone ? "yes" : "NO"));
}

void criterion_12() {
  double structure = 0.0, coherence = 0.0, bound = 0.0;
  Rng rng(12);
  auto check = [&](const KrausChannel& ch, const std::vector<std::size_t>& stable, bool decay) {
    const auto s = static_cast<Eigen::Index>(stable.size());
    std::vector<ComplexMatrix> ops;
    for (const auto& k : ch.ops()) {
      ComplexMatrix ks(s, s);
      for (Eigen::Index a = 0; a < s; ++a)
        for (Eigen::Index b = 0; b < s; ++b) ks(a, b) = k(stable[a], stable[b]);
      if (max_abs(ks) > 0.0) ops.push_back(ks);
    }
    const KrausChannel restricted(ops);
    const ChoiMatrix j = choi_of(restricted);
    for (Eigen::Index r = 0; r < s * s; ++r)
      for (Eigen::Index c = 0; c < s * s; ++c) {
        const bool diag_r = r % s == r / s, diag_c = c % s == c / s;
        Complex expected = 0.0;
        if (diag_r && diag_c)
          for (const auto& k : ops) expected += k(r % s, r % s) * std::conj(k(c % s, c % s));
        structure = std::max(structure, std::abs(j.matrix(r, c) - expected));
        if (diag_r && r == c) structure = std::max(structure, std::abs(j.matrix(r, c) - 1.0));
        if (diag_r && diag_c && r != c) bound = std::max(bound, std::abs(j.matrix(r, c)));
      }
    if (!decay) return;
    for (Eigen::Index a = 0; a < s; ++a)
      for (Eigen::Index b = 0; b < s; ++b) {
        if (a == b) continue;
        ComplexMatrix x = ComplexMatrix::Zero(s, s);
        x(a, b) = 1.0;
        coherence = std::max(coherence, max_abs(iterate_channel(restricted, x, 100)));
      }
  };
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    // Built memories with up to four stable labels.
    PatternSet set;
    const std::size_t m = 2 + seed % 3;
    for (std::size_t i = 0; i < m; ++i) set.orthogonal.push_back({ComplexMatrix::Ones(1, 1), 1 + (seed + i) % 2});
    set.decay = DecayProfile::uniform(0.1 + 0.9 * rng.uniform());
    const SpaceLayout layout = build_layout(set.layout_spec());
    check(build_qam(set, layout), layout.stable_indices(), true);
    // Arbitrary diagonal stable parts.
    std::vector<double> q(m), th(m);
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = rng.uniform();
      th[i] = 2 * std::numbers::pi * rng.uniform();
    }
    const AmplitudeDampingChannel ad = local_amplitude_damping(q, th);
    check(ad.channel, ad.layout.stable_indices(), false);
  }
  report(12, "Choi reduction", structure < 1e-12 && bound <= 1.0 + 1e-12 && coherence < 1e-8,
         fmt("structure error %.1e, max |1+gamma| %.6f, coherence after 100 steps %.1e", structure, bound, coherence));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_13() {
  namespace fs = std::filesystem;
  std::vector<Json> configs;
  configs.push_back(*find_preset("resonator-fig5-strong"));
  Json classify = *find_preset("resonator-fig5-weak");
  classify["parameters"]["n_inputs"] = 20;
  configs.push_back(classify);
  configs.push_back(Json::parse(R"({"model": "walk", "experiment": "trajectory",
    "parameters": {"patterns": ["011", "111"], "initial": "000", "t_final": 10.0, "dt": 0.01,
                   "trajectories": 200}, "seed": 3})"));
  configs.push_back(Json::parse(R"({"model": "hopfield", "experiment": "hopfield",
    "parameters": {"n": 100, "patterns": 14, "flip_fraction": 0.1, "trials": 100}, "seed": 4})"));
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      RunOptions o;
      o.threads = threads;
      o.output_dir = fs::temp_directory_path() / ("qam_acceptance_det_" + std::to_string(i) + "_" + std::to_string(rep));
      const RunResult r = run_config(configs[i], o);
      const std::string text = slurp(*o.output_dir / "results.json");
      if (r.exit_code != 0) ok = false;
      if (rep == 0) first = text;
      else if (text != first) ok = false;
    }
    detail += (i ? ", " : "") + configs[i]["model"].get<std::string>() + "/" + configs[i]["experiment"].get<std::string>();
  }
  report(13, "determinism", ok, "byte-identical reruns of " + detail);
}

}  // namespace

int main() {
  threads = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<std::function<void()>> steps{criterion_1, criteria_2_to_4, criterion_5, criterion_6,
                                                 criterion_7, criterion_8, criterion_9, criterion_10,
                                                 criterion_11, criterion_12, criterion_13};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      std::printf("FAIL    unexpected error: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
