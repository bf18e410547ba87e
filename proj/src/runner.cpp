#include "qam/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "qam/capacity.hpp"
#include "qam/errors.hpp"
#include "qam/lindblad.hpp"
#include "qam/linalg.hpp"
#include "qam/models.hpp"
#include "qam/qam_builder.hpp"

namespace qam {

namespace {

// Strict view of a JSON object: every key must be consumed.
class Fields {
 public:
  Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(ErrorCode::ConfigParse, where_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& raw(const std::string& key) {
    if (!j_.contains(key)) fail(ErrorCode::ConfigParse, where_ + ": missing key '" + key + "'");
    used_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const Json& v = raw(key);
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::ConfigParse, where_ + ": bad value for '" + key + "': " + v.dump());
    }
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) fail(ErrorCode::ConfigParse, where_ + ": unknown key '" + key + "'");
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> used_;
};

struct Context {
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  double tolerance = 1e-10;
  Json metrics = Json::object();
  std::vector<std::pair<std::string, Table>> tables;
  Json matrices = Json::object();

  std::uint64_t require_seed() const {
    if (!seed) fail(ErrorCode::ConfigParse, "experiment '" + experiment + "' requires a seed");
    return *seed;
  }
};

[[noreturn]] void unsupported(const std::string& model, const std::string& experiment) {
  fail(ErrorCode::UnknownExperiment,
       "experiment '" + experiment + "' is not available for model '" + model + "'");
}

std::vector<double> linspace(double t_final, std::size_t points) {
  if (points < 2) fail(ErrorCode::ConfigParse, "points must be at least 2");
  std::vector<double> t(points);
  for (std::size_t k = 0; k < points; ++k)
    t[k] = t_final * static_cast<double>(k) / static_cast<double>(points - 1);
  return t;
}

// ---- Kraus-channel memories ----

struct KrausModel {
  std::string name;
  KrausChannel channel;
  SpaceLayout layout;
  PatternSet set;
  std::optional<GusMemory> gus;
};

PatternSet parse_pattern_set(const Json& j) {
  Fields f(j, "model");
  PatternSet set;
  const double kappa = f.get<double>("kappa", 0.5);
  set.decay = DecayProfile::uniform(kappa);
  if (f.has("orthogonal")) {
    for (const auto& item : f.raw("orthogonal")) {
      Fields p(item, "orthogonal pattern");
      OrthogonalPattern op;
      if (p.has("state")) {
        const ComplexVector v = vector_from_json(p.raw("state"));
        op.rho = v * v.adjoint();
      } else {
        op.rho = matrix_from_json(p.raw("rho"));
      }
      op.decaying_dim = p.get<std::size_t>("decaying_dim", 1);
      p.finish();
      set.orthogonal.push_back(std::move(op));
    }
  }
  if (f.has("dfs")) {
    for (const auto& item : f.raw("dfs")) {
      Fields g(item, "dfs group");
      DfsGroup group;
      group.dim = g.get<std::size_t>("dim");
      for (const auto& v : g.raw("patterns")) group.patterns.push_back(vector_from_json(v));
      group.decaying_dims = g.get<std::vector<std::size_t>>(
          "decaying_dims", std::vector<std::size_t>(group.patterns.size(), 1));
      g.finish();
      set.dfs.push_back(std::move(group));
    }
  }
  f.finish();
  return set;
}

KrausModel build_kraus_model(const std::string& name, const Json& model, Fields& p) {
  if (name == "qam") {
    PatternSet set = parse_pattern_set(model);
    SpaceLayout layout = build_layout(set.layout_spec());
    KrausChannel channel = build_qam(set, layout);
    return {name, std::move(channel), std::move(layout), std::move(set), std::nullopt};
  }
  if (name == "gus") {
    const auto n = p.get<std::size_t>("n_qubits", 3);
    const auto m = p.get<std::size_t>("pattern_count", 3);
    ComplexVector psi(2);
    psi << std::cos(std::numbers::pi / 8), std::sin(std::numbers::pi / 8);
    if (p.has("psi")) psi = vector_from_json(p.raw("psi"));
    const double kappa = p.get<double>("kappa", 0.5);
    GusMemory g = build_gus(n, m, psi, DecayProfile::uniform(kappa));
    KrausModel km{name, g.channel, g.layout, g.patterns, std::nullopt};
    km.gus = std::move(g);
    return km;
  }
  if (name == "amplitude_damping") {
    const auto q = p.get<std::vector<double>>("q");
    const auto theta = p.get<std::vector<double>>("theta");
    AmplitudeDampingChannel ch = local_amplitude_damping(q, theta);
    PatternSet set;
    for (std::size_t mu = 0; mu < q.size(); ++mu) {
      set.orthogonal.push_back({ComplexMatrix::Ones(1, 1), 1});
      set.decay.set_kappa({BlockKind::Stable, mu, 0}, 0, q[mu]);
    }
    return {name, std::move(ch.channel), std::move(ch.layout), std::move(set), std::nullopt};
  }
  fail(ErrorCode::ConfigParse, "unknown model '" + name + "'");
}

void run_kraus(const KrausModel& km, Fields& p, Context& ctx) {
  const CptpReport cptp = check_cptp(km.channel, ctx.tolerance);
  ctx.metrics["dim"] = km.layout.total_dim();
  ctx.metrics["kraus_operators"] = km.channel.size();
  ctx.metrics["cptp"] = to_json(cptp);
  if (ctx.experiment == "validate") {
    const QamReport rep = validate_qam(km.channel, km.set, km.layout, ctx.tolerance);
    ctx.metrics["validation"] = to_json(rep);
    ctx.metrics["passes"] = cptp.passes && rep.passes;
    return;
  }
  if (ctx.experiment == "retrieve") {
    const auto decaying = km.layout.decaying_indices();
    if (decaying.empty()) fail(ErrorCode::ZeroBasin, "layout has no decaying states");
    const auto start = p.get<std::size_t>("initial_index", decaying.front());
    const auto iterations = p.get<std::size_t>("iterations", 50);
    if (start >= km.layout.total_dim()) fail(ErrorCode::ConfigParse, "initial_index out of range");
    const auto patterns = km.layout.patterns();
    std::vector<ComplexMatrix> basins;
    Table t;
    t.columns.push_back("r [applications]");
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      basins.push_back(projector_onto(km.layout.basin_blocks(patterns[i]), km.layout));
      t.columns.push_back("P_basin" + std::to_string(i) + " [population]");
    }
    const auto dim = static_cast<Eigen::Index>(km.layout.total_dim());
    ComplexMatrix rho = DensityOperator::basis(dim, static_cast<Eigen::Index>(start)).matrix();
    for (std::size_t r = 0; r <= iterations; ++r) {
      std::vector<double> row{static_cast<double>(r)};
      for (const auto& b : basins) row.push_back((b * rho).trace().real());
      t.rows.push_back(std::move(row));
      rho = apply_channel(km.channel, rho);
    }
    const DensityOperator final_state = DensityOperator::trusted(rho);
    Json dist = Json::array();
    for (const auto& ref : patterns)
      dist.push_back(trace_distance(final_state.matrix(), pattern_state(km.set, km.layout, ref).matrix()));
    ctx.metrics["initial_index"] = start;
    ctx.metrics["trace_distance_to_patterns"] = dist;
    ctx.tables.emplace_back("retrieval", std::move(t));
    return;
  }
  if (ctx.experiment == "capacity") {
    if (km.gus) {
      const Povm srm = square_root_measurement(km.gus->qubit_patterns);
      const auto succ = success_probabilities(srm, km.gus->qubit_patterns);
      double mean = 0.0;
      for (double s : succ) mean += s;
      mean /= static_cast<double>(succ.size());
      const auto m = static_cast<std::int64_t>(km.gus->qubit_patterns.size());
      const CapacityReport numeric = classical_capacity_of(km.layout, km.set, std::min(1.0, mean));
      const CapacityReport exact =
          classical_capacity_of(km.layout, km.set, Rational(std::min<std::int64_t>(2, m), m));
      ctx.metrics["srm_success"] = succ;
      ctx.metrics["srm_success_mean"] = mean;
      ctx.metrics["capacity"] = to_json(numeric);
      ctx.metrics["capacity_at_optimal_success"] = to_json(exact);
      return;
    }
    const double p_succ = p.get<double>("p_succ", 1.0);
    const double c = p.get<double>("asymptotic_constant", 1.0);
    ctx.metrics["capacity"] = to_json(classical_capacity_of(km.layout, km.set, p_succ, c));
    return;
  }
  unsupported(km.name, ctx.experiment);
}

// ---- Lindblad models ----

void emit_spectrum(const Spectrum& s, Context& ctx) {
  Table t;
  t.columns = {"k [mode]", "Re_lambda [1/time]", "Im_lambda [1/time]"};
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
    t.rows.push_back({static_cast<double>(k), s.eigenvalues[k].real(), s.eigenvalues[k].imag()});
  ctx.metrics["total_modes"] = s.total_modes;
  ctx.metrics["biorthogonality_residual"] = s.biorthogonality_residual;
  ctx.tables.emplace_back("spectrum", std::move(t));
}

void emit_manifold(const MetastableManifold& m, Context& ctx) {
  ctx.metrics["metastable_modes"] = m.n;
  ctx.metrics["gap_ratio"] = m.gap_ratio;
  ctx.metrics["tau_s"] = m.tau_s;
  ctx.metrics["tau_f"] = m.tau_f;
  ctx.metrics["completeness_residual"] = m.completeness_residual;
  ctx.metrics["cluster_sizes"] = m.cluster_sizes;
  Json overlaps = Json::array();
  for (Eigen::Index i = 0; i < m.overlaps.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.overlaps.cols(); ++j) row.push_back(m.overlaps(i, j));
    overlaps.push_back(row);
  }
  ctx.matrices["basin_overlaps"] = overlaps;
}

void run_walk(Fields& p, Context& ctx) {
  WalkSpec spec;
  spec.n_qubits = p.get<std::size_t>("n_qubits", 3);
  spec.patterns = p.get<std::vector<std::string>>("patterns", {"011", "111"});
  spec.gamma = p.get<double>("gamma", 1.0);
  spec.eta = p.get<double>("eta", 0.1);
  spec.kappa = p.get<double>("kappa", 0.0);
  if (ctx.experiment == "retrieve") {
    const auto initial = p.get<std::string>("initial", "000");
    const auto times = linspace(p.get<double>("t_final", 50.0), p.get<std::size_t>("points", 101));
    const auto kappas = p.get<std::vector<double>>("kappas", {spec.kappa});
    Json finals = Json::array();
    for (std::size_t i = 0; i < kappas.size(); ++i) {
      WalkSpec s = spec;
      s.kappa = kappas[i];
      Table t = walk_retrieval_curve(s, initial, spec.patterns, times);
      Json last = Json::object();
      for (std::size_t c = 1; c < t.columns.size(); ++c) last[t.columns[c]] = t.rows.back()[c];
      finals.push_back(Json{{"kappa", kappas[i]}, {"final", last}});
      ctx.tables.emplace_back("retrieval_kappa" + std::to_string(i), std::move(t));
    }
    ctx.metrics["kappas"] = kappas;
    ctx.metrics["final_populations"] = finals;
    return;
  }
  const WalkModel model = build_walk(spec);
  ctx.metrics["dim"] = model.layout.total_dim();
  ctx.metrics["unassigned"] = model.layout.unassigned();
  if (ctx.experiment == "spectrum") {
    emit_spectrum(spectrum_of(model.liouvillian, p.get<std::size_t>("modes", 8)), ctx);
    return;
  }
  if (ctx.experiment == "metastable") {
    const Spectrum s = spectrum_of(model.liouvillian, p.get<std::size_t>("modes", 8));
    emit_manifold(detect_metastable_manifold(s, p.get<double>("threshold", 10.0)), ctx);
    return;
  }
  if (ctx.experiment == "trajectory") {
    const std::uint64_t seed = ctx.require_seed();
    const auto initial = p.get<std::string>("initial", "000");
    const double t_final = p.get<double>("t_final", 20.0);
    const double dt = p.get<double>("dt", 0.01);
    TrajectoryOptions topt;
    topt.record_every = p.get<std::size_t>("record_every", 10);
    const auto n_traj = p.get<std::size_t>("trajectories", 100);
    const JumpIntegrator integrator(model.liouvillian, dt, topt);
    ComplexVector psi0 = ComplexVector::Zero(static_cast<Eigen::Index>(model.layout.total_dim()));
    psi0(static_cast<Eigen::Index>(bitstring_index(initial))) = 1.0;
    const EnsembleResult ens = trajectory_ensemble(integrator, psi0, t_final, n_traj, seed, ctx.threads);
    Table t;
    t.columns.push_back("t [1/rate units]");
    for (const auto& pat : spec.patterns) t.columns.push_back("P_" + pat + " [population]");
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
      std::vector<double> row{ens.times[k]};
      for (std::size_t idx : model.pattern_indices)
        row.push_back(ens.mean_states[k](static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)).real());
      t.rows.push_back(std::move(row));
    }
    ctx.metrics["trajectories"] = n_traj;
    ctx.tables.emplace_back("trajectory_ensemble", std::move(t));
    return;
  }
  unsupported("walk", ctx.experiment);
}

ResonatorSpec parse_resonator(Fields& p) {
  ResonatorSpec s;
  s.n = p.get<std::size_t>("n", s.n);
  s.delta = p.get<double>("delta", s.delta);
  s.eta = p.get<double>("eta", s.eta);
  s.theta0 = p.get<double>("theta0", s.theta0);
  s.gamma1 = p.get<double>("gamma1", s.gamma1);
  s.gamma_n = p.get<double>("gamma_n", s.gamma_n);
  s.fock_dim = p.get<std::size_t>("fock_dim", s.fock_dim);
  return s;
}

void run_resonator(Fields& p, Context& ctx) {
  const ResonatorSpec spec = parse_resonator(p);
  if (ctx.experiment == "classify") {
    ClassificationOptions opt;
    opt.measure_factor = p.get<double>("measure_factor", opt.measure_factor);
    opt.dt = p.get<double>("dt", opt.dt);
    opt.input_radius = p.get<double>("input_radius", opt.input_radius);
    opt.gap_threshold = p.get<double>("threshold", opt.gap_threshold);
    opt.exact_lobes = p.get<bool>("exact_lobes", opt.exact_lobes);
    opt.threads = ctx.threads;
    const auto n_inputs = p.get<std::size_t>("n_inputs", 100);
    const double delta = p.get<double>("basin_delta", 0.5);
    const ClassificationReport r =
        lobe_classification_experiment(spec, n_inputs, delta, ctx.require_seed(), opt);
    ctx.metrics["n_inputs"] = r.n_inputs;
    ctx.metrics["basin_delta"] = delta;
    ctx.metrics["accuracy"] = r.accuracy;
    ctx.metrics["correct"] = r.correct;
    ctx.metrics["wrong"] = r.wrong;
    ctx.metrics["unclassified"] = r.unclassified;
    ctx.metrics["unclassified_fraction"] = r.unclassified_fraction;
    ctx.metrics["per_class_accuracy"] = r.per_class_accuracy;
    ctx.metrics["povm_scale"] = r.povm_scale;
    ctx.metrics["tau_s"] = r.tau_s;
    ctx.metrics["tau_f"] = r.tau_f;
    ctx.metrics["gap_ratio"] = r.gap_ratio;
    ctx.metrics["t_measure"] = r.t_measure;
    ctx.matrices["confusion"] = r.confusion;
    Table t;
    t.columns = {"Re_beta [amplitude]", "Im_beta [amplitude]", "label [lobe]", "outcome [lobe]",
                 "overlap [probability]"};
    for (const auto& in : r.inputs)
      t.rows.push_back({in.beta.real(), in.beta.imag(), static_cast<double>(in.label),
                        static_cast<double>(in.outcome), in.overlap});
    ctx.tables.emplace_back("inputs", std::move(t));
    return;
  }
  if (ctx.experiment == "trajectory") {
    const double t_final = p.get<double>("t_final", 10.0);
    const double reset = p.get<double>("reset_time", 2.0);
    const double dt = p.get<double>("dt", 0.002);
    const auto every = p.get<std::size_t>("record_every", 10);
    CatRunReport r = cat_error_correction_run(spec, reset, t_final, dt, ctx.require_seed(), every);
    ctx.metrics["reset_time"] = r.reset_time;
    ctx.metrics["max_overlap_after_reset"] = r.max_overlap_after_reset;
    ctx.metrics["final_overlap"] = r.final_overlap;
    ctx.metrics["parity_drift"] = r.parity_drift;
    ctx.metrics["jumps"] = r.jumps;
    ctx.tables.emplace_back("cat_overlap", std::move(r.series));
    return;
  }
  const ResonatorModel model = build_resonator(spec);
  ctx.metrics["nominal_radius"] = model.nominal_radius;
  ctx.metrics["nominal_angles"] = model.nominal_angles;
  Json lobes = Json::array();
  for (const auto& l : model.lobes) lobes.push_back(to_json(l));
  ctx.metrics["lobes"] = lobes;
  const auto modes = p.get<std::size_t>("modes", spec.n + 3);
  if (ctx.experiment == "spectrum") {
    emit_spectrum(spectrum_of(model.liouvillian, modes), ctx);
    return;
  }
  if (ctx.experiment == "metastable") {
    const Spectrum s = spectrum_of(model.liouvillian, modes);
    std::vector<ComplexMatrix> probes;
    const auto count = p.get<std::size_t>("probes", 24);
    for (std::size_t k = 0; k < count; ++k) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      const ComplexVector c = coherent_state(std::polar(std::abs(model.lobes[0]), phi), spec.fock_dim);
      probes.push_back(c * c.adjoint());
    }
    emit_manifold(detect_metastable_manifold(s, p.get<double>("threshold", 10.0), probes), ctx);
    return;
  }
  unsupported("resonator", ctx.experiment);
}

void run_hopfield(Fields& p, Context& ctx) {
  if (ctx.experiment != "hopfield") unsupported("hopfield", ctx.experiment);
  const auto n = p.get<std::size_t>("n", 100);
  const auto m = p.get<std::size_t>("patterns", 10);
  const double flip = p.get<double>("flip_fraction", 0.1);
  const auto trials = p.get<std::size_t>("trials", 200);
  const HopfieldExperiment e = hopfield_recall_experiment(n, m, flip, trials, ctx.require_seed(), ctx.threads);
  ctx.metrics["n"] = e.n;
  ctx.metrics["patterns"] = e.patterns;
  ctx.metrics["load"] = static_cast<double>(e.patterns) / static_cast<double>(e.n);
  ctx.metrics["trials"] = e.trials;
  ctx.metrics["flip_fraction"] = e.flip_fraction;
  ctx.metrics["successes"] = e.successes;
  ctx.metrics["success_rate"] = e.success_rate;
  ctx.metrics["mean_overlap"] = e.mean_overlap;
  ctx.metrics["energy_monotone"] = e.energy_monotone;
}

const std::set<std::string> kExperiments{"validate",  "retrieve", "spectrum",   "metastable",
                                         "classify",  "capacity", "trajectory", "hopfield"};

using KeySet = std::set<std::string>;

struct ModelKeys {
  KeySet model;
  std::map<std::string, KeySet> experiments;
};

const std::map<std::string, ModelKeys>& known_keys() {
  static const std::map<std::string, ModelKeys> keys = {
      {"walk",
       {{"n_qubits", "patterns", "gamma", "eta", "kappa"},
        {{"retrieve", {"initial", "t_final", "points", "kappas"}},
         {"spectrum", {"modes"}},
         {"metastable", {"modes", "threshold"}},
         {"trajectory", {"initial", "t_final", "dt", "record_every", "trajectories"}}}}},
      {"resonator",
       {{"n", "delta", "eta", "theta0", "gamma1", "gamma_n", "fock_dim"},
        {{"classify",
          {"measure_factor", "dt", "input_radius", "threshold", "exact_lobes", "n_inputs",
           "basin_delta"}},
         {"trajectory", {"t_final", "reset_time", "dt", "record_every"}},
         {"spectrum", {"modes"}},
         {"metastable", {"modes", "threshold", "probes"}}}}},
      {"hopfield", {{}, {{"hopfield", {"n", "patterns", "flip_fraction", "trials"}}}}},
      {"gus",
       {{"n_qubits", "pattern_count", "psi", "kappa"},
        {{"validate", {}}, {"retrieve", {"initial_index", "iterations"}}, {"capacity", {}}}}},
      {"amplitude_damping",
       {{"q", "theta"},
        {{"validate", {}},
         {"retrieve", {"initial_index", "iterations"}},
         {"capacity", {"p_succ", "asymptotic_constant"}}}}},
      {"qam",
       {{},
        {{"validate", {}},
         {"retrieve", {"initial_index", "iterations"}},
         {"capacity", {"p_succ", "asymptotic_constant"}}}}},
  };
  return keys;
}

// Rejects unknown models, unsupported experiments and misspelled parameters
// before anything is computed.
void check_keys(const std::string& model, const std::string& experiment, const Json& params) {
  const auto& table = known_keys();
  const auto it = table.find(model);
  if (it == table.end()) fail(ErrorCode::ConfigParse, "unknown model '" + model + "'");
  const auto exp = it->second.experiments.find(experiment);
  if (exp == it->second.experiments.end()) unsupported(model, experiment);
  if (!params.is_object()) fail(ErrorCode::ConfigParse, "parameters must be an object");
  for (const auto& [key, value] : params.items())
    if (!it->second.model.count(key) && !exp->second.count(key))
      fail(ErrorCode::ConfigParse, "parameters: unknown key '" + key + "' for " + model + "/" + experiment);
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"walk-fig4",
       "hypercube walk, n=3, patterns 011/111, eta/gamma=0.1, kappa sweep",
       Json{{"model", "walk"},
            {"experiment", "retrieve"},
            {"parameters",
             {{"n_qubits", 3},
              {"patterns", {"011", "111"}},
              {"gamma", 1.0},
              {"eta", 0.1},
              {"initial", "000"},
              {"t_final", 50.0},
              {"points", 101},
              {"kappas", {0.0, 0.1, 0.5, 1.0, 2.0}}}},
            {"seed", 1}}},
      {"resonator-fig5-weak",
       "3-photon resonator, gamma1=1, lobe classification at delta=0.5",
       Json{{"model", "resonator"},
            {"experiment", "classify"},
            {"parameters",
             {{"n", 3},
              {"delta", 0.4},
              {"eta", 1.56},
              {"theta0", 0.0},
              {"gamma1", 1.0},
              {"gamma_n", 0.2},
              {"fock_dim", 40},
              {"n_inputs", 100},
              {"basin_delta", 0.5}}},
            {"seed", 2024}}},
      {"resonator-fig5-strong",
       "3-photon resonator, gamma1=0, cat state recovery after a vacuum reset",
       Json{{"model", "resonator"},
            {"experiment", "trajectory"},
            {"parameters",
             {{"n", 3},
              {"delta", 0.4},
              {"eta", 1.56},
              {"theta0", 0.0},
              {"gamma1", 0.0},
              {"gamma_n", 0.2},
              {"fock_dim", 40},
              {"reset_time", 2.0},
              {"t_final", 10.0},
              {"dt", 0.002},
              {"record_every", 10}}},
            {"seed", 7}}},
      {"gus-sec7c",
       "geometrically uniform states, n=3 decaying qubits, M=3 patterns: capacities",
       Json{{"model", "gus"},
            {"experiment", "capacity"},
            {"parameters", {{"n_qubits", 3}, {"pattern_count", 3}, {"kappa", 0.5}}},
            {"seed", 1}}},
  };
  return list;
}

std::optional<Json> find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p.config;
  return std::nullopt;
}

Json execute(const Json& config, const RunOptions& options) {
  Fields top(config, "config");
  Context ctx;
  ctx.experiment = top.get<std::string>("experiment");
  if (!kExperiments.count(ctx.experiment))
    fail(ErrorCode::UnknownExperiment, "unknown experiment '" + ctx.experiment + "'");
  if (top.has("seed")) ctx.seed = top.get<std::uint64_t>("seed");
  if (options.seed_override) ctx.seed = options.seed_override;
  ctx.threads = std::max<std::size_t>(1, options.threads);
  if (options.tolerance) ctx.tolerance = *options.tolerance;
  std::string format = "json";
  if (top.has("output")) {
    Fields out(top.raw("output"), "output");
    if (out.has("path")) out.get<std::string>("path");
    format = out.get<std::string>("format", "json");
    out.finish();
    if (format != "json" && format != "csv")
      fail(ErrorCode::ConfigParse, "output format must be 'json' or 'csv'");
  }
  const Json empty = Json::object();
  const Json& params = top.has("parameters") ? top.raw("parameters") : empty;
  Fields p(params, "parameters");
  const Json& model = top.raw("model");
  top.finish();
  if (!model.is_object() && !model.is_string())
    fail(ErrorCode::ConfigParse, "model must be a name or a pattern set");
  check_keys(model.is_object() ? "qam" : model.get<std::string>(), ctx.experiment, params);

  if (model.is_object()) {
    const KrausModel km = build_kraus_model("qam", model, p);
    run_kraus(km, p, ctx);
  } else {
    const auto name = model.get<std::string>();
    if (name == "walk") {
      run_walk(p, ctx);
    } else if (name == "resonator") {
      run_resonator(p, ctx);
    } else if (name == "hopfield") {
      run_hopfield(p, ctx);
    } else {
      const KrausModel km = build_kraus_model(name, Json::object(), p);
      run_kraus(km, p, ctx);
    }
  }

  Json bundle;
  bundle["config"] = config;
  bundle["metrics"] = ctx.metrics;
  Json tables = Json::object();
  for (const auto& [name, table] : ctx.tables) {
    Json entry{{"file", name + ".csv"}, {"columns", table.columns}};
    if (format == "json") entry["rows"] = table.rows;
    tables[name] = entry;
  }
  bundle["tables"] = tables;
  bundle["matrices"] = ctx.matrices;
  bundle["provenance"] = Json{{"version", kVersion},
                              {"seed", ctx.seed ? Json(*ctx.seed) : Json(nullptr)},
                              {"threads", ctx.threads},
                              {"tolerance", ctx.tolerance}};
  bundle["csv"] = Json::object();
  for (const auto& [name, table] : ctx.tables) bundle["csv"][name] = to_csv(table);
  return bundle;
}

RunResult run_config(const Json& config, const RunOptions& options) {
  RunResult result;
  const auto start = std::chrono::steady_clock::now();
  try {
    Json bundle = execute(config, options);
    const Json csv = bundle["csv"];
    bundle.erase("csv");
    std::filesystem::path dir;
    if (options.output_dir) {
      dir = *options.output_dir;
    } else if (config.contains("output") && config["output"].contains("path")) {
      dir = config["output"]["path"].get<std::string>();
    } else if (const char* env = std::getenv(kOutputDirEnv)) {
      dir = env;
    } else {
      dir = "qam_output";
    }
    std::filesystem::create_directories(dir);
    write_text(dir / "results.json", bundle.dump(2) + "\n");
    for (const auto& [name, text] : csv.items()) write_text(dir / (name + ".csv"), text.get<std::string>());
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text(dir / "timing.json", Json{{"wall_seconds", wall}}.dump(2) + "\n");
    result.output_dir = dir;
    result.bundle = std::move(bundle);
    const Json& m = result.bundle["metrics"];
    if (m.contains("passes") && !m["passes"].get<bool>()) {
      result.exit_code = 2;
      result.message = "validation failed";
    }
  } catch (const Error& e) {
    const bool config_error =
        e.code() == ErrorCode::ConfigParse || e.code() == ErrorCode::UnknownExperiment;
    result.exit_code = config_error ? 3 : 2;
    result.message = e.what();
  } catch (const nlohmann::json::exception& e) {
    result.exit_code = 3;
    result.message = std::string("ConfigParse: ") + e.what();
  }
  return result;
}

RunResult run_source(const std::string& source, const RunOptions& options) {
  Json config;
  if (std::filesystem::exists(source)) {
    std::ifstream in(source);
    std::stringstream text;
    text << in.rdbuf();
    try {
      config = Json::parse(text.str());
    } catch (const nlohmann::json::parse_error& e) {
      RunResult r;
      r.exit_code = 3;
      r.message = std::string("ConfigParse: ") + e.what();
      return r;
    }
  } else if (auto preset = find_preset(source)) {
    config = *preset;
  } else {
    RunResult r;
    r.exit_code = 3;
    r.message = "ConfigParse: no config file or preset named '" + source + "'";
    return r;
  }
  return run_config(config, options);
}

}  // namespace qam
