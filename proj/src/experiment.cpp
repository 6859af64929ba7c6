#include "meqc/experiment.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "meqc/csv.hpp"
#include "meqc/errors.hpp"
#include "meqc/solvers.hpp"

namespace meqc {

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kNone: return "none";
    case SweepParam::kEdgeCpu: return "edge_cpu";
    case SweepParam::kPhysicalQubits: return "physical_qubits";
    case SweepParam::kDecoherenceTime: return "decoherence_time";
    case SweepParam::kWeights: return "weights";
  }
  return "none";
}

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.line < 0) return "";
  return "line " + std::to_string(m.line + 1) + ": ";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& what) {
  throw ConfigError(where(node) + "'" + key + "' " + what);
}

// Reads the keys of one mapping section; rejects keys it was not asked for.
class Section {
 public:
  Section(const YAML::Node& node, std::string name) : node_(node), name_(std::move(name)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_, name_, "must be a mapping");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() || !node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first, qualified(key), "is not a recognized key");
    }
  }

  YAML::Node child(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node();
    return node_[key];
  }

  template <typename T>
  bool get(const std::string& key, T& out) {
    const YAML::Node n = child(key);
    if (!n || n.IsNull()) return false;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, qualified(key), "has the wrong type");
    }
    return true;
  }

  template <typename T>
  bool get_list(const std::string& key, std::vector<T>& out) {
    const YAML::Node n = child(key);
    if (!n || n.IsNull()) return false;
    if (!n.IsSequence()) fail(n, qualified(key), "must be a list");
    std::vector<T> values;
    for (const auto& item : n) {
      try {
        values.push_back(item.as<T>());
      } catch (const YAML::Exception&) {
        fail(item, qualified(key), "has an element of the wrong type");
      }
    }
    if (values.empty()) fail(n, qualified(key), "must not be empty");
    out = std::move(values);
    return true;
  }

  template <typename T>
  void get_range(const std::string& key, T& lo, T& hi) {
    std::vector<T> pair;
    if (!get_list(key, pair)) return;
    if (pair.size() != 2 || pair[0] > pair[1])
      fail(node_[key], qualified(key), "must be a [min, max] pair with min <= max");
    lo = pair[0];
    hi = pair[1];
  }

  template <typename T, typename Pred>
  void check(const std::string& key, const T& value, Pred ok, const std::string& rule) {
    if (!ok(value)) fail(node_ && node_.IsMap() && node_[key] ? node_[key] : node_, qualified(key), rule);
  }

  std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

 private:
  YAML::Node node_;
  std::string name_;
  std::set<std::string> seen_;
};

auto positive = [](double v) { return v > 0.0; };
auto nonnegative = [](double v) { return v >= 0.0; };
auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };

SweepParam parse_sweep_param(const std::string& name, const YAML::Node& node) {
  for (auto p : {SweepParam::kNone, SweepParam::kEdgeCpu, SweepParam::kPhysicalQubits,
                 SweepParam::kDecoherenceTime, SweepParam::kWeights})
    if (to_string(p) == name) return p;
  fail(node, "sweep.parameter", "must be one of edge_cpu, physical_qubits, decoherence_time, weights");
}

void parse_scenario(Section s, ExperimentConfig& cfg) {
  s.get("users", cfg.users);
  s.get("servers", cfg.servers);
  s.check("users", cfg.users, [](std::size_t v) { return v >= 1; }, "must be >= 1");
  s.check("servers", cfg.servers, [](std::size_t v) { return v >= 1; }, "must be >= 1");
  std::uint64_t seed = 0;
  if (s.get("seed", seed)) cfg.seeds = {seed};
  s.get_list("seeds", cfg.seeds);
}

void parse_workload(Section s, ScenarioRanges& r) {
  s.get_range("gain", r.gain_min, r.gain_max);
  s.check("gain", r.gain_min, positive, "must be > 0");
  s.get_range("tx_power", r.tx_power_min, r.tx_power_max);
  s.check("tx_power", r.tx_power_min, positive, "must be > 0");
  s.get("bandwidth", r.bandwidth);
  s.check("bandwidth", r.bandwidth, positive, "must be > 0");
  s.get("noise_power", r.noise_power);
  s.check("noise_power", r.noise_power, positive, "must be > 0");
  s.get_list("local_cpu", r.local_cpu);
  s.check("local_cpu", r.local_cpu, [](const auto& v) { return std::all_of(v.begin(), v.end(), positive); }, "values must be > 0");
  s.get_list("edge_cpu", r.edge_cpu);
  s.check("edge_cpu", r.edge_cpu, [](const auto& v) { return std::all_of(v.begin(), v.end(), positive); }, "values must be > 0");
  s.get_range("physical_qubits", r.physical_qubits_min, r.physical_qubits_max);
  s.check("physical_qubits", r.physical_qubits_min, [](int v) { return v >= 0; }, "must be >= 0");
  s.get_list("levels", r.levels);
  s.check("levels", r.levels, [](const auto& v) { return std::all_of(v.begin(), v.end(), [](int k) { return k >= 1 && k <= 3; }); }, "values must be in {1, 2, 3}");
  s.get_range("data_size", r.data_size_min, r.data_size_max);
  s.check("data_size", r.data_size_min, positive, "must be > 0");
  s.get_range("primitive_exponent", r.primitive_exponent_min, r.primitive_exponent_max);
  s.check("primitive_exponent", r.primitive_exponent_min, [&](int v) { return v >= 3 && r.primitive_exponent_max <= 9; }, "must lie in [3, 9]");
  s.get("coord_bits", r.coord_bits);
  s.check("coord_bits", r.coord_bits, [](int v) { return v >= 1; }, "must be >= 1");
  s.get_range("frames", r.frames_min, r.frames_max);
  s.get("weight_latency", r.weight_latency);
  s.check("weight_latency", r.weight_latency, unit, "must lie in [0, 1]");
  s.get("weight_energy", r.weight_energy);
  s.check("weight_energy", r.weight_energy, unit, "must lie in [0, 1]");
}

void parse_device(Section s, ExperimentConfig& cfg) {
  CryostatConfig& c = cfg.cryostat;
  QubitTech& q = cfg.qubit;
  s.get("attenuation_db", c.total_attenuation_db);
  s.check("attenuation_db", c.total_attenuation_db, nonnegative, "must be >= 0");
  s.get("stages", c.num_stages);
  s.check("stages", c.num_stages, [](int k) { return k >= 2; }, "must be >= 2");
  s.get("t_qubit", c.t_qubit);
  s.check("t_qubit", c.t_qubit, positive, "must be > 0");
  s.get("t_gen", c.t_gen);
  s.check("t_gen", c.t_gen, [&](double t) { return t > c.t_qubit; }, "must exceed t_qubit");
  s.get("heat_gen", c.heat_gen);
  s.check("heat_gen", c.heat_gen, nonnegative, "must be >= 0");
  s.get("heat_hemt", c.heat_hemt);
  s.check("heat_hemt", c.heat_hemt, nonnegative, "must be >= 0");
  s.get("t_hemt", c.t_hemt);
  s.check("t_hemt", c.t_hemt, positive, "must be > 0");
  s.get("heat_para", c.heat_para);
  s.check("heat_para", c.heat_para, nonnegative, "must be >= 0");
  s.get("t_para", c.t_para);
  s.check("t_para", c.t_para, positive, "must be > 0");
  s.get("frequency", q.frequency);
  s.check("frequency", q.frequency, positive, "must be > 0");
  s.get("decoherence_time", q.decoherence_time);
  s.check("decoherence_time", q.decoherence_time, positive, "must be > 0");
  s.get("tau_1qb", q.tau_1qb);
  s.check("tau_1qb", q.tau_1qb, positive, "must be > 0");
  s.get("tau_2qb", q.tau_2qb);
  s.check("tau_2qb", q.tau_2qb, positive, "must be > 0");
  s.get("tau_meas", q.tau_meas);
  s.check("tau_meas", q.tau_meas, positive, "must be > 0");
  s.get("tau_step", q.tau_step);
  s.check("tau_step", q.tau_step, [&](double t) { return t >= std::max({q.tau_1qb, q.tau_2qb, q.tau_meas}); },
          "must be >= every gate time");
  s.get("chip_coefficient", cfg.chip_coefficient);
  s.check("chip_coefficient", cfg.chip_coefficient, nonnegative, "must be >= 0");
  s.get("error_threshold", cfg.error_threshold);
  s.check("error_threshold", cfg.error_threshold, positive, "must be > 0");
  s.get("success_threshold", cfg.success_threshold);
  s.check("success_threshold", cfg.success_threshold, unit, "must lie in [0, 1]");
}

void parse_sweep(Section s, SweepSpec& sweep) {
  std::string name = to_string(sweep.param);
  YAML::Node pnode = s.child("parameter");
  if (pnode && !pnode.IsNull()) {
    name = pnode.as<std::string>();
    sweep.param = parse_sweep_param(name, pnode);
  }
  s.get_list("values", sweep.values);
  const std::string key = "values";
  switch (sweep.param) {
    case SweepParam::kEdgeCpu:
    case SweepParam::kDecoherenceTime:
      s.check(key, sweep.values, [](const auto& v) { return std::all_of(v.begin(), v.end(), positive); }, "must all be > 0");
      break;
    case SweepParam::kPhysicalQubits:
      s.check(key, sweep.values, [](const auto& v) { return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && x == std::floor(x); }); }, "must be non-negative integers");
      break;
    case SweepParam::kWeights:
      s.check(key, sweep.values, [](const auto& v) { return std::all_of(v.begin(), v.end(), unit); }, "must lie in [0, 1]");
      break;
    case SweepParam::kNone:
      break;
  }
}

void parse_environment(Section s, EnvConfig& env) {
  std::string rule;
  if (s.get("arbitration", rule)) {
    if (rule == "largest_saving") env.arbitration = Arbitration::kLargestSaving;
    else if (rule == "first_index") env.arbitration = Arbitration::kFirstIndex;
    else fail(s.child("arbitration"), "environment.arbitration", "must be largest_saving or first_index");
  }
  s.get("redraw_tasks", env.redraw_tasks);
}

void parse_train(Section s, TrainConfig& t) {
  s.get("epochs", t.epochs);
  s.check("epochs", t.epochs, [](int v) { return v >= 1; }, "must be >= 1");
  s.get("steps_per_epoch", t.steps_per_epoch);
  s.check("steps_per_epoch", t.steps_per_epoch, [](int v) { return v >= 1; }, "must be >= 1");
  s.get("updates_per_epoch", t.updates_per_epoch);
  s.check("updates_per_epoch", t.updates_per_epoch, [](int v) { return v >= 1; }, "must be >= 1");
  s.get("batch_size", t.batch_size);
  s.check("batch_size", t.batch_size, [](int v) { return v >= 1; }, "must be >= 1");
  s.get("discount", t.discount);
  s.check("discount", t.discount, unit, "must lie in [0, 1]");
  s.get("learning_rate", t.learning_rate);
  s.check("learning_rate", t.learning_rate, nonnegative, "must be >= 0");
  s.get("gae_lambda", t.gae_lambda);
  s.check("gae_lambda", t.gae_lambda, unit, "must lie in [0, 1]");
  s.get("clip_epsilon", t.clip_epsilon);
  s.check("clip_epsilon", t.clip_epsilon, positive, "must be > 0");
  s.get("entropy_coef", t.entropy_coef);
  s.check("entropy_coef", t.entropy_coef, nonnegative, "must be >= 0");
  s.get("value_coef", t.value_coef);
  s.check("value_coef", t.value_coef, nonnegative, "must be >= 0");
  s.get("max_grad_norm", t.max_grad_norm);
  s.get("normalize_advantages", t.normalize_advantages);
  s.get("hidden_units", t.hidden_units);
  s.check("hidden_units", t.hidden_units, [](int v) { return v >= 1; }, "must be >= 1");
  s.get("hidden_layers", t.hidden_layers);
  s.check("hidden_layers", t.hidden_layers, [](int v) { return v >= 1; }, "must be >= 1");
  s.get("reward_scale", t.reward_scale);
  s.check("reward_scale", t.reward_scale, nonnegative, "must be >= 0");
}

const std::set<std::string>& known_policies() {
  static const std::set<std::string> names = {"local", "random", "random_cloud", "greedy",
                                              "oracle", "classical_oracle", "ppo"};
  return names;
}

}  // namespace

ExperimentConfig parse_config(const std::string& document) {
  YAML::Node root;
  try {
    root = YAML::Load(document);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ExperimentConfig cfg;
  if (!root || root.IsNull()) return cfg;
  Section top(root, "");
  parse_scenario(Section(top.child("scenario"), "scenario"), cfg);
  parse_workload(Section(top.child("workload"), "workload"), cfg.ranges);
  parse_device(Section(top.child("device"), "device"), cfg);
  parse_sweep(Section(top.child("sweep"), "sweep"), cfg.sweep);
  parse_environment(Section(top.child("environment"), "environment"), cfg.environment);
  parse_train(Section(top.child("train"), "train"), cfg.train);
  {
    Section solver(top.child("solver"), "solver");
    double budget = static_cast<double>(cfg.exhaustive_budget);
    solver.get("exhaustive_budget", budget);
    solver.check("exhaustive_budget", budget, [](double b) { return b >= 1.0; }, "must be >= 1");
    cfg.exhaustive_budget = static_cast<std::uint64_t>(budget);
  }
  if (top.get_list("policies", cfg.policies)) {
    for (const auto& p : cfg.policies)
      if (!known_policies().count(p)) fail(root["policies"], "policies", "contains unknown policy '" + p + "'");
  }
  top.get("episodes", cfg.episodes);
  top.check("episodes", cfg.episodes, [](std::size_t e) { return e >= 1; }, "must be >= 1");
  top.get("output", cfg.output);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Scenario build_scenario(const ExperimentConfig& cfg, std::uint64_t seed) {
  Scenario sc = gen_scenario(cfg.users, cfg.servers, seed, cfg.ranges);
  sc.cryostat = cfg.cryostat;
  sc.qubit = cfg.qubit;
  sc.chip_coefficient = cfg.chip_coefficient;
  sc.error_threshold = cfg.error_threshold;
  sc.success_threshold = cfg.success_threshold;
  sc.validate();
  return sc;
}

void apply_sweep_value(Scenario& sc, SweepParam param, double value) {
  switch (param) {
    case SweepParam::kNone:
      return;
    case SweepParam::kEdgeCpu:
      for (auto& u : sc.users) u.profile.edge_cpu = value;
      break;
    case SweepParam::kPhysicalQubits:
      for (auto& s : sc.servers) s.physical_qubits = static_cast<int>(value);
      refresh_subscriptions(sc);
      break;
    case SweepParam::kDecoherenceTime:
      sc.qubit.decoherence_time = value;
      break;
    case SweepParam::kWeights:
      for (auto& u : sc.users) {
        u.profile.weight_latency = value;
        u.profile.weight_energy = 1.0 - value;
      }
      break;
  }
  sc.validate();
}

namespace {

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

}  // namespace

EvalStats evaluate_named(const std::string& policy, const Scenario& scenario,
                         const ExperimentConfig& cfg, std::uint64_t seed) {
  Environment env(scenario, cfg.environment);
  Rng rng(seed ^ name_hash(policy));
  Policy fn;
  if (policy == "ppo") {
    TrainConfig tc = cfg.train;
    tc.arbitration = cfg.environment.arbitration;
    tc.redraw_tasks = cfg.environment.redraw_tasks;
    fn = make_learned_policy(train(scenario, tc, seed).agents);
  } else if (policy == "oracle" || policy == "classical_oracle") {
    ExhaustiveOptions opts;
    opts.budget = cfg.exhaustive_budget;
    opts.allow_quantum = policy == "oracle";
    fn = [opts](const Environment& e, std::span<const Observation>, Rng&) {
      return to_raw(solve_exhaustive(e.scenario(), opts).action);
    };
  } else {
    fn = make_policy(parse_policy_kind(policy));
  }
  return evaluate(fn, env, cfg.episodes, rng);
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
  struct Job {
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double v : cfg.sweep.values)
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({v, seed});

  std::vector<std::vector<ResultRow>> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        Scenario sc = build_scenario(cfg, jobs[j].seed);
        apply_sweep_value(sc, cfg.sweep.param, jobs[j].value);
        for (const auto& policy : cfg.policies) {
          const EvalStats s = evaluate_named(policy, sc, cfg, jobs[j].seed);
          out[j].push_back({jobs[j].seed, policy, to_string(cfg.sweep.param), jobs[j].value,
                            s.mean_cost, s.mean_latency_cost, s.mean_energy_cost, s.qpu_grant_rate,
                            s.mean_success_prob});
        }
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ResultRow> rows;
  for (auto& chunk : out) rows.insert(rows.end(), chunk.begin(), chunk.end());
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.policy != b.policy) return a.policy < b.policy;
    return a.seed < b.seed;
  });
  return rows;
}

namespace {

const csv::Record kRowHeader = {"seed", "policy", "param", "value", "mean_cost", "latency_cost",
                                "energy_cost", "qpu_grant_rate", "mean_success_prob"};

}  // namespace

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::vector<csv::Record> records;
  records.reserve(rows.size());
  for (const auto& r : rows) {
    records.push_back({std::to_string(r.seed), r.policy, r.param, csv::format_number(r.value),
                       csv::format_number(r.mean_cost), csv::format_number(r.latency_cost),
                       csv::format_number(r.energy_cost), csv::format_number(r.qpu_grant_rate),
                       csv::format_number(r.mean_success_prob)});
  }
  return csv::render(kRowHeader, records);
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
  const auto records = csv::parse(text);
  if (records.empty() || records.front() != kRowHeader) throw ConfigError("results CSV: bad header");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != kRowHeader.size())
      throw ConfigError("results CSV: line " + std::to_string(i + 1) + " has wrong field count");
    rows.push_back({std::stoull(f[0]), f[1], f[2], std::stod(f[3]), std::stod(f[4]), std::stod(f[5]),
                    std::stod(f[6]), std::stod(f[7]), std::stod(f[8])});
  }
  return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  csv::write_file(path, rows_to_csv(rows));
}

std::string learning_curve_csv(const std::vector<EpochStats>& curve) {
  std::vector<csv::Record> records;
  for (const auto& e : curve)
    records.push_back({std::to_string(e.epoch), csv::format_number(e.mean_cost),
                       csv::format_number(e.policy_loss), csv::format_number(e.value_loss),
                       csv::format_number(e.entropy)});
  return csv::render({"epoch", "mean_cost", "policy_loss", "value_loss", "entropy"}, records);
}

}  // namespace meqc
