#include <fstream>
#include <sstream>

#include "json.hpp"
#include "meqc/errors.hpp"
#include "meqc/workload.hpp"

namespace meqc {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

json device_to_json(const Scenario& sc) {
  const auto& c = sc.cryostat;
  const auto& q = sc.qubit;
  return json{{"total_attenuation_db", c.total_attenuation_db},
              {"num_stages", c.num_stages},
              {"t_qubit", c.t_qubit},
              {"t_gen", c.t_gen},
              {"heat_gen", c.heat_gen},
              {"heat_hemt", c.heat_hemt},
              {"t_hemt", c.t_hemt},
              {"heat_para", c.heat_para},
              {"t_para", c.t_para},
              {"frequency", q.frequency},
              {"decoherence_time", q.decoherence_time},
              {"tau_1qb", q.tau_1qb},
              {"tau_2qb", q.tau_2qb},
              {"tau_meas", q.tau_meas},
              {"tau_step", q.tau_step},
              {"chip_coefficient", sc.chip_coefficient},
              {"error_threshold", sc.error_threshold},
              {"success_threshold", sc.success_threshold}};
}

void device_from_json(const json& j, Scenario& sc) {
  auto& c = sc.cryostat;
  auto& q = sc.qubit;
  read(j, "total_attenuation_db", c.total_attenuation_db);
  read(j, "num_stages", c.num_stages);
  read(j, "t_qubit", c.t_qubit);
  read(j, "t_gen", c.t_gen);
  read(j, "heat_gen", c.heat_gen);
  read(j, "heat_hemt", c.heat_hemt);
  read(j, "t_hemt", c.t_hemt);
  read(j, "heat_para", c.heat_para);
  read(j, "t_para", c.t_para);
  read(j, "frequency", q.frequency);
  read(j, "decoherence_time", q.decoherence_time);
  read(j, "tau_1qb", q.tau_1qb);
  read(j, "tau_2qb", q.tau_2qb);
  read(j, "tau_meas", q.tau_meas);
  read(j, "tau_step", q.tau_step);
  read(j, "chip_coefficient", sc.chip_coefficient);
  read(j, "error_threshold", sc.error_threshold);
  read(j, "success_threshold", sc.success_threshold);
}

json scales_to_json(const ObservationScales& s) {
  return json{{"f_local", s.f_local},           {"data_size", s.data_size},
              {"cycles_per_byte", s.cycles_per_byte}, {"logical_qubits", s.logical_qubits},
              {"logical_depth", s.logical_depth}, {"edge_cpu", s.edge_cpu},
              {"logical_capacity", s.logical_capacity}, {"level", s.level},
              {"tx_power", s.tx_power},         {"channel_gain", s.channel_gain}};
}

void scales_from_json(const json& j, ObservationScales& s) {
  read(j, "f_local", s.f_local);
  read(j, "data_size", s.data_size);
  read(j, "cycles_per_byte", s.cycles_per_byte);
  read(j, "logical_qubits", s.logical_qubits);
  read(j, "logical_depth", s.logical_depth);
  read(j, "edge_cpu", s.edge_cpu);
  read(j, "logical_capacity", s.logical_capacity);
  read(j, "level", s.level);
  read(j, "tx_power", s.tx_power);
  read(j, "channel_gain", s.channel_gain);
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
  json doc;
  doc["schema_version"] = Scenario::kSchemaVersion;
  doc["seed"] = sc.seed;
  json users = json::array();
  for (const auto& u : sc.users) {
    const auto& p = u.profile;
    std::vector<double> gains(p.channel_gains.data(), p.channel_gains.data() + p.channel_gains.size());
    users.push_back(json{{"f_local", p.f_local},
                         {"tx_power", p.tx_power},
                         {"weight_latency", p.weight_latency},
                         {"weight_energy", p.weight_energy},
                         {"channel_gains", gains},
                         {"edge_cpu", p.edge_cpu},
                         {"subscribed_logical_qubits", p.subscribed_logical_qubits},
                         {"primitive_exponent", u.primitive_exponent},
                         {"data_size", u.task.data_size},
                         {"cycles_per_byte", u.task.cycles_per_byte},
                         {"logical_qubits", u.quantum.logical_qubits},
                         {"logical_depth", u.quantum.logical_depth}});
  }
  doc["users"] = std::move(users);
  json servers = json::array();
  for (const auto& s : sc.servers) {
    servers.push_back(json{{"noise_power", s.noise_power},
                           {"bandwidth", s.bandwidth},
                           {"level", s.level},
                           {"physical_qubits", s.physical_qubits}});
  }
  doc["servers"] = std::move(servers);
  doc["device"] = device_to_json(sc);
  doc["observation_scales"] = scales_to_json(sc.scales);
  return doc.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != Scenario::kSchemaVersion)
      throw ConfigError("scenario: unsupported schema_version " + std::to_string(version));
    Scenario sc;
    read(doc, "seed", sc.seed);
    for (const auto& s : doc.at("servers")) {
      ServerProfile p;
      read(s, "noise_power", p.noise_power);
      read(s, "bandwidth", p.bandwidth);
      read(s, "level", p.level);
      read(s, "physical_qubits", p.physical_qubits);
      sc.servers.push_back(p);
    }
    for (const auto& u : doc.at("users")) {
      UserEntry entry;
      auto& p = entry.profile;
      read(u, "f_local", p.f_local);
      read(u, "tx_power", p.tx_power);
      read(u, "weight_latency", p.weight_latency);
      read(u, "weight_energy", p.weight_energy);
      const auto gains = u.at("channel_gains").get<std::vector<double>>();
      p.channel_gains = Eigen::Map<const Eigen::VectorXd>(gains.data(), static_cast<Eigen::Index>(gains.size()));
      read(u, "edge_cpu", p.edge_cpu);
      read(u, "subscribed_logical_qubits", p.subscribed_logical_qubits);
      read(u, "primitive_exponent", entry.primitive_exponent);
      read(u, "data_size", entry.task.data_size);
      read(u, "cycles_per_byte", entry.task.cycles_per_byte);
      entry.quantum.data_size = entry.task.data_size;
      read(u, "logical_qubits", entry.quantum.logical_qubits);
      read(u, "logical_depth", entry.quantum.logical_depth);
      sc.users.push_back(std::move(entry));
    }
    if (auto it = doc.find("device"); it != doc.end()) device_from_json(*it, sc);
    if (auto it = doc.find("observation_scales"); it != doc.end()) scales_from_json(*it, sc.scales);
    sc.validate();
    return sc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << scenario_to_json(scenario);
  if (!out) throw Error("write to " + path + " failed");
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

}  // namespace meqc
