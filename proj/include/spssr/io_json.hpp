#pragma once

// Flat-file formats: instance JSON and database JSON, both UTF-8 with
// 1-based message indices.
//
//   instance: {"q": int, "N": int, "K": int, "D": int,
//              "family": [[int,...],...], "seed": optional int}
//   database: {"q": int, "K": int, "L": int, "M": int,
//              "messages": [[int,...],...], "keys": [int,...]}

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>

#include "spssr/core.hpp"
#include "spssr/errors.hpp"
#include "spssr/simulate.hpp"

namespace spssr {

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw OutOfRange("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw OutOfRange("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline nlohmann::json instance_to_json(const Instance& instance) {
  nlohmann::json j{
      {"q", instance.params.field.value()},
      {"N", instance.params.servers},
      {"K", instance.params.messages},
      {"D", instance.params.demand_size},
      {"family", instance.family.sets},
  };
  if (instance.seed) j["seed"] = *instance.seed;
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  const FieldOrder field(j.at("q").get<std::uint32_t>());
  const int n = j.at("N").get<int>();
  const int k = j.at("K").get<int>();
  const int d = j.at("D").get<int>();
  DemandFamily family{k, d, {}};
  for (const auto& s : j.at("family")) {
    family.sets.push_back(s.get<IndexSet>());
  }
  family = canonicalized(std::move(family));
  Instance instance{
      derive_params(n, k, d, static_cast<int>(family.sets.size()), field),
      std::move(family),
      {},
  };
  if (j.contains("seed") && !j["seed"].is_null()) {
    instance.seed = j["seed"].get<std::uint64_t>();
  }
  return instance;
}

inline Instance load_instance(const std::string& path) {
  return instance_from_json(load_json_file(path));
}

inline nlohmann::json database_to_json(const Database& db) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& row : db.message_data) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(v.value());
    messages.push_back(std::move(r));
  }
  nlohmann::json keys = nlohmann::json::array();
  for (const auto& v : db.keys) keys.push_back(v.value());
  return nlohmann::json{{"q", db.field.value()},
                        {"K", db.messages},
                        {"L", db.subpackets},
                        {"M", db.keys.size()},
                        {"messages", std::move(messages)},
                        {"keys", std::move(keys)}};
}

inline Database database_from_json(const nlohmann::json& j) {
  const FieldOrder field(j.at("q").get<std::uint32_t>());
  const int k = j.at("K").get<int>();
  const int l = j.at("L").get<int>();
  const int m = j.at("M").get<int>();
  Database db{field, k, l, {}, {}};

  const auto& messages = j.at("messages");
  if (static_cast<int>(messages.size()) != k) {
    throw ShapeMismatch("database file: expected " + std::to_string(k) +
                        " messages");
  }
  auto element = [&](const nlohmann::json& v) {
    const std::uint64_t raw = v.get<std::uint64_t>();
    if (raw >= field.value()) {
      throw OutOfRange("database file: symbol " + std::to_string(raw) +
                       " not below field order");
    }
    return FieldElement(raw, field);
  };
  for (const auto& row : messages) {
    if (static_cast<int>(row.size()) != l) {
      throw ShapeMismatch("database file: every message needs " +
                          std::to_string(l) + " symbols");
    }
    std::vector<FieldElement> out;
    out.reserve(l);
    for (const auto& v : row) out.push_back(element(v));
    db.message_data.push_back(std::move(out));
  }
  const auto& keys = j.at("keys");
  if (static_cast<int>(keys.size()) != m) {
    throw ShapeMismatch("database file: expected " + std::to_string(m) +
                        " keys");
  }
  for (const auto& v : keys) db.keys.push_back(element(v));
  return db;
}

inline Database load_database(const std::string& path) {
  return database_from_json(load_json_file(path));
}

inline nlohmann::json result_to_json(const RetrievalResult& result) {
  nlohmann::json recovered = nlohmann::json::array();
  for (const auto& row : result.recovered) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(v.value());
    recovered.push_back(std::move(r));
  }
  return nlohmann::json{{"demand", result.demand},
                        {"recovered", std::move(recovered)},
                        {"symbols_downloaded", result.symbols_downloaded},
                        {"achieved_rate", to_string(result.achieved_rate)}};
}

inline nlohmann::json metrics_to_json(const RoundMetrics& metrics) {
  return nlohmann::json{{"demand", metrics.demand},
                        {"uplink_bits", metrics.uplink_bits},
                        {"downlink_symbols", metrics.downlink_symbols},
                        {"achieved_rate", to_string(metrics.achieved_rate)},
                        {"query_ms", metrics.query_ms},
                        {"answer_ms", metrics.answer_ms},
                        {"decode_ms", metrics.decode_ms}};
}

}  // namespace spssr
