// Command-line driver: instance generation, retrieval rounds over both
// transports, audits, the answer server, and parameter sweeps.
//
// Exit codes: 0 success, 1 validation failure, 2 audit failure,
// 3 transport failure.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "spssr/spssr.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitAuditFailure = 2;
constexpr int kExitTransport = 3;

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

std::uint64_t effective_seed(std::optional<std::uint64_t> cli_seed,
                             std::optional<std::uint64_t> fallback = {}) {
  if (const char* env = std::getenv("SPSSR_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  if (cli_seed) return *cli_seed;
  if (fallback) return *fallback;
  return 0;
}

spssr::IndexSet parse_demand(const std::string& spec) {
  spssr::IndexSet demand;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string item = spec.substr(
        start, comma == std::string::npos ? comma : comma - start);
    if (!item.empty()) demand.push_back(std::stoi(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return demand;
}

// "N=2:5,K=3:8,D=2:4,q=257"; single values allowed ("N=3").
struct GridSpec {
  int n_lo = 2, n_hi = 5;
  int k_lo = 3, k_hi = 8;
  int d_lo = 2, d_hi = 7;
  std::uint32_t q = 257;
};

GridSpec parse_grid(const std::string& spec) {
  GridSpec grid;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string item = spec.substr(
        start, comma == std::string::npos ? comma : comma - start);
    if (!item.empty()) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos) {
        throw spssr::OutOfRange("grid item '" + item + "' has no '='");
      }
      const std::string key = item.substr(0, eq);
      const std::string range = item.substr(eq + 1);
      const std::size_t colon = range.find(':');
      const int lo = std::stoi(range.substr(0, colon));
      const int hi = colon == std::string::npos
                         ? lo
                         : std::stoi(range.substr(colon + 1));
      if (key == "N") {
        grid.n_lo = lo;
        grid.n_hi = hi;
      } else if (key == "K") {
        grid.k_lo = lo;
        grid.k_hi = hi;
      } else if (key == "D") {
        grid.d_lo = lo;
        grid.d_hi = hi;
      } else if (key == "q") {
        grid.q = static_cast<std::uint32_t>(lo);
      } else {
        throw spssr::OutOfRange("unknown grid key '" + key + "'");
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return grid;
}

/// K cyclic windows of width D: always a structurally valid, protocol-ready
/// family (every index is excluded by the window starting just after it).
spssr::DemandFamily windows_family(int messages, int demand_size) {
  spssr::DemandFamily family{messages, demand_size, {}};
  for (int start = 1; start <= messages; ++start) {
    spssr::IndexSet w;
    for (int offset = 0; offset < demand_size; ++offset) {
      w.push_back((start - 1 + offset) % messages + 1);
    }
    family.sets.push_back(spssr::sorted(w));
  }
  std::sort(family.sets.begin(), family.sets.end());
  family.sets.erase(std::unique(family.sets.begin(), family.sets.end()),
                    family.sets.end());
  return family;
}

void print_params(const spssr::SchemeParams& p) {
  std::cout << "N=" << p.servers << " K=" << p.messages << " D="
            << p.demand_size << " q=" << p.field.value() << "\n";
  std::cout << "G=" << p.group_size << " L=" << p.subpacketization
            << " M=" << p.key_count << " rate=" << spssr::to_string(p.rate)
            << " ratio=" << spssr::to_string(p.randomness_ratio) << "\n";
}

spssr::Database database_for(const spssr::Instance& instance,
                             const std::string& db_path) {
  if (!db_path.empty()) return spssr::load_database(db_path);
  if (instance.seed) {
    spssr::SeededSource rng(*instance.seed);
    return spssr::gen_database(instance.params, rng);
  }
  throw spssr::OutOfRange(
      "no database: pass --db or put a seed in the instance file");
}

int cmd_params(int servers, int messages, int demand_size, std::uint32_t q) {
  auto params = spssr::derive_params(servers, messages, demand_size, 2,
                                     spssr::FieldOrder(q));
  print_params(params);
  std::cout << spssr::comparison_csv(spssr::comparison_table(params));
  return kExitOk;
}

int cmd_gen(int servers, int messages, int demand_size, std::uint32_t q,
            const std::string& family_path, bool use_full_family,
            std::optional<std::uint64_t> seed_opt, const std::string& out) {
  spssr::DemandFamily family{messages, demand_size, {}};
  if (use_full_family) {
    family = spssr::full_family(messages, demand_size);
  } else if (!family_path.empty()) {
    auto j = spssr::load_json_file(family_path);
    const auto& sets = j.is_array() ? j : j.at("family");
    for (const auto& s : sets) family.sets.push_back(s.get<spssr::IndexSet>());
    family = spssr::canonicalized(std::move(family));
  } else {
    std::cerr << "gen: need --family <file> or --full-family\n";
    return kExitValidation;
  }

  auto params = spssr::derive_params(servers, messages, demand_size,
                                     static_cast<int>(family.sets.size()),
                                     spssr::FieldOrder(q));
  const auto report = spssr::validate_family(family);
  if (!report.sizes_all_d || !report.indices_in_range || !report.no_duplicates ||
      family.sets.size() < 2) {
    std::cerr << "gen: demand family is not usable:\n";
    for (const auto& p : report.problems) std::cerr << "  - " << p << "\n";
    return kExitValidation;
  }
  if (!report.protocol_ready) {
    std::cerr << "gen: note: family is usable but not normalized:\n";
    for (const auto& p : report.problems) std::cerr << "  - " << p << "\n";
  }

  const std::uint64_t seed = effective_seed(seed_opt);
  spssr::Instance instance{params, family, seed};
  spssr::SeededSource rng(seed);
  auto db = spssr::gen_database(params, rng);

  spssr::save_json_file(out + ".instance.json", spssr::instance_to_json(instance));
  spssr::save_json_file(out + ".db.json", spssr::database_to_json(db));
  std::cout << "wrote " << out << ".instance.json and " << out << ".db.json\n";
  return kExitOk;
}

int cmd_run(const std::string& instance_path, const std::string& db_path,
            const std::string& demand_spec, const std::string& tcp_spec,
            std::optional<std::uint64_t> seed_opt) {
  auto instance = spssr::load_instance(instance_path);
  const spssr::IndexSet demand = parse_demand(demand_spec);
  const std::uint64_t seed = effective_seed(seed_opt, instance.seed);

  // One stream: database draws first (matching gen), then query bits.
  spssr::SeededSource rng(seed);
  spssr::Database db = db_path.empty() && instance.seed
                           ? spssr::gen_database(instance.params, rng)
                           : database_for(instance, db_path);

  spssr::RoundArtifacts artifacts;
  spssr::RetrievalResult result{{}, {}, 0, spssr::Rational(0)};
  spssr::RoundMetrics metrics;
  if (tcp_spec.empty()) {
    std::tie(result, metrics) = spssr::simulate_round(
        instance.params, instance.family, demand, rng, spssr::Transport::in_process,
        &db, {}, &artifacts);
  } else {
    std::tie(result, metrics) = spssr::simulate_round(
        instance.params, instance.family, demand, rng, spssr::Transport::tcp,
        nullptr, spssr::parse_endpoints(tcp_spec), &artifacts);
  }

  bool recovered_ok = true;
  for (std::size_t pos = 0; pos < result.demand.size(); ++pos) {
    for (int l = 1; l <= instance.params.subpacketization; ++l) {
      if (result.recovered[pos][l - 1] != db.symbol(result.demand[pos], l)) {
        recovered_ok = false;
      }
    }
  }

  nlohmann::json out{{"result", spssr::result_to_json(result)},
                     {"metrics", spssr::metrics_to_json(metrics)},
                     {"recovered_matches_database", recovered_ok}};
  std::cout << out.dump(2) << "\n";
  return recovered_ok ? kExitOk : kExitValidation;
}

int cmd_audit(const std::string& which, const std::string& instance_path,
              bool exhaustive, long samples, double significance,
              std::optional<std::uint64_t> seed_opt, const std::string& out) {
  auto instance = spssr::load_instance(instance_path);
  const std::uint64_t seed = effective_seed(seed_opt, instance.seed);

  nlohmann::json reports = nlohmann::json::array();
  bool pass = true;
  auto add = [&](const spssr::AuditReport& r) {
    reports.push_back(r.to_json());
    pass = pass && r.pass;
  };

  if (which == "correctness") {
    add(spssr::audit_correctness(instance.params, instance.family,
                                 exhaustive ? spssr::CorrectnessMode::exhaustive
                                            : spssr::CorrectnessMode::sampled,
                                 samples, seed));
  } else if (which == "privacy") {
    if (exhaustive) {
      add(spssr::audit_privacy_exact(instance.params, instance.family));
    } else {
      add(spssr::audit_privacy_statistical(instance.params, instance.family,
                                           samples, significance, seed));
    }
  } else if (which == "security") {
    for (const auto& w : instance.family.sets) {
      add(spssr::audit_security_exact(instance.params, instance.family, w));
    }
  } else if (which == "metrics") {
    add(spssr::verify_metrics(instance.params));
  } else {
    std::cerr << "audit: unknown kind '" << which << "'\n";
    return kExitValidation;
  }

  const nlohmann::json output =
      reports.size() == 1 ? reports.front() : nlohmann::json{{"reports", reports}};
  std::cout << output.dump(2) << "\n";
  if (!out.empty()) spssr::save_json_file(out, output);
  return pass ? kExitOk : kExitAuditFailure;
}

int cmd_serve(std::uint16_t port, const std::string& db_path, int server_index) {
  auto db = spssr::load_database(db_path);
  spssr::Server server(port, std::move(db));
  server.start();
  std::cerr << "server " << server_index << " listening on 127.0.0.1:"
            << server.port() << "\n";

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  return kExitOk;
}

int cmd_bench(const std::string& grid_spec, const std::string& out,
              std::optional<std::uint64_t> seed_opt) {
  const GridSpec grid = parse_grid(grid_spec);
  const std::uint64_t seed = effective_seed(seed_opt);

  std::string csv =
      "N,K,D,q,G,L,M,rate,randomness_ratio,subpacketization,"
      "query_ms,answer_ms,decode_ms\n";
  spssr::SeededSource rng(seed);
  for (int n = grid.n_lo; n <= grid.n_hi; ++n) {
    for (int k = grid.k_lo; k <= grid.k_hi; ++k) {
      for (int d = grid.d_lo; d <= std::min(grid.d_hi, k - 1); ++d) {
        auto family = windows_family(k, d);
        auto params = spssr::derive_params(
            n, k, d, static_cast<int>(family.sets.size()),
            spssr::FieldOrder(grid.q));
        auto db = spssr::gen_database(params, rng);
        auto [result, metrics] = spssr::simulate_round(
            params, family, family.sets.front(), rng,
            spssr::Transport::in_process, &db);
        csv += std::to_string(n) + "," + std::to_string(k) + "," +
               std::to_string(d) + "," + std::to_string(grid.q) + "," +
               std::to_string(params.group_size) + "," +
               std::to_string(params.subpacketization) + "," +
               std::to_string(params.key_count) + "," +
               spssr::to_string(params.rate) + "," +
               spssr::to_string(params.randomness_ratio) + "," +
               std::to_string(params.subpacketization) + "," +
               std::to_string(metrics.query_ms) + "," +
               std::to_string(metrics.answer_ms) + "," +
               std::to_string(metrics.decode_ms) + "\n";
      }
    }
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream file(out);
    file << csv;
    std::cout << "wrote " << out << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secure and private structured-subset retrieval"};
  app.require_subcommand(1);

  // params
  int p_n = 0, p_k = 0, p_d = 0;
  std::uint32_t p_q = 257;
  auto* params_cmd =
      app.add_subcommand("params", "derived parameters and scheme comparison");
  params_cmd->add_option("N", p_n, "server count")->required();
  params_cmd->add_option("K", p_k, "message count")->required();
  params_cmd->add_option("D", p_d, "demand size")->required();
  params_cmd->add_option("--q", p_q, "field order (default 257)");

  // gen
  int g_n = 0, g_k = 0, g_d = 0;
  std::uint32_t g_q = 257;
  std::string g_family, g_out = "instance";
  bool g_full = false;
  std::optional<std::uint64_t> g_seed;
  auto* gen_cmd = app.add_subcommand("gen", "write instance and database files");
  gen_cmd->add_option("--n", g_n, "server count")->required();
  gen_cmd->add_option("--k", g_k, "message count")->required();
  gen_cmd->add_option("--d", g_d, "demand size")->required();
  gen_cmd->add_option("--q", g_q, "field order (default 257)");
  gen_cmd->add_option("--family", g_family, "JSON file with candidate sets");
  gen_cmd->add_flag("--full-family", g_full, "use all D-subsets of [1:K]");
  gen_cmd->add_option("--seed", g_seed, "database seed (SPSSR_SEED overrides)");
  gen_cmd->add_option("--out", g_out, "output prefix (default 'instance')");

  // run
  std::string r_instance, r_db, r_demand, r_tcp;
  std::optional<std::uint64_t> r_seed;
  auto* run_cmd = app.add_subcommand("run", "execute one retrieval round");
  run_cmd->add_option("--instance", r_instance, "instance file")->required();
  run_cmd->add_option("--db", r_db, "database file (default: regenerate from seed)");
  run_cmd->add_option("--demand", r_demand, "demand set, e.g. 1,2,3,4")->required();
  run_cmd->add_option("--tcp", r_tcp, "comma-separated server endpoints");
  run_cmd->add_option("--seed", r_seed, "round seed (SPSSR_SEED overrides)");

  // audit
  std::string a_kind, a_instance, a_out;
  bool a_exhaustive = false;
  long a_samples = 100000;
  double a_significance = 0.01;
  std::optional<std::uint64_t> a_seed;
  auto* audit_cmd = app.add_subcommand("audit", "run a verification audit");
  audit_cmd->add_option("kind", a_kind, "correctness|privacy|security|metrics")
      ->required();
  audit_cmd->add_option("--instance", a_instance, "instance file")->required();
  audit_cmd->add_flag("--exhaustive", a_exhaustive, "exact enumeration mode");
  audit_cmd->add_option("--samples", a_samples, "samples / trials");
  audit_cmd->add_option("--significance", a_significance,
                        "statistical significance (default 0.01)");
  audit_cmd->add_option("--seed", a_seed, "seed (SPSSR_SEED overrides)");
  audit_cmd->add_option("--out", a_out, "write the JSON report here too");

  // serve
  std::uint16_t s_port = 0;
  std::string s_db;
  int s_index = 1;
  auto* serve_cmd = app.add_subcommand("serve", "answer queries over TCP");
  serve_cmd->add_option("--port", s_port, "listen port (0 = ephemeral)")->required();
  serve_cmd->add_option("--db", s_db, "database file")->required();
  serve_cmd->add_option("--server-index", s_index, "index used in logs");

  // bench
  std::string b_grid = "N=2:5,K=3:8,D=2:7", b_out;
  std::optional<std::uint64_t> b_seed;
  auto* bench_cmd = app.add_subcommand("bench", "sweep parameters, emit CSV");
  bench_cmd->add_option("--grid", b_grid, "e.g. N=2:5,K=3:8,D=2:4,q=257");
  bench_cmd->add_option("--out", b_out, "CSV path (default stdout)");
  bench_cmd->add_option("--seed", b_seed, "seed (SPSSR_SEED overrides)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (params_cmd->parsed()) return cmd_params(p_n, p_k, p_d, p_q);
    if (gen_cmd->parsed()) {
      return cmd_gen(g_n, g_k, g_d, g_q, g_family, g_full, g_seed, g_out);
    }
    if (run_cmd->parsed()) {
      return cmd_run(r_instance, r_db, r_demand, r_tcp, r_seed);
    }
    if (audit_cmd->parsed()) {
      return cmd_audit(a_kind, a_instance, a_exhaustive, a_samples,
                       a_significance, a_seed, a_out);
    }
    if (serve_cmd->parsed()) return cmd_serve(s_port, s_db, s_index);
    if (bench_cmd->parsed()) return cmd_bench(b_grid, b_out, b_seed);
  } catch (const spssr::TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const spssr::BindError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
