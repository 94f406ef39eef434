#pragma once

// One retrieval round over either transport, with per-phase timing. The two
// transports produce identical results for identical randomness: the round is
// a deterministic function of (instance, demand, query bits, database).

#include <chrono>
#include <optional>
#include <utility>
#include <vector>

#include "spssr/core.hpp"
#include "spssr/errors.hpp"
#include "spssr/net.hpp"
#include "spssr/scheme.hpp"

namespace spssr {

struct Instance {
  SchemeParams params;
  DemandFamily family;
  std::optional<std::uint64_t> seed;
};

enum class Transport { in_process, tcp };

struct RoundMetrics {
  IndexSet demand;
  long uplink_bits = 0;       // N * M*K*L query bits sent
  int downlink_symbols = 0;   // N * M field symbols retrieved
  Rational achieved_rate{0};  // D*L / (N*M)
  double query_ms = 0;        // times per phase
  double answer_ms = 0;
  double decode_ms = 0;
};

/// Everything a round produced besides the result; feeds the algebraic
/// security audit and byte-level transport comparisons.
struct RoundArtifacts {
  std::vector<QueryMatrix> queries;  // one per server, [0] is server 1's
  std::vector<AnswerVector> answers;
};

/// Runs one round. in_process needs `db`; tcp needs one endpoint per server,
/// each loaded with the same replicated database.
inline std::pair<RetrievalResult, RoundMetrics> simulate_round(
    const SchemeParams& params, const DemandFamily& family,
    const IndexSet& demand, RandomSource& rng, Transport transport,
    const Database* db = nullptr, const std::vector<Endpoint>& endpoints = {},
    RoundArtifacts* artifacts = nullptr) {
  using clock = std::chrono::steady_clock;
  const auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  const IndexSet w = sorted(demand);
  if (std::find(family.sets.begin(), family.sets.end(), w) ==
      family.sets.end()) {
    throw DemandNotInFamily("demand is not one of the candidate sets");
  }

  const auto t0 = clock::now();
  const DemandPartition partition = partition_demand(w, params);
  std::vector<QueryMatrix> queries;
  queries.reserve(params.servers);
  queries.push_back(gen_query_first(params, rng));
  for (int n = 2; n <= params.servers; ++n) {
    queries.push_back(gen_query_n(queries.front(), partition, n, params));
  }
  const auto t1 = clock::now();

  std::vector<AnswerVector> answers;
  if (transport == Transport::in_process) {
    if (db == nullptr || !consistent(*db, params)) {
      throw ShapeMismatch("in-process round needs a database matching params");
    }
    answers.reserve(params.servers);
    for (const auto& q : queries) answers.push_back(compute_answer(q, *db));
  } else {
    if (static_cast<int>(endpoints.size()) != params.servers) {
      throw TransportError(0, "need " + std::to_string(params.servers) +
                                  " endpoints, got " +
                                  std::to_string(endpoints.size()));
    }
    answers = fetch_answers(endpoints, queries, params.field);
  }
  const auto t2 = clock::now();

  RetrievalResult result = decode(answers, queries.front(), partition, params);
  const auto t3 = clock::now();

  RoundMetrics metrics{
      w,
      static_cast<long>(params.servers) * params.query_bits(),
      params.servers * params.key_count,
      result.achieved_rate,
      ms(t0, t1),
      ms(t1, t2),
      ms(t2, t3),
  };
  if (artifacts != nullptr) {
    artifacts->queries = std::move(queries);
    artifacts->answers = std::move(answers);
  }
  return {std::move(result), std::move(metrics)};
}

}  // namespace spssr
