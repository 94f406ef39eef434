#pragma once

// Deliberately broken scheme variants, shipped as expected-fail fixtures.
// Each one violates exactly one condition so the corresponding audit can
// demonstrate that it is able to reject: an audit that cannot fail proves
// nothing.

#include "spssr/audit.hpp"
#include "spssr/core.hpp"
#include "spssr/scheme.hpp"

namespace spssr {

/// Decoder that never consults Q1 for the flip direction: over fields with
/// q > 2 it reports d instead of -d whenever the flipped coefficient was 1.
/// Breaks correctness; invisible at q = 2 where d = -d.
inline SchemeHooks sign_blind_decoder() {
  SchemeHooks hooks;
  hooks.decoder = [](const std::vector<AnswerVector>& answers,
                     const QueryMatrix& q1, const DemandPartition& partition,
                     const SchemeParams& params) {
    RetrievalResult result = decode(answers, q1, partition, params);
    for (int n = 2; n <= params.servers; ++n) {
      const ServerCoord c = server_coords(n, params);
      for (int m = 1; m <= params.key_count; ++m) {
        const int position = (m - 1) * params.group_size + c.group_offset;
        const FieldElement d =
            answers[n - 1][m - 1] - answers[0][m - 1];
        result.recovered[position - 1][c.subpacket - 1] = d;  // sign ignored
      }
    }
    return result;
  };
  return hooks;
}

/// Server that forgets the one-time-pad masks: answers are bare linear
/// combinations. Breaks security; a single answer then reveals a combination
/// that can involve interference messages.
inline SchemeHooks unmasked_answers() {
  SchemeHooks hooks;
  hooks.answer = [](const QueryMatrix& query, const Database& db) {
    AnswerVector a = compute_answer(query, db);
    for (int m = 0; m < static_cast<int>(a.size()); ++m) {
      a[m] -= db.keys[m];
    }
    return a;
  };
  return hooks;
}

/// Query generator that forces the first bit of every non-first server's
/// query to 1, but only for one target demand. Breaks privacy: that demand's
/// query distribution is no longer uniform, so it differs from the others.
inline SchemeHooks biased_query(IndexSet target_demand) {
  SchemeHooks hooks;
  hooks.query_for_server = [target = sorted(std::move(target_demand))](
                               const QueryMatrix& q1,
                               const DemandPartition& partition, int server,
                               const SchemeParams& params) {
    QueryMatrix q = gen_query_n(q1, partition, server, params);
    if (partition.demand == target) q.set_bit_at(0, 1);
    return q;
  };
  return hooks;
}

}  // namespace spssr
