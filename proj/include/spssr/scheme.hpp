#pragma once

// The achievable retrieval scheme: query generation, per-server answers,
// and decoding.
//
// One round, for parameters (N, K, D, q) with G = gcd(D, N-1), L = (N-1)/G,
// M = D/G:
//
//   1. The sorted demand {i_1 < ... < i_D} is split into M consecutive
//      groups of G indices.
//   2. Server 1 receives a uniformly random M x (K*L) binary matrix Q1.
//      Column (i, l) sits at index (i-1)*L + l, 1-based.
//   3. Server n in [2:N] maps to coordinates (g_n, l_n) via
//      n = 1 + (g_n - 1)*L + l_n; its query is Q1 with, in each row m, the
//      single bit at message i_{(m-1)G + g_n}, subpacket l_n complemented.
//   4. Each server returns, per row m, the {0,1}-combination of message
//      subpackets selected by that row plus the shared key S_m as a mask.
//   5. Subtracting server 1's answer entry from server n's cancels the mask
//      and every common term, leaving exactly one demand subpacket (negated
//      when the flip went 1 -> 0, which only the querier can see from Q1).
//
// Queries carry no demand metadata; a server needs only (M, K, L, q) plus
// the bits.

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spssr/core.hpp"
#include "spssr/errors.hpp"
#include "spssr/field.hpp"
#include "spssr/random.hpp"

namespace spssr {

/// M x (K*L) binary matrix. Coefficient accessors speak protocol coordinates:
/// row m in [1:M], message i in [1:K], subpacket l in [1:L]. Raw bit accessors
/// are 0-based and exist for serialization and enumeration loops.
class QueryMatrix {
 public:
  QueryMatrix(int rows, int messages, int subpackets)
      : rows_(rows),
        messages_(messages),
        subpackets_(subpackets),
        bits_(static_cast<std::size_t>(rows) * messages * subpackets, 0) {}

  int rows() const { return rows_; }
  int messages() const { return messages_; }
  int subpackets() const { return subpackets_; }
  int cols() const { return messages_ * subpackets_; }
  long bit_count() const { return static_cast<long>(rows_) * cols(); }

  /// h_{i,l}^{(m)}: coefficient of subpacket (i, l) in row m. 1-based.
  std::uint8_t coeff(int row, int message, int subpacket) const {
    return bits_[offset(row, message, subpacket)];
  }
  void set_coeff(int row, int message, int subpacket, std::uint8_t v) {
    bits_[offset(row, message, subpacket)] = v;
  }
  void flip_coeff(int row, int message, int subpacket) {
    bits_[offset(row, message, subpacket)] ^= 1;
  }

  /// Raw storage order: row-major, column c = (i-1)*L + (l-1). 0-based.
  std::uint8_t bit_at(long index) const { return bits_[index]; }
  void set_bit_at(long index, std::uint8_t v) { bits_[index] = v; }

  /// Bits packed MSB-first in row-major order, final byte zero-padded. The
  /// same layout the wire format uses, which also makes it a convenient
  /// map key for exact distribution audits.
  std::vector<std::uint8_t> packed() const {
    std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
    for (std::size_t b = 0; b < bits_.size(); ++b) {
      if (bits_[b]) out[b / 8] |= static_cast<std::uint8_t>(0x80u >> (b % 8));
    }
    return out;
  }

  std::string packed_key() const {
    auto p = packed();
    return std::string(p.begin(), p.end());
  }

  friend bool operator==(const QueryMatrix& a, const QueryMatrix& b) {
    return a.rows_ == b.rows_ && a.messages_ == b.messages_ &&
           a.subpackets_ == b.subpackets_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t offset(int row, int message, int subpacket) const {
    return (static_cast<std::size_t>(row - 1) * messages_ + (message - 1)) *
               subpackets_ +
           (subpacket - 1);
  }

  int rows_, messages_, subpackets_;
  std::vector<std::uint8_t> bits_;  // one byte per bit
};

/// The sorted demand split into M consecutive groups of G indices.
struct DemandPartition {
  IndexSet demand;  // ascending, size D
  int group_size;   // G
  int group_count;  // M

  /// i_p for 1-based position p in the sorted demand.
  int index_at(int position) const { return demand[position - 1]; }

  /// Group m as a view of positions (m-1)G+1 .. mG.
  IndexSet group(int m) const {
    return IndexSet(demand.begin() + static_cast<long>(m - 1) * group_size,
                    demand.begin() + static_cast<long>(m) * group_size);
  }
};

inline DemandPartition partition_demand(const IndexSet& demand,
                                        const SchemeParams& params) {
  IndexSet w = sorted(demand);
  if (static_cast<int>(w.size()) != params.demand_size ||
      std::adjacent_find(w.begin(), w.end()) != w.end()) {
    throw WrongDemandSize("demand must contain exactly " +
                          std::to_string(params.demand_size) +
                          " distinct indices");
  }
  for (int i : w) {
    if (i < 1 || i > params.messages) {
      throw OutOfRange("demand index " + std::to_string(i) + " outside [1:" +
                       std::to_string(params.messages) + "]");
    }
  }
  return DemandPartition{std::move(w), params.group_size, params.key_count};
}

/// Coordinates (g_n, l_n) of server n in [2:N]; the map is a bijection onto
/// [1:G] x [1:L] with n = 1 + (g_n - 1)*L + l_n. Server 1 has no coordinate.
struct ServerCoord {
  int server;        // n
  int group_offset;  // g_n in [1:G]
  int subpacket;     // l_n in [1:L]
};

inline ServerCoord server_coords(int server, const SchemeParams& params) {
  if (server < 2 || server > params.servers) {
    throw OutOfRangeServer("server index " + std::to_string(server) +
                           " outside [2:" + std::to_string(params.servers) +
                           "]");
  }
  const int l_level = params.subpacketization;
  const int g = (server - 2) / l_level + 1;          // ceil((n-1)/L)
  const int l = (server - 1) - (g - 1) * l_level;    // remainder in [1:L]
  return ServerCoord{server, g, l};
}

/// Server 1's query: M*K*L uniform bits, consumed row-major (row 1 left to
/// right, then row 2, ...).
inline QueryMatrix gen_query_first(const SchemeParams& params,
                                   RandomSource& rng) {
  QueryMatrix q(params.key_count, params.messages, params.subpacketization);
  for (long b = 0; b < q.bit_count(); ++b) {
    q.set_bit_at(b, static_cast<std::uint8_t>(rng.next_bit()));
  }
  return q;
}

/// Server n's query: a copy of Q1 with exactly one bit complemented per row,
/// at message i_{(m-1)G + g_n}, subpacket l_n.
inline QueryMatrix gen_query_n(const QueryMatrix& q1,
                               const DemandPartition& partition, int server,
                               const SchemeParams& params) {
  const ServerCoord c = server_coords(server, params);
  QueryMatrix q = q1;
  for (int m = 1; m <= params.key_count; ++m) {
    const int position = (m - 1) * params.group_size + c.group_offset;
    q.flip_coeff(m, partition.index_at(position), c.subpacket);
  }
  return q;
}

using AnswerVector = std::vector<FieldElement>;

/// Entry m = sum over (i, l) of h_{i,l}^{(m)} * X_{i,l}, masked by S_m.
inline AnswerVector compute_answer(const QueryMatrix& query,
                                   const Database& db) {
  if (query.messages() != db.messages || query.subpackets() != db.subpackets ||
      query.rows() != static_cast<int>(db.keys.size())) {
    throw ShapeMismatch("query shape (" + std::to_string(query.rows()) + " x " +
                        std::to_string(query.messages()) + "*" +
                        std::to_string(query.subpackets()) +
                        ") does not match database");
  }
  AnswerVector answer;
  answer.reserve(query.rows());
  for (int m = 1; m <= query.rows(); ++m) {
    FieldElement acc = db.keys[m - 1];
    for (int i = 1; i <= db.messages; ++i) {
      for (int l = 1; l <= db.subpackets; ++l) {
        if (query.coeff(m, i, l)) acc += db.symbol(i, l);
      }
    }
    answer.push_back(acc);
  }
  return answer;
}

/// Result of one retrieval round. `recovered` is aligned with the sorted
/// demand: recovered[p-1][l-1] is subpacket l of demand message i_p.
struct RetrievalResult {
  IndexSet demand;
  std::vector<std::vector<FieldElement>> recovered;  // D rows of L symbols
  int symbols_downloaded;                            // N*M
  Rational achieved_rate;                            // D*L/(N*M)
};

/// Recovers all D*L demand subpackets from the N answers. For each server n
/// and row m, d = A_n[m] - A_1[m] isolates the flipped subpacket; when Q1 held
/// a 1 there the flip removed the term, so the subpacket is -d.
inline RetrievalResult decode(const std::vector<AnswerVector>& answers,
                              const QueryMatrix& q1,
                              const DemandPartition& partition,
                              const SchemeParams& params) {
  if (static_cast<int>(answers.size()) != params.servers) {
    throw ShapeMismatch("expected " + std::to_string(params.servers) +
                        " answers, got " + std::to_string(answers.size()));
  }
  for (const auto& a : answers) {
    if (static_cast<int>(a.size()) != params.key_count) {
      throw ShapeMismatch("answer length != M");
    }
  }

  const FieldElement zero(0, params.field);
  RetrievalResult result{
      partition.demand,
      std::vector<std::vector<FieldElement>>(
          params.demand_size,
          std::vector<FieldElement>(params.subpacketization, zero)),
      params.servers * params.key_count,
      Rational(static_cast<long>(params.demand_size) * params.subpacketization,
               static_cast<long>(params.servers) * params.key_count),
  };

  for (int n = 2; n <= params.servers; ++n) {
    const ServerCoord c = server_coords(n, params);
    for (int m = 1; m <= params.key_count; ++m) {
      const int position = (m - 1) * params.group_size + c.group_offset;
      const int i = partition.index_at(position);
      const FieldElement d = answers[n - 1][m - 1] - answers[0][m - 1];
      const FieldElement value = q1.coeff(m, i, c.subpacket) ? -d : d;
      result.recovered[position - 1][c.subpacket - 1] = value;
    }
  }
  return result;
}

/// One full in-process round: queries, answers, decode. The recovered
/// messages equal the database's demand rows whenever inputs are consistent.
inline RetrievalResult run_round(const SchemeParams& params,
                                 const DemandFamily& family,
                                 const IndexSet& demand, const Database& db,
                                 RandomSource& rng) {
  const IndexSet w = sorted(demand);
  if (std::find(family.sets.begin(), family.sets.end(), w) ==
      family.sets.end()) {
    throw DemandNotInFamily("demand is not one of the candidate sets");
  }
  if (!consistent(db, params)) {
    throw ShapeMismatch("database does not match scheme parameters");
  }

  const DemandPartition partition = partition_demand(w, params);
  const QueryMatrix q1 = gen_query_first(params, rng);

  std::vector<AnswerVector> answers;
  answers.reserve(params.servers);
  answers.push_back(compute_answer(q1, db));
  for (int n = 2; n <= params.servers; ++n) {
    answers.push_back(compute_answer(gen_query_n(q1, partition, n, params), db));
  }
  return decode(answers, q1, partition, params);
}

}  // namespace spssr
