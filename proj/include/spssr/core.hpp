#pragma once

// Derived scheme parameters, demand-family validation and normalization, and
// the replicated database (messages plus shared secret keys).
//
// Message indices are 1-based everywhere a caller can see them, matching the
// instance file convention. Candidate demand sets are kept sorted ascending;
// the group partition later relies on that canonical order.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "spssr/errors.hpp"
#include "spssr/field.hpp"
#include "spssr/random.hpp"
#include "spssr/rational.hpp"

namespace spssr {

using IndexSet = std::vector<int>;

inline IndexSet sorted(IndexSet s) {
  std::sort(s.begin(), s.end());
  return s;
}

struct SchemeParams {
  int servers;            // N >= 2
  int messages;           // K
  int demand_size;        // D, 2 <= D <= K-1
  int family_size;        // E >= 2
  FieldOrder field;       // q
  int group_size;         // G = gcd(D, N-1)
  int subpacketization;   // L = (N-1)/G
  int key_count;          // M = D/G
  Rational rate;              // 1 - 1/N
  Rational randomness_ratio;  // D/(N-1)

  long query_bits() const {
    return static_cast<long>(key_count) * messages * subpacketization;
  }
};

inline SchemeParams derive_params(int servers, int messages, int demand_size,
                                  int family_size, FieldOrder field) {
  if (servers < 2) {
    throw InvalidServerCount("need at least 2 servers, got " +
                             std::to_string(servers));
  }
  if (demand_size < 2 || demand_size > messages - 1) {
    throw InvalidDemandSize("demand size " + std::to_string(demand_size) +
                            " outside [2, K-1] for K = " +
                            std::to_string(messages));
  }
  if (family_size < 2) {
    throw OutOfRange("family size must be at least 2, got " +
                     std::to_string(family_size));
  }
  const int g = std::gcd(demand_size, servers - 1);
  return SchemeParams{
      servers,
      messages,
      demand_size,
      family_size,
      field,
      g,
      (servers - 1) / g,
      demand_size / g,
      Rational(servers - 1, servers),
      Rational(demand_size, servers - 1),
  };
}

// ---------------------------------------------------------------------------
// Demand families

struct DemandFamily {
  int messages;     // K
  int demand_size;  // D
  std::vector<IndexSet> sets;  // E candidate demand sets, each sorted ascending
};

/// Sorts every set ascending (the ordering convention all parties share).
inline DemandFamily canonicalized(DemandFamily f) {
  for (auto& s : f.sets) std::sort(s.begin(), s.end());
  return f;
}

/// All D-subsets of [1:K] in lexicographic order.
inline DemandFamily full_family(int messages, int demand_size) {
  DemandFamily f{messages, demand_size, {}};
  IndexSet cur;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(cur.size()) == demand_size) {
      f.sets.push_back(cur);
      return;
    }
    int need = demand_size - static_cast<int>(cur.size());
    for (int i = next; i + need - 1 <= messages; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  return f;
}

struct ValidationReport {
  bool sizes_all_d = false;        // every set has exactly D distinct indices
  bool indices_in_range = false;   // all indices within [1:K]
  bool full_union = false;         // union of all sets is [1:K]
  bool empty_intersection = false; // no index common to all sets
  bool no_duplicates = false;      // all sets pairwise distinct
  bool protocol_ready = false;     // all of the above and E >= 2
  std::vector<std::string> problems;
};

inline ValidationReport validate_family(const DemandFamily& family) {
  ValidationReport r;
  const int k = family.messages;
  const int d = family.demand_size;
  const auto& sets = family.sets;

  r.sizes_all_d = true;
  r.indices_in_range = true;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    IndexSet s = sorted(sets[j]);
    bool distinct = std::adjacent_find(s.begin(), s.end()) == s.end();
    if (static_cast<int>(s.size()) != d || !distinct) {
      r.sizes_all_d = false;
      r.problems.push_back("set " + std::to_string(j + 1) +
                           " does not have exactly " + std::to_string(d) +
                           " distinct indices");
    }
    for (int i : s) {
      if (i < 1 || i > k) {
        r.indices_in_range = false;
        r.problems.push_back("set " + std::to_string(j + 1) + " index " +
                             std::to_string(i) + " outside [1:" +
                             std::to_string(k) + "]");
        break;
      }
    }
  }

  std::vector<int> appearances(k + 1, 0);
  for (const auto& s : sets) {
    for (int i : s) {
      if (i >= 1 && i <= k) ++appearances[i];
    }
  }
  const int e = static_cast<int>(sets.size());
  r.full_union = true;
  r.empty_intersection = true;
  for (int i = 1; i <= k; ++i) {
    if (appearances[i] == 0) {
      r.full_union = false;
      r.problems.push_back("index " + std::to_string(i) + " appears in no set");
    }
    if (e > 0 && appearances[i] == e) {
      r.empty_intersection = false;
      r.problems.push_back("index " + std::to_string(i) +
                           " appears in every set");
    }
  }

  r.no_duplicates = true;
  std::vector<IndexSet> canon;
  canon.reserve(sets.size());
  for (const auto& s : sets) canon.push_back(sorted(s));
  std::sort(canon.begin(), canon.end());
  if (std::adjacent_find(canon.begin(), canon.end()) != canon.end()) {
    r.no_duplicates = false;
    r.problems.push_back("family contains duplicate sets");
  }

  if (e < 2) r.problems.push_back("family has fewer than 2 sets");

  r.protocol_ready = r.sizes_all_d && r.indices_in_range && r.full_union &&
                     r.empty_intersection && r.no_duplicates && e >= 2;
  return r;
}

struct NormalizationLog {
  struct Removal {
    int original_index = 0;  // 1-based index in the pre-normalization labeling
    bool extracted = false;  // true: was in every set (retrieve directly);
                             // false: was in no set (message dropped)
  };
  std::vector<Removal> removals;    // in the order applied
  std::vector<int> relabeling;      // relabeling[i] = new index of original i,
                                    // 0 if removed; entry 0 unused
  IndexSet retrieve_directly;       // original indices to fetch outside the scheme

  bool identity() const { return removals.empty(); }
};

/// Thrown when normalization drives D below 2 or K-1 below D; carries the log
/// accumulated up to the failure so callers can still report what happened.
struct DegenerateInstance : Error {
  DegenerateInstance(const std::string& what, NormalizationLog log)
      : Error(what), log(std::move(log)) {}
  NormalizationLog log;
};

/// Iterates two reductions to a fixed point: an index in no set is dropped
/// (the message is irrelevant), and an index in every set is extracted for
/// direct retrieval (removing it shrinks D by one). Surviving indices are
/// relabeled downward to [1:K'].
inline std::pair<DemandFamily, NormalizationLog> normalize_family(
    const DemandFamily& family) {
  NormalizationLog log;
  log.relabeling.assign(family.messages + 1, 0);

  // Work with original labels; relabel once at the end.
  std::vector<bool> alive(family.messages + 1, false);
  for (int i = 1; i <= family.messages; ++i) alive[i] = true;
  std::vector<IndexSet> sets;
  sets.reserve(family.sets.size());
  for (const auto& s : family.sets) sets.push_back(sorted(s));
  int d = family.demand_size;

  auto finish = [&](bool degenerate, const std::string& why) {
    IndexSet survivors;
    for (int i = 1; i <= family.messages; ++i) {
      if (alive[i]) survivors.push_back(i);
    }
    for (std::size_t pos = 0; pos < survivors.size(); ++pos) {
      log.relabeling[survivors[pos]] = static_cast<int>(pos) + 1;
    }
    if (degenerate) throw DegenerateInstance(why, log);

    DemandFamily out{static_cast<int>(survivors.size()), d, {}};
    for (const auto& s : sets) {
      IndexSet relabeled;
      relabeled.reserve(s.size());
      for (int i : s) relabeled.push_back(log.relabeling[i]);
      out.sets.push_back(sorted(std::move(relabeled)));
    }
    return std::pair<DemandFamily, NormalizationLog>{std::move(out), log};
  };

  const int e = static_cast<int>(sets.size());
  for (;;) {
    std::vector<int> appearances(family.messages + 1, 0);
    for (const auto& s : sets) {
      for (int i : s) ++appearances[i];
    }

    int in_no_set = 0, in_every_set = 0;
    for (int i = 1; i <= family.messages; ++i) {
      if (!alive[i]) continue;
      if (appearances[i] == 0) {
        in_no_set = i;
        break;
      }
    }
    if (in_no_set != 0) {
      alive[in_no_set] = false;
      log.removals.push_back({in_no_set, false});
      continue;
    }

    for (int i = 1; i <= family.messages; ++i) {
      if (alive[i] && appearances[i] == e) {
        in_every_set = i;
        break;
      }
    }
    if (in_every_set != 0) {
      alive[in_every_set] = false;
      log.removals.push_back({in_every_set, true});
      log.retrieve_directly.push_back(in_every_set);
      for (auto& s : sets) s.erase(std::remove(s.begin(), s.end(), in_every_set), s.end());
      --d;
      continue;
    }
    break;  // fixed point
  }

  const int survivors =
      static_cast<int>(std::count(alive.begin() + 1, alive.end(), true));
  if (d < 2) {
    return finish(true, "normalization left demand size " + std::to_string(d) +
                            " (< 2)");
  }
  if (d > survivors - 1) {
    return finish(true, "normalization left demand size " + std::to_string(d) +
                            " > K-1 for K = " + std::to_string(survivors));
  }
  return finish(false, "");
}

// ---------------------------------------------------------------------------
// Replicated database

struct Database {
  FieldOrder field;
  int messages;    // K
  int subpackets;  // L
  std::vector<std::vector<FieldElement>> message_data;  // K rows of L symbols
  std::vector<FieldElement> keys;                       // M shared secret keys

  /// X_{i,l} with 1-based message index and subpacket index.
  const FieldElement& symbol(int message, int subpacket) const {
    return message_data[message - 1][subpacket - 1];
  }
};

/// Draws K*L message symbols row-major (message 1 subpackets first), then the
/// M key symbols, all uniform from the given source.
inline Database gen_database(const SchemeParams& params, RandomSource& rng) {
  const std::uint32_t q = params.field.value();
  Database db{params.field, params.messages, params.subpacketization, {}, {}};
  db.message_data.reserve(params.messages);
  for (int i = 0; i < params.messages; ++i) {
    std::vector<FieldElement> row;
    row.reserve(params.subpacketization);
    for (int l = 0; l < params.subpacketization; ++l) {
      row.emplace_back(rng.next_symbol(q), params.field);
    }
    db.message_data.push_back(std::move(row));
  }
  db.keys.reserve(params.key_count);
  for (int m = 0; m < params.key_count; ++m) {
    db.keys.emplace_back(rng.next_symbol(q), params.field);
  }
  return db;
}

/// True when the database shape agrees with the derived parameters.
inline bool consistent(const Database& db, const SchemeParams& params) {
  return db.field == params.field && db.messages == params.messages &&
         db.subpackets == params.subpacketization &&
         static_cast<int>(db.keys.size()) == params.key_count &&
         static_cast<int>(db.message_data.size()) == params.messages;
}

}  // namespace spssr
