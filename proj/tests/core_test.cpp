#include "spssr/core.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

namespace spssr {
namespace {

FieldOrder q2(2);
FieldOrder q5(5);
FieldOrder q257(257);

TEST(DeriveParamsTest, WorkedExample) {
  // N=3, K=6, D=4: G = gcd(4,2) = 2, L = 1, M = 2, rate 2/3, ratio 2.
  auto p = derive_params(3, 6, 4, 15, q257);
  EXPECT_EQ(p.group_size, 2);
  EXPECT_EQ(p.subpacketization, 1);
  EXPECT_EQ(p.key_count, 2);
  EXPECT_EQ(p.rate, Rational(2, 3));
  EXPECT_EQ(p.randomness_ratio, Rational(2));
}

TEST(DeriveParamsTest, SmallCases) {
  auto p = derive_params(2, 3, 2, 2, q2);
  EXPECT_EQ(p.group_size, 1);
  EXPECT_EQ(p.subpacketization, 1);
  EXPECT_EQ(p.key_count, 2);
  EXPECT_EQ(p.rate, Rational(1, 2));
  EXPECT_EQ(p.randomness_ratio, Rational(2));

  p = derive_params(4, 5, 2, 2, q2);
  EXPECT_EQ(p.group_size, 1);
  EXPECT_EQ(p.subpacketization, 3);
  EXPECT_EQ(p.key_count, 2);
  EXPECT_EQ(p.rate, Rational(3, 4));
  EXPECT_EQ(p.randomness_ratio, Rational(2, 3));
}

TEST(DeriveParamsTest, RejectsBadShapes) {
  EXPECT_THROW(derive_params(1, 6, 4, 2, q2), InvalidServerCount);
  EXPECT_THROW(derive_params(3, 6, 1, 2, q2), InvalidDemandSize);
  EXPECT_THROW(derive_params(3, 6, 6, 2, q2), InvalidDemandSize);
  EXPECT_THROW(derive_params(3, 6, 4, 1, q2), OutOfRange);
}

TEST(DeriveParamsTest, IdentitiesOnGrid) {
  for (int n = 2; n <= 8; ++n) {
    for (int k = 3; k <= 10; ++k) {
      for (int d = 2; d <= k - 1; ++d) {
        auto p = derive_params(n, k, d, 2, q2);
        EXPECT_EQ(p.subpacketization * p.group_size, n - 1);
        EXPECT_EQ(p.key_count * p.group_size, d);
        EXPECT_EQ(p.rate, Rational(n - 1, n));
        EXPECT_EQ(p.randomness_ratio, Rational(d, n - 1));
      }
    }
  }
}

TEST(ValidateFamilyTest, FullFamilyIsReady) {
  auto f = full_family(6, 4);
  ASSERT_EQ(f.sets.size(), 15u);
  auto r = validate_family(f);
  EXPECT_TRUE(r.protocol_ready);
  EXPECT_TRUE(r.sizes_all_d);
  EXPECT_TRUE(r.full_union);
  EXPECT_TRUE(r.empty_intersection);
  EXPECT_TRUE(r.no_duplicates);
}

TEST(ValidateFamilyTest, DisjointPairIsReady) {
  DemandFamily f{4, 2, {{1, 2}, {3, 4}}};
  EXPECT_TRUE(validate_family(f).protocol_ready);
}

TEST(ValidateFamilyTest, OverlappingPairReportsCommonIndex) {
  // {1,2} and {2,3} share index 2, so the family is usable by the scheme but
  // not normalized: message 2 could be retrieved directly.
  DemandFamily f{3, 2, {{1, 2}, {2, 3}}};
  auto r = validate_family(f);
  EXPECT_TRUE(r.full_union);
  EXPECT_FALSE(r.empty_intersection);
  EXPECT_FALSE(r.protocol_ready);
}

TEST(ValidateFamilyTest, ReportsViolations) {
  DemandFamily f{4, 2, {{1, 2}, {1, 3}}};
  auto r = validate_family(f);
  EXPECT_FALSE(r.protocol_ready);
  EXPECT_FALSE(r.full_union);          // 4 missing
  EXPECT_FALSE(r.empty_intersection);  // 1 in both
  EXPECT_TRUE(r.sizes_all_d);
  EXPECT_TRUE(r.no_duplicates);
}

TEST(ValidateFamilyTest, DuplicatesAndBadSizes) {
  DemandFamily dup{3, 2, {{1, 2}, {1, 2}, {2, 3}, {1, 3}}};
  EXPECT_FALSE(validate_family(dup).no_duplicates);

  DemandFamily bad{3, 2, {{1, 2, 3}, {2, 3}}};
  EXPECT_FALSE(validate_family(bad).sizes_all_d);

  DemandFamily range{3, 2, {{0, 2}, {2, 4}}};
  EXPECT_FALSE(validate_family(range).indices_in_range);
}

TEST(NormalizeFamilyTest, DegenerateInstanceCarriesLog) {
  // {1,2},{1,3} over K=4: index 4 is in no set, index 1 is in every set.
  DemandFamily f{4, 2, {{1, 2}, {1, 3}}};
  try {
    normalize_family(f);
    FAIL() << "expected DegenerateInstance";
  } catch (const DegenerateInstance& e) {
    ASSERT_EQ(e.log.removals.size(), 2u);
    EXPECT_EQ(e.log.removals[0].original_index, 4);
    EXPECT_FALSE(e.log.removals[0].extracted);
    EXPECT_EQ(e.log.removals[1].original_index, 1);
    EXPECT_TRUE(e.log.removals[1].extracted);
    EXPECT_EQ(e.log.retrieve_directly, IndexSet{1});
  }
}

TEST(NormalizeFamilyTest, ExtractsCommonIndex) {
  // 3-subsets of [1:6], each augmented with index 7.
  auto base = full_family(6, 3);
  DemandFamily f{7, 4, {}};
  for (auto s : base.sets) {
    s.push_back(7);
    f.sets.push_back(s);
  }
  auto [normalized, log] = normalize_family(f);
  EXPECT_EQ(normalized.messages, 6);
  EXPECT_EQ(normalized.demand_size, 3);
  EXPECT_EQ(normalized.sets, base.sets);
  EXPECT_EQ(log.retrieve_directly, IndexSet{7});
  EXPECT_TRUE(validate_family(normalized).protocol_ready);
}

TEST(NormalizeFamilyTest, FixedPointIsIdentity) {
  DemandFamily f{3, 2, {{1, 2}, {2, 3}, {1, 3}}};
  auto [normalized, log] = normalize_family(f);
  EXPECT_TRUE(log.identity());
  EXPECT_EQ(normalized.sets, f.sets);
  EXPECT_EQ(normalized.messages, 3);
  EXPECT_EQ(normalized.demand_size, 2);
}

TEST(NormalizeFamilyTest, IdempotentOnRandomFamilies) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int k = 3 + static_cast<int>(rng() % 6);
    int d = 2 + static_cast<int>(rng() % std::max(1, k - 2));
    if (d > k - 1) continue;
    int e = 2 + static_cast<int>(rng() % 4);
    DemandFamily f{k, d, {}};
    for (int j = 0; j < e; ++j) {
      IndexSet all(k);
      std::iota(all.begin(), all.end(), 1);
      std::shuffle(all.begin(), all.end(), rng);
      f.sets.push_back(sorted(IndexSet(all.begin(), all.begin() + d)));
    }
    std::sort(f.sets.begin(), f.sets.end());
    f.sets.erase(std::unique(f.sets.begin(), f.sets.end()), f.sets.end());
    if (f.sets.size() < 2) continue;

    try {
      auto [once, log1] = normalize_family(f);
      auto [twice, log2] = normalize_family(once);
      EXPECT_TRUE(log2.identity());
      EXPECT_EQ(once.sets, twice.sets);
      EXPECT_TRUE(validate_family(once).protocol_ready);
      ++checked;
    } catch (const DegenerateInstance&) {
      // Degenerate draws are fine; idempotence only applies to survivors.
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(GenDatabaseTest, InjectedStream) {
  // K=2, L=3, M=2 over F_5: row-major messages, then keys.
  SchemeParams params{4, 2, 2, 2, q5, 1, 3, 2, Rational(3, 4), Rational(2, 3)};
  StreamSource src({1, 2, 3, 4, 0, 1, 2, 3});
  auto db = gen_database(params, src);
  ASSERT_EQ(db.message_data.size(), 2u);
  EXPECT_EQ(db.symbol(1, 1).value(), 1u);
  EXPECT_EQ(db.symbol(1, 2).value(), 2u);
  EXPECT_EQ(db.symbol(1, 3).value(), 3u);
  EXPECT_EQ(db.symbol(2, 1).value(), 4u);
  EXPECT_EQ(db.symbol(2, 2).value(), 0u);
  EXPECT_EQ(db.symbol(2, 3).value(), 1u);
  ASSERT_EQ(db.keys.size(), 2u);
  EXPECT_EQ(db.keys[0].value(), 2u);
  EXPECT_EQ(db.keys[1].value(), 3u);
}

TEST(GenDatabaseTest, AllZeroStream) {
  SchemeParams params{3, 4, 2, 2, q5, 2, 1, 1, Rational(2, 3), Rational(1)};
  StreamSource src(std::vector<std::uint32_t>(4 * 1 + 1, 0));
  auto db = gen_database(params, src);
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(db.symbol(i, 1).value(), 0u);
  EXPECT_EQ(db.keys[0].value(), 0u);
}

TEST(GenDatabaseTest, SeededDeterminism) {
  auto params = derive_params(3, 6, 4, 15, q257);
  SeededSource a(42), b(42);
  auto db1 = gen_database(params, a);
  auto db2 = gen_database(params, b);
  EXPECT_EQ(db1.message_data, db2.message_data);
  EXPECT_EQ(db1.keys, db2.keys);
}

TEST(RandomSourceTest, StreamErrors) {
  StreamSource empty({});
  EXPECT_THROW(empty.next_bit(), ExhaustedRandomness);
  StreamSource bad({3});
  EXPECT_THROW(bad.next_bit(), OutOfRange);
}

}  // namespace
}  // namespace spssr
