#pragma once

// Injectable randomness. Golden tests feed an explicit finite stream;
// experiments use a seeded deterministic generator. A source is
// single-consumer: never draw from one instance on two threads at once.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "spssr/errors.hpp"

namespace spssr {

class RandomSource {
 public:
  virtual ~RandomSource() = default;

  /// Uniform draw from [0, q), q >= 2.
  virtual std::uint32_t next_symbol(std::uint32_t q) = 0;

  std::uint32_t next_bit() { return next_symbol(2); }
};

/// Replays a fixed list of values. Throws ExhaustedRandomness when the list
/// runs out and OutOfRange if a replayed value does not fit the requested
/// alphabet, so a mis-sized fixture fails loudly instead of silently wrapping.
class StreamSource final : public RandomSource {
 public:
  explicit StreamSource(std::vector<std::uint32_t> values)
      : values_(std::move(values)) {}

  std::uint32_t next_symbol(std::uint32_t q) override {
    if (pos_ >= values_.size()) {
      throw ExhaustedRandomness("injected stream exhausted after " +
                                std::to_string(values_.size()) + " values");
    }
    std::uint32_t v = values_[pos_++];
    if (v >= q) {
      throw OutOfRange("injected value " + std::to_string(v) +
                       " not a symbol of F_" + std::to_string(q));
    }
    return v;
  }

  std::size_t consumed() const { return pos_; }
  std::size_t remaining() const { return values_.size() - pos_; }

 private:
  std::vector<std::uint32_t> values_;
  std::size_t pos_ = 0;
};

/// mt19937_64 with rejection sampling: exact uniformity on [0, q) and the
/// same stream on every platform for a given seed.
class SeededSource final : public RandomSource {
 public:
  explicit SeededSource(std::uint64_t seed) : rng_(seed) {}

  std::uint32_t next_symbol(std::uint32_t q) override {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % q + 1) % q;
    std::uint64_t w;
    do {
      w = rng_();
    } while (w > limit);
    return static_cast<std::uint32_t>(w % q);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace spssr
