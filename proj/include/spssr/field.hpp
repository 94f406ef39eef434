#pragma once

// Arithmetic over the prime field F_q used for message symbols, secret keys,
// and answer combinations. The protocol only adds and subtracts symbols with
// {0,1} coefficients, so multiplication and inversion are deliberately absent.

#include <cstdint>
#include <string>

#include "spssr/errors.hpp"

namespace spssr {

/// Deterministic primality test by trial division; exact for all n <= 2^31-1.
inline bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

/// Prime order q of the symbol field, 2 <= q <= 2^31-1. Construction is the
/// validation: a non-prime or out-of-range order never yields a FieldOrder.
class FieldOrder {
 public:
  static constexpr std::uint32_t kMax = 0x7fffffffu;  // 2^31 - 1

  explicit FieldOrder(std::uint32_t q) : q_(q) {
    if (q < 2 || q > kMax) {
      throw OutOfRange("field order " + std::to_string(q) +
                       " outside [2, 2^31-1]");
    }
    if (!is_prime(q)) {
      throw NotPrime("field order " + std::to_string(q) + " is not prime");
    }
  }

  std::uint32_t value() const { return q_; }

  friend bool operator==(FieldOrder a, FieldOrder b) { return a.q_ == b.q_; }
  friend bool operator!=(FieldOrder a, FieldOrder b) { return a.q_ != b.q_; }

 private:
  std::uint32_t q_;
};

inline FieldOrder validate_order(std::uint32_t q) { return FieldOrder(q); }

/// A residue in [0, q-1]. Elements of different orders never combine;
/// attempting to do so throws MismatchedField.
class FieldElement {
 public:
  FieldElement(std::uint64_t value, FieldOrder order)
      : q_(order), v_(static_cast<std::uint32_t>(value % order.value())) {}

  std::uint32_t value() const { return v_; }
  FieldOrder order() const { return q_; }

  friend FieldElement operator+(FieldElement a, FieldElement b) {
    require_same_order(a, b);
    return FieldElement(std::uint64_t{a.v_} + b.v_, a.q_);
  }

  friend FieldElement operator-(FieldElement a, FieldElement b) {
    require_same_order(a, b);
    std::uint64_t q = a.q_.value();
    return FieldElement(std::uint64_t{a.v_} + q - b.v_, a.q_);
  }

  friend FieldElement operator-(FieldElement a) {
    return FieldElement(std::uint64_t{a.q_.value()} - a.v_, a.q_);
  }

  FieldElement& operator+=(FieldElement b) { return *this = *this + b; }
  FieldElement& operator-=(FieldElement b) { return *this = *this - b; }

  friend bool operator==(FieldElement a, FieldElement b) {
    return a.q_ == b.q_ && a.v_ == b.v_;
  }
  friend bool operator!=(FieldElement a, FieldElement b) { return !(a == b); }

 private:
  static void require_same_order(FieldElement a, FieldElement b) {
    if (a.q_ != b.q_) {
      throw MismatchedField("cannot combine elements of F_" +
                            std::to_string(a.q_.value()) + " and F_" +
                            std::to_string(b.q_.value()));
    }
  }

  FieldOrder q_;
  std::uint32_t v_;
};

inline FieldElement fe_add(FieldElement a, FieldElement b) { return a + b; }
inline FieldElement fe_sub(FieldElement a, FieldElement b) { return a - b; }
inline FieldElement fe_neg(FieldElement a) { return -a; }

}  // namespace spssr
