#pragma once

#include <compare>
#include <limits>
#include <ostream>
#include <string>

namespace relaxmitl {

/// Non-negative cost with an absorbing infinity.
///
/// Infinity absorbs every operation, including scaling by zero, so a sink
/// target stays infinite regardless of the preference weights applied to it.
class Cost {
 public:
  constexpr Cost() = default;
  constexpr explicit Cost(double v) : value_(v) {}

  static constexpr Cost infinity() {
    Cost c;
    c.inf_ = true;
    return c;
  }
  static constexpr Cost zero() { return Cost{}; }

  constexpr bool is_infinite() const { return inf_; }
  constexpr bool is_finite() const { return !inf_; }
  constexpr bool is_zero() const { return !inf_ && value_ == 0.0; }

  /// Finite value; +inf as a double when infinite.
  constexpr double value() const {
    return inf_ ? std::numeric_limits<double>::infinity() : value_;
  }

  constexpr Cost operator+(Cost o) const {
    if (inf_ || o.inf_) return infinity();
    return Cost{value_ + o.value_};
  }
  constexpr Cost& operator+=(Cost o) { return *this = *this + o; }

  constexpr Cost operator*(double k) const {
    if (inf_) return infinity();
    return Cost{value_ * k};
  }
  constexpr Cost operator*(Cost o) const {
    if (inf_ || o.inf_) return infinity();
    return Cost{value_ * o.value_};
  }

  constexpr bool operator==(const Cost& o) const {
    return inf_ == o.inf_ && (inf_ || value_ == o.value_);
  }
  constexpr std::partial_ordering operator<=>(const Cost& o) const {
    if (inf_ && o.inf_) return std::partial_ordering::equivalent;
    if (inf_) return std::partial_ordering::greater;
    if (o.inf_) return std::partial_ordering::less;
    return value_ <=> o.value_;
  }

  std::string str() const;

 private:
  double value_ = 0.0;
  bool inf_ = false;
};

inline Cost operator*(double k, Cost c) { return c * k; }

std::ostream& operator<<(std::ostream& os, const Cost& c);

}  // namespace relaxmitl
