#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ringlab {

// Exact reduced rational. All equilibrium comparisons go through this type;
// the exact analysis path never touches floating point.
class Fraction {
 public:
  constexpr Fraction() = default;
  constexpr Fraction(long long num) : num_(num), den_(1) {}
  Fraction(long long num, long long den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Fraction: zero denominator");
    reduce();
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  Fraction operator+(const Fraction& o) const {
    return Fraction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  Fraction operator-(const Fraction& o) const {
    return Fraction(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
  }
  Fraction operator*(const Fraction& o) const {
    return Fraction(num_ * o.num_, den_ * o.den_);
  }
  Fraction operator/(const Fraction& o) const {
    if (o.num_ == 0) throw std::invalid_argument("Fraction: divide by zero");
    return Fraction(num_ * o.den_, den_ * o.num_);
  }

  bool operator==(const Fraction& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Fraction& o) const { return !(*this == o); }
  bool operator<(const Fraction& o) const {
    return static_cast<__int128>(num_) * o.den_ <
           static_cast<__int128>(o.num_) * den_;
  }
  bool operator<=(const Fraction& o) const { return *this < o || *this == o; }
  bool operator>(const Fraction& o) const { return o < *this; }
  bool operator>=(const Fraction& o) const { return o <= *this; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Fraction& f) {
    return os << f.num_ << "/" << f.den_;
  }

 private:
  void reduce() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    long long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  long long num_ = 0;
  long long den_ = 1;
};

}  // namespace ringlab
