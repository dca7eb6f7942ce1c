#pragma once

#include <algorithm>
#include <limits>
#include <vector>

namespace levyeq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Left-open, right-closed interval ]lo, hi] of the real line. Infinite ends are
/// allowed; ]m, +inf] is read as ]m, +inf[.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return !(lo < hi); }
  bool bounded() const { return lo > -kInf && hi < kInf; }
  double length() const { return hi - lo; }
  bool contains(double y) const { return lo < y && y <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

/// Finite union of disjoint intervals kept in ascending order.
class Region {
 public:
  Region() = default;
  Region(std::initializer_list<Interval> parts) : Region(std::vector<Interval>(parts)) {}
  explicit Region(std::vector<Interval> parts) {
    for (const auto& p : parts) {
      if (!p.empty()) parts_.push_back(p);
    }
    std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  }

  static Region real_line() { return Region{{-kInf, kInf}}; }

  /// ]-inf, -1/m] U ]1/m, +inf[, the complement of the identity region.
  static Region outside_identity(int m) {
    const double c = 1.0 / m;
    return Region{{-kInf, -c}, {c, kInf}};
  }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }

  bool contains(double y) const {
    return std::any_of(parts_.begin(), parts_.end(), [y](const Interval& p) { return p.contains(y); });
  }

  Region intersect(const Interval& iv) const {
    std::vector<Interval> out;
    for (const auto& p : parts_) out.push_back(levyeq::intersect(p, iv));
    return Region(std::move(out));
  }

  Region intersect(const Region& other) const {
    std::vector<Interval> out;
    for (const auto& p : parts_) {
      for (const auto& q : other.parts_) out.push_back(levyeq::intersect(p, q));
    }
    return Region(std::move(out));
  }

 private:
  std::vector<Interval> parts_;
};

}  // namespace levyeq
