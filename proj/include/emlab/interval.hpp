#pragma once

// Closed interval arithmetic with outward rounding. Only the operations the
// jet verifier needs: affine images, hulls, containment. Every computed bound
// is stepped one ulp outward, which over-encloses the exact image of any
// single floating-point operation.

#include <algorithm>
#include <cmath>
#include <limits>

namespace emlab {

struct Interval {
    double lo = 0.0, hi = 0.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {}
    static Interval point(double v) { return {v, v}; }

    bool contains(double v) const { return lo <= v && v <= hi; }
    bool subset_of(const Interval& o) const { return o.lo <= lo && hi <= o.hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

inline double step_down(double v) {
    return std::nextafter(v, -std::numeric_limits<double>::infinity());
}
inline double step_up(double v) {
    return std::nextafter(v, std::numeric_limits<double>::infinity());
}

inline Interval outward(double lo, double hi) { return {step_down(lo), step_up(hi)}; }

inline Interval iadd(const Interval& a, const Interval& b) {
    return outward(a.lo + b.lo, a.hi + b.hi);
}
inline Interval iadd(const Interval& a, double c) { return outward(a.lo + c, a.hi + c); }
inline Interval isub(const Interval& a, double c) { return outward(a.lo - c, a.hi - c); }
inline Interval ineg(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval imul(const Interval& a, double c) {
    double x = a.lo * c, y = a.hi * c;
    return outward(std::min(x, y), std::max(x, y));
}
inline Interval idiv(const Interval& a, double c) {
    double x = a.lo / c, y = a.hi / c;
    return outward(std::min(x, y), std::max(x, y));
}
inline Interval imul(const Interval& a, const Interval& b) {
    double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return outward(std::min(std::min(p1, p2), std::min(p3, p4)),
                   std::max(std::max(p1, p2), std::max(p3, p4)));
}
inline Interval isquare(const Interval& a) {
    if (a.lo >= 0) return outward(a.lo * a.lo, a.hi * a.hi);
    if (a.hi <= 0) return outward(a.hi * a.hi, a.lo * a.lo);
    double m = std::max(a.lo * a.lo, a.hi * a.hi);
    return outward(0.0, m);
}
inline Interval ihull(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

}  // namespace emlab
