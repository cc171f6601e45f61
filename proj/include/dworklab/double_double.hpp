#pragma once

#include <cmath>

namespace dworklab {

// Unevaluated sum hi + lo with |lo| <= ulp(hi) / 2.
struct DoubleDouble {
    double hi = 0, lo = 0;

    static DoubleDouble two_sum(double a, double b) {
        double s = a + b;
        double bb = s - a;
        double err = (a - (s - bb)) + (b - bb);
        return quick(s, err);
    }
    static DoubleDouble two_prod(double a, double b) {
        double p = a * b;
        return {p, std::fma(a, b, -p)};
    }
    static DoubleDouble quick(double a, double b) {
        double s = a + b;
        return {s, b - (s - a)};
    }

    friend DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
        DoubleDouble s = two_sum(a.hi, b.hi);
        DoubleDouble t = two_sum(a.lo, b.lo);
        s = quick(s.hi, s.lo + t.hi);
        return quick(s.hi, s.lo + t.lo);
    }
    friend DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
    friend DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }
    friend DoubleDouble operator*(DoubleDouble a, double b) {
        DoubleDouble p = two_prod(a.hi, b);
        return quick(p.hi, p.lo + a.lo * b);
    }
    friend DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
        DoubleDouble p = two_prod(a.hi, b.hi);
        return quick(p.hi, p.lo + (a.hi * b.lo + a.lo * b.hi));
    }
    double value() const { return hi + lo; }
};

inline constexpr DoubleDouble kTwoPi{6.283185307179586, 2.4492935982947064e-16};

// Representative of x mod 2 pi in [-pi, pi].
inline double reduce_two_pi(DoubleDouble x) {
    double k = std::nearbyint(x.hi / kTwoPi.hi);
    DoubleDouble r = x - kTwoPi * k;
    return r.value();
}

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0, comp = 0;
    void add(double x) {
        double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace dworklab
