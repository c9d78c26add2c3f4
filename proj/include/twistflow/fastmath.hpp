#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

// Branch-free elementary functions for the integrator hot loops. Pure
// arithmetic (no libm calls), so results are identical across platforms and
// the compiler can vectorize lane loops that use them.

namespace twistflow::fastmath {

// sin(2*pi*x) and cos(2*pi*x). Octant reduction, then degree-15/16 Taylor
// polynomials of sin/cos(2*pi*r) on |r| <= 1/8 (max error a few ulp).
struct SinCos {
    double s, c;
};

inline SinCos sincos_2pi(double x) {
    constexpr double TWO_PI = 6.283185307179586476925286766559;
    // Taylor coefficients of sin(2*pi*r) in z = r^2 (odd part factored as r*P(z)).
    constexpr double S1 = TWO_PI;
    constexpr double S3 = -41.341702240399762;    // -(2pi)^3/3!
    constexpr double S5 = 81.605249276075057;     //  (2pi)^5/5!
    constexpr double S7 = -76.705859753061389;    // -(2pi)^7/7!
    constexpr double S9 = 42.058693944897655;     //  (2pi)^9/9!
    constexpr double S11 = -15.09464257682299;    // -(2pi)^11/11!
    constexpr double S13 = 3.819952584848282;     //  (2pi)^13/13!
    constexpr double S15 = -0.71812230177850056;  // -(2pi)^15/15!
    constexpr double C0 = 1.0;
    constexpr double C2 = -19.739208802178716;    // -(2pi)^2/2!
    constexpr double C4 = 64.939394022668296;     //  (2pi)^4/4!
    constexpr double C6 = -85.456817206693728;    // -(2pi)^6/6!
    constexpr double C8 = 60.244641371876661;     //  (2pi)^8/8!
    constexpr double C10 = -26.426256783374399;   // -(2pi)^10/10!
    constexpr double C12 = 7.9035363713184692;    //  (2pi)^12/12!
    constexpr double C14 = -1.714390711088672;    // -(2pi)^14/14!
    constexpr double C16 = 0.28200596845579123;   //  (2pi)^16/16!

    double u = x - std::nearbyint(x);  // [-0.5, 0.5]
    double a = std::fabs(u);
    double sgn = u < 0.0 ? -1.0 : 1.0;
    double m = std::nearbyint(4.0 * a);  // quadrant index 0, 1 or 2
    double r = a - 0.25 * m;             // |r| <= 1/8
    double z = r * r;

    double ps = S1 + z * (S3 + z * (S5 + z * (S7 + z * (S9 + z * (S11 + z * (S13 + z * S15))))));
    double S = r * ps;
    double C = C0 + z * (C2 + z * (C4 + z * (C6 + z * (C8 + z * (C10 + z * (C12 + z * (C14 + z * C16)))))));

    // m == 0: (S, C);  m == 1: (C, -S);  m == 2: (-S, -C)
    double s_abs = (m == 1.0) ? C : ((m == 2.0) ? -S : S);
    double c_val = (m == 1.0) ? -S : ((m == 2.0) ? -C : C);
    return {sgn * s_abs, c_val};
}

// exp(x) with ~1 ulp accuracy; saturates to 0 / inf outside the double range.
inline double fast_exp(double x) {
    constexpr double LOG2E = 1.4426950408889634073599246810019;
    // ln 2 split so that n * LN2_HI is exact for |n| < 2^20.
    constexpr double LN2_HI = 6.93147180369123816490e-01;
    constexpr double LN2_LO = 1.90821492927058770002e-10;

    double xc = x < -746.0 ? -746.0 : (x > 710.0 ? 710.0 : x);
    double n = std::nearbyint(xc * LOG2E);
    double r = (xc - n * LN2_HI) - n * LN2_LO;  // |r| <= 0.3466

    // Taylor of e^r to degree 13.
    double p = 1.0 / 6227020800.0;  // 1/13!
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;

    // Scale by 2^n in two halves so |n| up to ~2000 is representable.
    auto pow2i = [](int k) {
        return std::bit_cast<double>(static_cast<std::uint64_t>(k + 1023) << 52);
    };
    int ni = static_cast<int>(n);
    int n1 = ni / 2;
    int n2 = ni - n1;
    double v = p * pow2i(n1) * pow2i(n2);
    // Saturate the clamped tails.
    v = x <= -746.0 ? 0.0 : v;
    v = x >= 710.0 ? std::numeric_limits<double>::infinity() : v;
    return v;
}

// x mod 1 in [0, 1).
inline double mod1(double x) {
    double r = x - std::floor(x);
    r = r >= 1.0 ? r - 1.0 : r;
    return r < 0.0 ? 0.0 : r;
}

}  // namespace twistflow::fastmath
