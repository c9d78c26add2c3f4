#pragma once

#include "twistflow/fastmath.hpp"

// Smooth building blocks of the Hamiltonian family: the C^inf step
// s(u) = 1/(1 + e^{1/u - 1/(1-u)}), the 1-periodic unit-mass time bump, the
// y-cutoff plateau and the x-potential cos(2*pi*x), each with the derivative
// pack the integrators and variational equations need.

namespace twistflow::smooth {

struct StepPack {
    double s, s1, s2, s3;
};

// s and its first three derivatives. s == 0 for u <= 0, s == 1 for u >= 1,
// strictly increasing in between, flat to all orders at both ends.
inline StepPack step_pack(double u) {
    if (u <= 0.0) return {0.0, 0.0, 0.0, 0.0};
    if (u >= 1.0) return {1.0, 0.0, 0.0, 0.0};
    double uc = u < 1e-9 ? 1e-9 : (u > 1.0 - 1e-9 ? 1.0 - 1e-9 : u);
    double iu = 1.0 / uc;
    double iv = 1.0 / (1.0 - uc);
    double iu2 = iu * iu, iv2 = iv * iv;
    double g = iu - iv;
    double g1 = -(iu2 + iv2);
    double g2 = 2.0 * (iu2 * iu - iv2 * iv);
    double g3 = -6.0 * (iu2 * iu2 + iv2 * iv2);

    double E = fastmath::fast_exp(g);
    double s = 1.0 / (1.0 + E);
    double P = s * (1.0 - s);
    double Q = 1.0 - 2.0 * s;

    StepPack out;
    out.s = s;
    out.s1 = -g1 * P;
    out.s2 = -g2 * P + g1 * g1 * P * Q;
    out.s3 = -g3 * P + 3.0 * g1 * g2 * P * Q - g1 * g1 * g1 * P * (Q * Q - 2.0 * P);
    return out;
}

inline double step(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double g = 1.0 / u - 1.0 / (1.0 - u);
    return 1.0 / (1.0 + fastmath::fast_exp(g));
}

// Cutoff c(y): 1 on [-plateau, plateau], 0 for |y| >= edge, a scaled step in
// between.
struct CutoffShape {
    double plateau = 4.0;
    double edge = 11.5;

    double width() const { return edge - plateau; }

    double value(double y) const { return step((edge - std::fabs(y)) / width()); }

    struct Pack {
        double c, c1, c2, c3;
    };

    Pack pack(double y) const {
        double w = width();
        double ay = std::fabs(y);
        double sgn = y < 0.0 ? -1.0 : 1.0;
        StepPack sp = step_pack((edge - ay) / w);
        double i1 = -sgn / w;
        return {sp.s, sp.s1 * i1, sp.s2 / (w * w), sp.s3 * i1 / (w * w)};
    }
};

// 1-periodic time bump b(t) = exp(1 - 1/(4t(1-t))) / I0 on (0,1), zero (to
// all orders) at integer t, with unit integral over one period.
struct Bump {
    double inv_norm;  // 1/I0

    static double raw(double t) {
        double tau = t - std::floor(t);
        double q = 4.0 * tau * (1.0 - tau);
        if (q <= 1e-12) return 0.0;
        return fastmath::fast_exp(1.0 - 1.0 / q);
    }

    static Bump make() {
        // Composite Simpson; the integrand is smooth and flat at the ends.
        const int n = 1 << 15;
        double h = 1.0 / n;
        double acc = 0.0;
        for (int i = 1; i < n; ++i) acc += raw(i * h) * ((i & 1) ? 4.0 : 2.0);
        return {1.0 / (acc * h / 3.0)};
    }

    double value(double t) const { return raw(t) * inv_norm; }

    struct Pack {
        double b, b1, b2;
    };

    Pack pack(double t) const {
        double tau = t - std::floor(t);
        double q = tau * (1.0 - tau);
        if (4.0 * q <= 1e-12) return {0.0, 0.0, 0.0};
        double b = fastmath::fast_exp(1.0 - 0.25 / q) * inv_norm;
        double qp = 1.0 - 2.0 * tau;
        double E1 = 0.25 * qp / (q * q);
        double E2 = -0.5 * (1.0 + qp * qp / q) / (q * q);
        return {b, b * E1, b * (E2 + E1 * E1)};
    }
};

// Potential V(x) = cos(2*pi*x) with derivatives.
struct PotentialPack {
    double V, V1, V2, V3;
};

inline PotentialPack potential_pack(double x) {
    constexpr double TP = 6.2831853071795864769;
    constexpr double TP2 = TP * TP;
    auto [s, c] = fastmath::sincos_2pi(x);
    return {c, -TP * s, -TP2 * c, TP2 * TP * s};
}

}  // namespace twistflow::smooth
