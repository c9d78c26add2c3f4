#pragma once

#include "twistflow/core.hpp"

#include <array>
#include <cstddef>

namespace twistflow::ode {

// Dormand-Prince 5(4) with a standard PI-free step controller. Deterministic:
// fixed initial step heuristic, no randomness, no time-dependent state.
template <std::size_t N, typename RHS>
std::array<double, N> integrate_dopri5(RHS&& rhs, double t0, double t1,
                                       std::array<double, N> y, double rtol, double atol,
                                       const char* what = "dopri5") {
    using State = std::array<double, N>;

    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                     e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

    double dir = t1 >= t0 ? 1.0 : -1.0;
    double span = std::fabs(t1 - t0);
    if (span == 0.0) return y;

    double h = dir * std::fmin(0.01, span);
    double t = t0;
    State k1, k2, k3, k4, k5, k6, k7, ytmp, y5;
    rhs(t, y, k1);

    const int max_steps = 2'000'000;
    for (int step = 0; step < max_steps; ++step) {
        if ((t - t1) * dir >= 0.0) return y;
        if ((t + h - t1) * dir > 0.0) h = t1 - t;

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, y5, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
            double sc = atol + rtol * std::fmax(std::fabs(y[i]), std::fabs(y5[i]));
            double q = e / sc;
            err += q * q;
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            t += h;
            y = y5;
            k1 = k7;  // FSAL
        }
        double fac = 0.9 * std::pow(err > 1e-30 ? err : 1e-30, -0.2);
        fac = std::fmin(5.0, std::fmax(0.2, fac));
        h *= fac;
        if (std::fabs(h) < 1e-14 * span)
            throw NumericalError(std::string(what) + ": step size underflow", err);
    }
    throw NumericalError(std::string(what) + ": step budget exhausted", 0.0);
}

}  // namespace twistflow::ode
