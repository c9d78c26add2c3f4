#include "doctest.h"

#include "twistflow/suspension.hpp"
#include "twistflow/cylinder.hpp"

#include <cmath>

using namespace twistflow;
using namespace twistflow::suspension;

namespace {

// t in (0, 1/2) with b(t) = 1 (the bump peaks above 1), by bisection.
double bump_unit_time(const smooth::Bump& bump) {
    double lo = 0.05, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (bump.value(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("hamiltonian_eval: free outside the band, plug-in values inside") {
    auto spec0 = SuspensionSpec::create(0.0);
    CHECK(hamiltonian_eval(spec0, 0.33, 0.1, 0.7) == 0.5 * 0.7 * 0.7);

    auto spec = SuspensionSpec::create(0.5);
    double K = spec.band_K;
    CHECK(hamiltonian_eval(spec, 0.4, 0.12, K + 1.0) == 0.5 * (K + 1) * (K + 1));
    CHECK(hamiltonian_eval(spec, 0.4, 0.12, -K - 1.0) == 0.5 * (K + 1) * (K + 1));

    auto spec1 = SuspensionSpec::create(1.0);
    double tstar = bump_unit_time(spec1.bump);
    CHECK(hamiltonian_eval(spec1, tstar, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convexity validation gates epsilon") {
    CHECK_NOTHROW(SuspensionSpec::create(1.2));
    CHECK(SuspensionSpec::create(1.2).convexity_margin() > 0.5);
    CHECK_THROWS_AS(SuspensionSpec::create(2.5), std::invalid_argument);
    CHECK_THROWS_AS(SuspensionSpec::create(-0.1), std::invalid_argument);
}

TEST_CASE("time-1 map: unperturbed and far-band cases are the exact shear") {
    TimeOneMap map0(SuspensionSpec::create(0.0), IntegratorProfile::accurate());
    auto q = map0.apply({0.25, 0.5});
    CHECK(q.x == 0.75);
    CHECK(q.y == 0.5);

    TimeOneMap map(SuspensionSpec::create(0.5), IntegratorProfile::accurate());
    double K = map.spec().band_K;
    auto far = map.apply({0.3, K + 1.0});
    CHECK(far.x == doctest::Approx(std::fmod(0.3 + K + 1.0, 1.0)).epsilon(1e-15));
    CHECK(far.y == K + 1.0);
}

TEST_CASE("splitting integrator agrees with the adaptive reference") {
    auto spec = SuspensionSpec::create(0.3);
    TimeOneMap map(spec, IntegratorProfile::accurate());

    Rng rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 12; ++i) {
        CylinderPoint p{rng.uniform(), rng.uniform(-3.0, 3.0)};
        auto a = map.apply(p);
        auto b = reference_time1_map(spec, p, 1e-12);
        double dx = std::fabs(a.x - b.x);
        dx = std::fmin(dx, 1.0 - dx);  // circle distance
        worst = std::fmax(worst, std::fmax(dx, std::fabs(a.y - b.y)));
    }
    CHECK(worst < 1e-10);

    auto a = map.apply({0.0, 0.5});
    auto b = reference_time1_map(spec, {0.0, 0.5}, 1e-12);
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-11));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-11));
}

TEST_CASE("time-1 map regression fixture, epsilon=0.3 at (0, 0.5)") {
    // Frozen from the splitting integrator after cross-validation against the
    // adaptive reference above.
    TimeOneMap map(SuspensionSpec::create(0.3), IntegratorProfile::accurate());
    auto q = map.apply({0.0, 0.5});
    CHECK(q.x == doctest::Approx(0.95365976275505093).epsilon(1e-12));
    CHECK(q.y == doctest::Approx(0.96380931119732649).epsilon(1e-12));
}

TEST_CASE("Jacobian: symplectic and consistent with finite differences") {
    auto spec = SuspensionSpec::create(0.3);
    TimeOneMap map(spec, IntegratorProfile::accurate());

    Rng rng(99);
    for (int i = 0; i < 8; ++i) {
        CylinderPoint p{rng.uniform(), rng.uniform(-2.5, 2.5)};
        auto [q, M] = map.apply_with_jacobian(p);
        CHECK(std::fabs(M.det() - 1.0) < 1e-8);

        // central differences of the lifted map, step 1e-6
        double h = 1e-6;
        auto lift = [&](double x, double y) {
            map.apply_lifted(x, y);
            return std::pair{x, y};
        };
        auto [xp, yp] = lift(p.x + h, p.y);
        auto [xm, ym] = lift(p.x - h, p.y);
        auto [xq, yq] = lift(p.x, p.y + h);
        auto [xr, yr] = lift(p.x, p.y - h);
        CHECK(M.a11 == doctest::Approx((xp - xm) / (2 * h)).epsilon(1e-5));
        CHECK(M.a21 == doctest::Approx((yp - ym) / (2 * h)).epsilon(1e-5));
        CHECK(M.a12 == doctest::Approx((xq - xr) / (2 * h)).epsilon(1e-5));
        CHECK(M.a22 == doctest::Approx((yq - yr) / (2 * h)).epsilon(1e-5));
        (void)q;
    }

    // epsilon=0: derivative of the shear
    TimeOneMap map0(SuspensionSpec::create(0.0), IntegratorProfile::accurate());
    auto [q0, M0] = map0.apply_with_jacobian({0.9, -1.2});
    CHECK(M0.a11 == 1.0);
    CHECK(M0.a12 == 1.0);
    CHECK(M0.a21 == 0.0);
    CHECK(M0.a22 == 1.0);
    (void)q0;
}

TEST_CASE("legendre transform: identity branches and convex duality") {
    auto spec0 = SuspensionSpec::create(0.0);
    auto r0 = legendre_transform(spec0, 0.3, 0.4, 0.7);
    CHECK(r0.p == 0.7);
    CHECK(r0.lagrangian == doctest::Approx(0.245));

    auto spec = SuspensionSpec::create(0.3);
    double K = spec.band_K;
    auto rfar = legendre_transform(spec, 0.3, 0.4, K + 1.0);
    CHECK(rfar.p == K + 1.0);
    CHECK(rfar.lagrangian == 0.5 * (K + 1) * (K + 1));
    CHECK(lagrangian_hat_eval(spec, 0.1, 0.2, K + 2.0) == 0.5 * (K + 2) * (K + 2));

    // Round trip and duality on random samples across the band.
    Rng rng(5150);
    double worst_rt = 0.0, worst_dual = 0.0, min_conv = 1e300;
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform(), x = rng.uniform();
        double v = rng.uniform(-K - 2.0, K + 2.0);
        auto r = legendre_transform(spec, t, x, v);
        HPartials h = hamiltonian_partials(spec, t, x, r.p);
        worst_rt = std::fmax(worst_rt, std::fabs(h.Hy - v));
        worst_dual = std::fmax(worst_dual, std::fabs(r.lagrangian + h.H - r.p * v));

        // strict convexity of Lhat in v by finite differences
        double fd = 1e-4;
        double l2 = (lagrangian_hat_eval(spec, t, x, v + fd) - 2.0 * r.lagrangian +
                     lagrangian_hat_eval(spec, t, x, v - fd)) /
                    (fd * fd);
        min_conv = std::fmin(min_conv, l2);
    }
    CHECK(worst_rt < 1e-10);
    CHECK(worst_dual < 1e-12);
    CHECK(min_conv > 0.1);
}

TEST_CASE("legendre fixture, epsilon=0.3, t=0.5, x=0.25, v=0.4") {
    // p* verified by dH/dy(p*) = v to 1e-12 and Lhat* against a direct
    // supremum over a fine p-grid (oracle in this test).
    auto spec = SuspensionSpec::create(0.3);
    auto r = legendre_transform(spec, 0.5, 0.25, 0.4);
    HPartials h = hamiltonian_partials(spec, 0.5, 0.25, r.p);
    CHECK(std::fabs(h.Hy - 0.4) < 1e-12);

    // grid supremum of p*v - H(t,x,p)
    double best = -1e300;
    for (int i = -40000; i <= 40000; ++i) {
        double p = 0.4 + i * 5e-5;
        double val = p * 0.4 - hamiltonian_eval(spec, 0.5, 0.25, p);
        best = std::fmax(best, val);
    }
    CHECK(r.lagrangian == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("hamiltonian partials agree with finite differences") {
    auto spec = SuspensionSpec::create(0.7);
    double h = 3e-4;
    Rng rng(31);
    for (int i = 0; i < 40; ++i) {
        double t = rng.uniform(0.1, 0.9), x = rng.uniform(), y = rng.uniform(-11.0, 11.0);
        HPartials P = hamiltonian_partials(spec, t, x, y);
        auto H = [&](double tt, double xx, double yy) {
            return hamiltonian_eval(spec, tt, xx, yy);
        };
        CHECK(P.H == doctest::Approx(H(t, x, y)).epsilon(1e-13));
        CHECK(P.Hx == doctest::Approx((H(t, x + h, y) - H(t, x - h, y)) / (2 * h)).epsilon(2e-5));
        CHECK(P.Hy == doctest::Approx((H(t, x, y + h) - H(t, x, y - h)) / (2 * h)).epsilon(2e-5));
        CHECK(P.Hyy ==
              doctest::Approx((H(t, x, y + h) - 2 * H(t, x, y) + H(t, x, y - h)) / (h * h))
                  .epsilon(1e-4));
        CHECK(P.Hxx ==
              doctest::Approx((H(t, x + h, y) - 2 * H(t, x, y) + H(t, x - h, y)) / (h * h))
                  .epsilon(1e-4));
        CHECK(P.Hxy == doctest::Approx((H(t, x + h, y + h) - H(t, x + h, y - h) -
                                        H(t, x - h, y + h) + H(t, x - h, y - h)) /
                                       (4 * h * h))
                           .epsilon(1e-4));
        CHECK(P.Hty == doctest::Approx((H(t + h, x, y + h) - H(t + h, x, y - h) -
                                        H(t - h, x, y + h) + H(t - h, x, y - h)) /
                                       (4 * h * h))
                           .epsilon(1e-4));
    }
}

TEST_CASE("unreachable tolerance surfaces as a numerical error with residual") {
    TimeOneMap map(SuspensionSpec::create(0.3, 12.0, 1e-16), IntegratorProfile::accurate());
    try {
        map.apply({0.1, 0.5});
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.residual > 1e-16);
        CHECK(e.residual < 1e-9);
    }
}

TEST_CASE("completeness proxy: far-band flow preserves y exactly") {
    TimeOneMap map(SuspensionSpec::create(1.2), IntegratorProfile::fast());
    double K = map.spec().band_K;
    for (double y0 : {K + 0.1, K + 5.0, -K - 0.7}) {
        double x = 0.2, y = y0;
        for (int i = 0; i < 50; ++i) map.apply_lifted(x, y);
        CHECK(y == y0);
        CHECK(x == doctest::Approx(0.2 + 50.0 * y0).epsilon(1e-13));
    }
}
