#include "doctest.h"

#include "twistflow/finsler.hpp"

#include <cmath>

using namespace twistflow;
using namespace twistflow::finsler;

TEST_CASE("chebyshev: fit, eval, antiderivative") {
    auto s = ChebSeries::fit([](double x) { return std::sin(x); }, 0.0, 2.0, 64);
    for (double x : {0.0, 0.31, 1.0, 1.7, 2.0})
        CHECK(s.eval(x) == doctest::Approx(std::sin(x)).epsilon(1e-13));
    auto S = s.antiderivative(0.0);
    for (double x : {0.2, 0.9, 2.0})
        CHECK(S.eval(x) == doctest::Approx(1.0 - std::cos(x)).epsilon(1e-13));
    CHECK(s.integral() == doctest::Approx(1.0 - std::cos(2.0)).epsilon(1e-13));
}

TEST_CASE("profile constants solve the gluing inequalities") {
    auto pc = solve_profile_constants(12.0);
    CHECK(pc.offset == doctest::Approx(105.0));
    CHECK(pc.A == doctest::Approx(1421.0));
    CHECK(pc.B == doctest::Approx(203.0));
    CHECK(std::sqrt(pc.B) > 14.0);  // sqrt(B) > D+2

    auto pc2 = solve_profile_constants(2.0);
    CHECK(std::sqrt(pc2.B) > 4.0);
    CHECK(pc2.offset > 0.5 * 3.0 * 3.0);
}

TEST_CASE("build_profile: certified convex blend, exact inner/outer pieces") {
    for (double D : {2.0, 12.0}) {
        auto pc = solve_profile_constants(D);
        auto h = build_profile(D, pc.A, pc.B, pc.offset, ProfileSide::plus);

        // inner piece exact
        CHECK(h.value(D) == 0.5 * D * D + pc.offset);
        CHECK(h.value(0.0) == pc.offset);
        // outer piece exact
        double yo = D + 3.0;
        CHECK(h.value(yo) == std::sqrt(pc.A + pc.B * yo * yo));

        // junction continuity at both blend ends
        double y1 = D + 1.0, y2 = D + 2.0;
        auto in1 = h.pack(y1 - 1e-13), bl1 = h.pack(y1 + 1e-13);
        CHECK(std::fabs(in1.h - bl1.h) < 1e-11);
        CHECK(std::fabs(in1.h1 - bl1.h1) < 1e-11);
        auto bl2 = h.pack(y2 - 1e-13), out2 = h.pack(y2 + 1e-13);
        CHECK(std::fabs(bl2.h - out2.h) < 1e-10);
        CHECK(std::fabs(bl2.h1 - out2.h1) < 1e-10);

        // convexity across the blend on a fine grid
        double min_h2 = 1e300;
        for (int i = 0; i <= 10000; ++i) {
            double y = y1 + (y2 - y1) * i / 10000.0;
            min_h2 = std::fmin(min_h2, h.pack(y).h2);
        }
        CHECK(min_h2 > 0.0);

        // pack derivatives vs finite differences inside the blend
        for (double y : {y1 + 0.2, y1 + 0.5, y1 + 0.9}) {
            auto p = h.pack(y);
            double fd = 1e-6;
            CHECK(p.h1 == doctest::Approx((h.value(y + fd) - h.value(y - fd)) / (2 * fd))
                              .epsilon(1e-7));
            fd = 1e-4;  // second difference needs the larger step (roundoff)
            CHECK(p.h2 == doctest::Approx((h.value(y + fd) - 2 * h.value(y) + h.value(y - fd)) /
                                          (fd * fd))
                              .epsilon(1e-5));
        }

        // minus side mirrors
        auto hm = build_profile(D, pc.A, pc.B, pc.offset, ProfileSide::minus);
        CHECK(hm.value(-yo) == h.value(yo));
        CHECK(hm.pack(-yo).h1 == doctest::Approx(-h.pack(yo).h1).epsilon(1e-14));
    }
}

TEST_CASE("build_profile admissibility errors name the violated inequality") {
    CHECK_THROWS_WITH_AS(build_profile(2.0, 36.0, 8.0, 10.0, ProfileSide::plus),
                         doctest::Contains("sqrt(B) > D+2"), std::invalid_argument);
    // offset too small for a convex completion
    CHECK_THROWS_AS(build_profile(2.0, 36.0, 18.0, 1.0, ProfileSide::plus),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_profile(-1.0, 36.0, 18.0, 10.0, ProfileSide::plus),
                    std::invalid_argument);
}

TEST_CASE("lagrangian_full_eval: three pieces") {
    auto model0 = FinslerModel::create(0.0);
    double C = model0.lagrangian_offset();
    double D = model0.D();
    CHECK(model0.lagrangian_full_eval(0.1, 0.2, 0.4) == 0.5 * 0.4 * 0.4 + C);
    CHECK(model0.lagrangian_full_eval(0.7, 0.9, -2.0) == 0.5 * 4.0 + C);
    double yo = D + 3.0;
    CHECK(model0.lagrangian_full_eval(0.0, 0.0, yo) ==
          std::sqrt(model0.A() + model0.B() * yo * yo));

    auto model = FinslerModel::create(0.3);
    double got = model.lagrangian_full_eval(0.5, 0.25, 0.4);
    double hat = suspension::lagrangian_hat_eval(model.spec(), 0.5, 0.25, 0.4);
    CHECK(got == hat + model.lagrangian_offset());
}

TEST_CASE("finsler_eval: sectors, cone agreement, homogeneity, positivity") {
    CHECK(flat_sector_norm(1.0, 1.0, -3.0, 4.0) == 5.0);
    CHECK_THROWS_AS(flat_sector_norm(1.0, 1.0, 0.0, 0.0), std::domain_error);

    auto model = FinslerModel::create(0.3);
    double D = model.D();
    CHECK_THROWS_AS(model.finsler_eval(0.0, 0.0, 0.0, 0.0), std::domain_error);

    // v1 <= 0 sector is the flat norm
    CHECK(model.finsler_eval(0.1, 0.2, -3.0, 4.0) ==
          std::sqrt(model.A() * 9.0 + model.B() * 16.0));

    // both branch formulas agree where L = h± (slope beyond D+2)
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        double t = rng.uniform(), x = rng.uniform();
        double v1 = rng.uniform(1e-3, 0.5);
        double slope = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(D + 2.0, D + 40.0);
        double v2 = slope * v1;
        double F = model.finsler_eval(t, x, v1, v2);
        double F0 = flat_sector_norm(model.A(), model.B(), v1, v2);
        CHECK(std::fabs(F - F0) <= 1e-12 * F0);
    }

    // positive homogeneity, and F > 0 on random nonzero vectors
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform(), x = rng.uniform();
        double phi = rng.uniform(0.0, 2.0 * M_PI);
        double v1 = std::cos(phi), v2 = std::sin(phi);
        if (v1 == 0.0) v1 = 1e-9;
        double F = model.finsler_eval(t, x, v1, v2);
        CHECK(F > 0.0);
        for (double lam : {0.5, 2.0, 10.0}) {
            double Fl = model.finsler_eval(t, x, lam * v1, lam * v2);
            worst = std::fmax(worst, std::fabs(Fl - lam * F) / (lam * F));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("fundamental tensor: closed form vs finite differences, positive definite") {
    auto model = FinslerModel::create(0.3);

    // v1 <= 0 sector: constant Hessian diag(A, B); identity when A = B = 1
    Mat2 g0 = model.fundamental_tensor(0.0, 0.0, -0.2, 0.7);
    CHECK(g0.a11 == model.A());
    CHECK(g0.a22 == model.B());
    CHECK(g0.a12 == 0.0);

    Rng rng(4242);
    double min_eig = 1e300, worst_rel = 0.0;
    const double h = 1e-4;
    for (int i = 0; i < 2000; ++i) {
        double t = rng.uniform(), x = rng.uniform();
        double v1, v2;
        if (i % 50 == 0) {
            v1 = (i % 100 == 0 ? 1e-3 : -1e-3);
            v2 = rng.uniform() < 0.5 ? -1.0 : 1.0;
        } else {
            double phi = rng.uniform(0.0, 2.0 * M_PI);
            v1 = std::cos(phi);
            v2 = std::sin(phi);
            if (v1 == 0.0) v1 = 1e-9;
        }
        Mat2 g = model.fundamental_tensor(t, x, v1, v2);
        min_eig = std::fmin(min_eig, g.symmetric_min_eigenvalue());
        auto E = [&](double a, double b) {
            double F = model.finsler_eval(t, x, a, b);
            return 0.5 * F * F;
        };
        double g11 = (E(v1 + h, v2) - 2 * E(v1, v2) + E(v1 - h, v2)) / (h * h);
        double g22 = (E(v1, v2 + h) - 2 * E(v1, v2) + E(v1, v2 - h)) / (h * h);
        double g12 =
            (E(v1 + h, v2 + h) - E(v1 + h, v2 - h) - E(v1 - h, v2 + h) + E(v1 - h, v2 - h)) /
            (4 * h * h);
        // The FD truncation scale grows like E * w^4 / v1^2 (steep slopes in
        // the blend); normalize the comparison by it.
        double w = v2 / v1;
        double scale = 1.0 + std::fabs(E(v1, v2)) * (1.0 + w * w * w * w / (v1 * v1));
        double e = std::fmax(std::fabs(g.a11 - g11),
                             std::fmax(std::fabs(g.a22 - g22), std::fabs(g.a12 - g12)));
        worst_rel = std::fmax(worst_rel, e / scale);
    }
    CHECK(min_eig > 0.0);
    CHECK(worst_rel <= 1e-5);

    // in the flat sector the Hessian is exactly constant and FD is exact
    {
        auto E0 = [&](double a, double b) {
            double F = model.finsler_eval(0.2, 0.3, a, b);
            return 0.5 * F * F;
        };
        double g11 = (E0(-0.5 + h, 0.8) - 2 * E0(-0.5, 0.8) + E0(-0.5 - h, 0.8)) / (h * h);
        CHECK(g11 == doctest::Approx(model.A()).epsilon(1e-6));
    }

    // rank-one identity v^T (Df x Df) v = (Df . v)^2 for the band Lagrangian
    auto lp = model.lagrangian_slope_pack(0.3, 0.6, 0.4);
    double d1 = lp.h - 0.4 * lp.h1, d2 = lp.h1;
    for (int i = 0; i < 50; ++i) {
        double w1 = rng.uniform(-2.0, 2.0), w2 = rng.uniform(-2.0, 2.0);
        double quad = w1 * w1 * d1 * d1 + 2 * w1 * w2 * d1 * d2 + w2 * w2 * d2 * d2;
        double dot = d1 * w1 + d2 * w2;
        CHECK(quad == doctest::Approx(dot * dot).epsilon(1e-12));
    }
}

TEST_CASE("flat reference: epsilon=0 specialization") {
    auto model0 = FinslerModel::create(0.0);
    double C = model0.lagrangian_offset();
    CHECK(model0.flat_reference_eval(0.0, 0.0, 1.0, 0.5) == 0.125 + C);
    CHECK(model0.flat_reference_eval(0.3, 0.9, -3.0, 4.0) ==
          std::sqrt(model0.A() * 9.0 + model0.B() * 16.0));

    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        double t = rng.uniform(), x = rng.uniform();
        double phi = rng.uniform(0.0, 2.0 * M_PI);
        double v1 = std::cos(phi), v2 = std::sin(phi);
        if (v1 == 0.0) v1 = 1e-9;
        CHECK(model0.finsler_eval(t, x, v1, v2) == model0.flat_reference_eval(t, x, v1, v2));
    }
}

TEST_CASE("cr_distance: zero in the flat limit, linear epsilon scaling") {
    auto model0 = FinslerModel::create(0.0);
    CrRegion small{3, 3, 5, 1.2};
    CHECK(cr_distance(model0, 1, small) == 0.0);

    double d_full = cr_distance(FinslerModel::create(0.1), 1, small);
    double d_half = cr_distance(FinslerModel::create(0.05), 1, small);
    CHECK(d_full > 0.0);
    CHECK(d_half <= 0.6 * d_full);
}

TEST_CASE("model JSON round trip reproduces evaluations") {
    auto model = FinslerModel::create(0.3);
    auto text = model.to_json();
    auto back = FinslerModel::from_json(text);
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        double t = rng.uniform(), x = rng.uniform();
        double phi = rng.uniform(0.0, 2.0 * M_PI);
        double v1 = std::cos(phi), v2 = std::sin(phi);
        if (v1 == 0.0) v1 = 1e-9;
        CHECK(model.finsler_eval(t, x, v1, v2) == back.finsler_eval(t, x, v1, v2));
    }
    CHECK(back.lagrangian_offset() == model.lagrangian_offset());
    CHECK(back.A() == model.A());
}
