#include "doctest.h"

#include "twistflow/chaos.hpp"
#include "twistflow/kick.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace twistflow;
using namespace twistflow::chaos;

TEST_CASE("ftle of the shear: parabolic growth bound") {
    auto sys = shear_system();
    // closed form: (1/n) log || [[1,n],[0,1]] ||
    int n = 1000;
    Mat2 M{1.0, static_cast<double>(n), 0.0, 1.0};
    double expected = std::log(M.norm2()) / n;
    CHECK(expected <= 0.01);

    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        double v = ftle(sys, {rng.uniform(), rng.uniform(-2.0, 2.0)}, n);
        CHECK(v == doctest::Approx(expected).epsilon(1e-10));
        CHECK(v <= 0.01);
    }
    CHECK_THROWS_AS(ftle(sys, {0.0, 0.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(ftle_field(sys, GridSpec{0.0, 1.0, -1.0, 1.0, 1, 8}, 10),
                    std::invalid_argument);
}

TEST_CASE("ftle outside the band equals the shear value") {
    auto spec = cylinder::TwistMapSpec::create(0.5, 12.0, 1e-9,
                                               suspension::IntegratorProfile::fast());
    auto sys = twist_system(spec);
    double far = ftle(sys, {0.3, spec.band_K() + 1.0}, 1000);
    Mat2 M{1.0, 1000.0, 0.0, 1.0};
    CHECK(far == doctest::Approx(std::log(M.norm2()) / 1000).epsilon(1e-12));
    CHECK(far <= 0.01);
}

TEST_CASE("ftle at the strong kick: positive, matches the divergence oracle") {
    auto spec = cylinder::TwistMapSpec::create(1.2, 12.0, 1e-9,
                                               suspension::IntegratorProfile::fast());
    auto sys = twist_system(spec);
    double lam = ftle(sys, {0.5, 0.0}, 1000);
    CHECK(lam > 0.05);
    double oracle = orbit_divergence_exponent(sys, {0.5, 0.0}, 1000);
    CHECK(std::fabs(lam - oracle) / lam < 0.10);

    // 20 random chaotic-region samples
    Rng rng(99);
    int tested = 0;
    while (tested < 20) {
        CylinderPoint p{rng.uniform(), rng.uniform(-0.3, 0.3)};
        double a = ftle(sys, p, 400);
        if (a < 0.5) continue;  // skip sticky islands
        double b = orbit_divergence_exponent(sys, p, 400);
        CHECK(std::fabs(a - b) / a < 0.10);
        ++tested;
    }
}

TEST_CASE("ftle_field: serial reference and lockstep kernel agree bitwise") {
    auto spec = cylinder::TwistMapSpec::create(1.2, 12.0, 1e-9,
                                               suspension::IntegratorProfile::fast());
    auto sys = twist_system(spec);
    CHECK(bool(sys.block_step));

    // grid straddling plateau, transition and far regions
    GridSpec grid{0.0, 1.0, -0.5, 12.5, 23, 9};
    auto serial = ftle_field_serial(sys, grid, 40);
    auto parallel = ftle_field(sys, grid, 40);
    REQUIRE(serial.values.size() == parallel.values.size());
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < serial.values.size(); ++i)
        mismatches += serial.values[i] != parallel.values[i] ? 1 : 0;
    CHECK(mismatches == 0);

    // determinism: a second run reproduces the field bit for bit
    auto again = ftle_field(sys, grid, 40);
    std::size_t drift = 0;
    for (std::size_t i = 0; i < again.values.size(); ++i)
        drift += again.values[i] != parallel.values[i] ? 1 : 0;
    CHECK(drift == 0);

    // far rows carry the shear value
    Mat2 M{1.0, 40.0, 0.0, 1.0};
    double shear_val = std::log(M.norm2()) / 40;
    for (int i = 0; i < grid.nx; ++i) {
        double v = parallel.value(i, grid.ny - 1);  // y ~ 11.8, beyond the cutoff
        CHECK(v == doctest::Approx(shear_val).epsilon(1e-12));
    }

    // generic path (no block kernel): shear system, serial == parallel
    auto sh = shear_system();
    auto s1 = ftle_field_serial(sh, GridSpec{0.0, 1.0, -1.0, 1.0, 17, 5}, 25);
    auto s2 = ftle_field(sh, GridSpec{0.0, 1.0, -1.0, 1.0, 17, 5}, 25);
    for (std::size_t i = 0; i < s1.values.size(); ++i) CHECK(s1.values[i] == s2.values[i]);
}

TEST_CASE("island area and entropy estimators") {
    auto spec0 = cylinder::TwistMapSpec::create(0.0);
    auto sys0 = twist_system(spec0);
    GridSpec grid{0.0, 1.0, -0.5, 0.5, 24, 24};
    auto field0 = ftle_field(sys0, grid, 1000, 0.05);
    CHECK(island_area(field0) == 0.0);
    CHECK(metric_entropy_estimate(field0) <= 0.01 * 1.0);

    auto spec = cylinder::TwistMapSpec::create(1.2, 12.0, 1e-9,
                                               suspension::IntegratorProfile::fast());
    auto sys = twist_system(spec);
    auto field = ftle_field(sys, grid, 300, 0.05);
    CHECK(island_area(field, field.max_value() + 1.0) == 0.0);

    // monotone nonincreasing in the threshold
    double prev = 1e300;
    for (double thr : {0.0, 0.05, 0.2, 0.5, 1.0, 2.0}) {
        double a = island_area(field, thr);
        CHECK(a <= prev);
        prev = a;
    }

    // entropy >= threshold * island_area for any threshold
    double entropy = metric_entropy_estimate(field);
    CHECK(entropy > 0.0);
    for (double thr : {0.0, 0.05, 0.3, 1.0})
        CHECK(entropy >= thr * island_area(field, thr) - 1e-12);

    // doubling the iteration count moves the estimate by < 20%
    auto field2 = ftle_field(sys, grid, 600, 0.05);
    double e2 = metric_entropy_estimate(field2);
    CHECK(std::fabs(e2 - entropy) / entropy < 0.20);
}

TEST_CASE("kam_circles: integrable and far-band cases") {
    auto spec0 = cylinder::TwistMapSpec::create(0.0);
    auto sys0 = twist_system(spec0);
    auto rep = kam_circles(sys0, -1.0, 1.0, 20, 1000);
    CHECK(rep.circle_like_fraction == 1.0);
    for (const auto& s : rep.samples) CHECK(s.oscillation == 0.0);

    // far samples oscillate by exactly zero whatever epsilon is
    auto spec = cylinder::TwistMapSpec::create(0.5, 12.0, 1e-9,
                                               suspension::IntegratorProfile::fast());
    auto sys = twist_system(spec);
    auto far = kam_circles(sys, spec.band_K() + 0.5, spec.band_K() + 1.5, 6, 1000);
    for (const auto& s : far.samples) CHECK(s.oscillation == 0.0);

    CHECK_THROWS_AS(kam_circles(sys0, -1.0, 1.0, 4, 10), std::invalid_argument);
}

TEST_CASE("kam_circles at epsilon=0.05: resonance oscillation dominates") {
    // The y=0 resonance of this family has half-width 2*sqrt(eps) ~ 0.45, so
    // the 0.05 oscillation threshold classifies essentially every sampled
    // orbit as non-circle-like; the measured fraction is frozen here.
    auto spec = cylinder::TwistMapSpec::create(0.05, 12.0, 1e-9,
                                               suspension::IntegratorProfile::fast());
    auto sys = twist_system(spec);
    auto rep = kam_circles(sys, -1.0, 1.0, 20, 1000);
    CHECK(rep.circle_like_fraction == 0.0);
    int big_osc = 0;
    for (const auto& s : rep.samples) big_osc += s.oscillation > 0.05 ? 1 : 0;
    CHECK(big_osc >= 18);  // the two quiet samples fail on x-fill instead
    // with the oscillation threshold matched to the resonance scale, the
    // rotational circles between resonances are recovered (frozen value)
    auto relaxed = kam_circles(sys, -1.0, 1.0, 20, 1000, 0.75, 0.05);
    CHECK(relaxed.circle_like_fraction == doctest::Approx(0.45));
}

TEST_CASE("field CSV and binary round trip") {
    auto sys = shear_system();
    GridSpec grid{0.0, 1.0, -0.25, 0.75, 7, 5};
    auto field = ftle_field(sys, grid, 50, 0.03);

    auto csv = field_to_csv(field);
    CHECK(csv.find("x,y,ftle") != std::string::npos);

    auto path = (std::filesystem::temp_directory_path() / "twistflow_field_test.bin").string();
    field_to_binary(field, path);
    auto back = field_from_binary(path);
    CHECK(back.grid.nx == field.grid.nx);
    CHECK(back.grid.ny == field.grid.ny);
    CHECK(back.n_iter == field.n_iter);
    CHECK(back.threshold == field.threshold);
    REQUIRE(back.values.size() == field.values.size());
    for (std::size_t i = 0; i < field.values.size(); ++i)
        CHECK(back.values[i] == field.values[i]);
    std::filesystem::remove(path);
}

TEST_CASE("plateau kick mirrors the general kick bit for bit") {
    using namespace twistflow::suspension;
    smooth::CutoffShape cs{4.0, 11.5};
    Rng rng(777);
    std::size_t mismatches = 0;
    for (int i = 0; i < 20000; ++i) {
        double x = rng.uniform(-3.0, 3.0), y = rng.uniform(-3.9, 3.9);
        double tau = rng.uniform(-4e-3, 4e-3);
        double xa = x, ya = y, xb = x, yb = y;
        Mat2 Ma, Mb;
        detail::kick<true>(cs, tau, 2, xa, ya, Ma);
        detail::kick_plateau<true>(tau, xb, yb, Mb);
        bool same = xa == xb && ya == yb && Ma.a11 == Mb.a11 && Ma.a12 == Mb.a12 &&
                    Ma.a21 == Mb.a21 && Ma.a22 == Mb.a22;
        mismatches += same ? 0 : 1;
    }
    CHECK(mismatches == 0);
}
