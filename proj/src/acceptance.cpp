#include "twistflow/acceptance.hpp"

#include "twistflow/chaos.hpp"
#include "twistflow/cylinder.hpp"
#include "twistflow/fastmath.hpp"
#include "twistflow/finsler.hpp"
#include "twistflow/geodesics.hpp"
#include "twistflow/ode.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

namespace twistflow::acceptance {

namespace {

// Criterion 7 regression fixture: frozen after the first computation of the
// epsilon = 1.2 field (256^2 grid, n = 1000, fast profile), cross-checked
// against the orbit-divergence oracle on sampled cells.
constexpr double kFtleFixtureFraction = 0.999298095703125;
constexpr double kFtleFixtureEntropy = 1.0550844200195384;

double circle_dist(double a, double b) {
    double d = std::fabs(a - b);
    return std::fmin(d, 1.0 - d);
}

struct Ctx {
    std::ostringstream detail;
    bool pass = true;

    void require_le(const char* what, double value, double limit) {
        bool ok = value <= limit;
        pass &= ok;
        detail << what << "=" << value << (ok ? " <= " : " > ") << limit << "; ";
    }
    void require_ge(const char* what, double value, double limit) {
        bool ok = value >= limit;
        pass &= ok;
        detail << what << "=" << value << (ok ? " >= " : " < ") << limit << "; ";
    }
};

finsler::FinslerModel model_for(double epsilon) {
    return finsler::FinslerModel::create(epsilon, 12.0,
                                         suspension::IntegratorProfile::accurate());
}

// 1. Flat limit: epsilon = 0, 100 random section states, residual <= 1e-8.
void crit_flat_limit(Ctx& c) {
    auto model = model_for(0.0);
    Rng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        CylinderPoint p{rng.uniform(), rng.uniform(-13.0, 13.0)};
        auto s = geodesics::conjugacy_g_inverse(model, p);
        auto img = geodesics::conjugacy_g(geodesics::return_map(model, s));
        auto ref = cylinder::shear_apply(p);
        worst = std::fmax(worst, std::fmax(circle_dist(img.x, ref.x), std::fabs(img.y - ref.y)));
    }
    c.require_le("sup|g.R.ginv - f1|", worst, 1e-8);
}

// 2. Conjugacy: epsilon in {0.1, 0.3, 0.5}, 32x32 grid on [0,1]x[-K,K],
//    sup |g.R.ginv - fhat| <= 1e-6 with fhat from the Hamiltonian integrator.
void crit_conjugacy(Ctx& c) {
    for (double eps : {0.1, 0.3, 0.5}) {
        auto model = model_for(eps);
        auto tw = cylinder::TwistMapSpec::from_suspension(
            model.spec(), suspension::IntegratorProfile::accurate());
        double K = model.spec().band_K;
        GridSpec g{0.0, 1.0, -K, K, 32, 32};
        double worst = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                CylinderPoint p{g.cx(i), g.cy(j)};
                auto img = geodesics::conjugated_return_map(model, p);
                auto ref = cylinder::twist_apply(tw, p);
                worst = std::fmax(worst,
                                  std::fmax(circle_dist(img.x, ref.x), std::fabs(img.y - ref.y)));
            }
        std::ostringstream tag;
        tag << "eps=" << eps << " sup";
        c.require_le(tag.str().c_str(), worst, 1e-6);
    }
}

// 3. Shear region: 100 points with |y| in (K, K+2) map by the plain shear.
void crit_shear_region(Ctx& c) {
    auto model = model_for(0.5);
    double K = model.spec().band_K;
    Rng rng(303);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        CylinderPoint p{rng.uniform(), sign * rng.uniform(K + 1e-6, K + 2.0)};
        auto img = geodesics::conjugated_return_map(model, p);
        auto ref = cylinder::shear_apply(p);
        worst = std::fmax(worst, std::fmax(circle_dist(img.x, ref.x), std::fabs(img.y - ref.y)));
    }
    c.require_le("sup|g.R.ginv - f1|", worst, 1e-8);
}

// 4. Finsler certification: 10^4 samples incl. near-sector v1 = ±1e-3;
//    fundamental tensor positive definite, closed form vs FD Hessian <= 1e-5.
void crit_finsler_certification(Ctx& c) {
    auto model = model_for(0.3);
    Rng rng(404);
    double min_eig = 1e300, worst_fd = 0.0;
    const double h = 1e-4;
    for (int i = 0; i < 10000; ++i) {
        double t = rng.uniform(), x = rng.uniform();
        double v1, v2;
        if (i % 100 == 0) {
            v1 = (i % 200 == 0 ? 1e-3 : -1e-3);
            v2 = rng.uniform() < 0.5 ? -1.0 : 1.0;
        } else {
            double phi = rng.uniform(0.0, 2.0 * M_PI);
            v1 = std::cos(phi);
            v2 = std::sin(phi);
            if (v1 == 0.0) v1 = 1e-12;
        }
        Mat2 g = model.fundamental_tensor(t, x, v1, v2);
        min_eig = std::fmin(min_eig, g.symmetric_min_eigenvalue());

        auto E = [&](double a, double b) {
            double F = model.finsler_eval(t, x, a, b);
            return 0.5 * F * F;
        };
        double g11 = (E(v1 + h, v2) - 2.0 * E(v1, v2) + E(v1 - h, v2)) / (h * h);
        double g22 = (E(v1, v2 + h) - 2.0 * E(v1, v2) + E(v1, v2 - h)) / (h * h);
        double g12 = (E(v1 + h, v2 + h) - E(v1 + h, v2 - h) - E(v1 - h, v2 + h) +
                      E(v1 - h, v2 - h)) /
                     (4.0 * h * h);
        worst_fd = std::fmax(worst_fd, std::fabs(g.a11 - g11));
        worst_fd = std::fmax(worst_fd, std::fabs(g.a22 - g22));
        worst_fd = std::fmax(worst_fd, std::fabs(g.a12 - g12));
    }
    c.require_ge("min_eigenvalue", min_eig, 1e-300);
    c.require_le("max_hessian_fd_error", worst_fd, 1e-5);
}

// 5. Homogeneity: relative error <= 1e-12 for lambda in {0.5, 2, 10}.
void crit_homogeneity(Ctx& c) {
    auto model = model_for(0.3);
    Rng rng(505);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform(), x = rng.uniform();
        double phi = rng.uniform(0.0, 2.0 * M_PI);
        double v1 = std::cos(phi), v2 = std::sin(phi);
        if (v1 == 0.0) v1 = 1e-12;
        double F = model.finsler_eval(t, x, v1, v2);
        for (double lam : {0.5, 2.0, 10.0}) {
            double Fl = model.finsler_eval(t, x, lam * v1, lam * v2);
            worst = std::fmax(worst, std::fabs(Fl - lam * F) / (lam * F));
        }
    }
    c.require_le("max_rel_homogeneity_error", worst, 1e-12);
}

// 6. Area preservation: |det D(g.R.ginv) - 1| <= 1e-6, 16x16, epsilon 0.3.
void crit_area_preservation(Ctx& c) {
    auto model = model_for(0.3);
    double K = model.spec().band_K;
    GridSpec g{0.0, 1.0, -K, K, 16, 16};
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            Mat2 J = geodesics::conjugated_return_map_jacobian(model, {g.cx(i), g.cy(j)});
            worst = std::fmax(worst, std::fabs(J.det() - 1.0));
        }
    c.require_le("max|det-1|", worst, 1e-6);
}

// 7. Chaos: epsilon 1.2, 256^2 grid on [0,1]x[-1/2,1/2], n = 1000; island
//    fraction >= 5%, positive entropy; regression fixture.
void crit_chaos(Ctx& c) {
    auto spec = cylinder::TwistMapSpec::create(1.2, 12.0, 1e-9,
                                               suspension::IntegratorProfile::fast());
    auto map = chaos::twist_system(spec);
    GridSpec g{0.0, 1.0, -0.5, 0.5, 256, 256};
    auto field = chaos::ftle_field(map, g, 1000, 0.05);
    double fraction = chaos::island_area(field) / 1.0;
    double entropy = chaos::metric_entropy_estimate(field);
    c.require_ge("island_fraction", fraction, 0.05);
    c.require_ge("metric_entropy_estimate", entropy, 1e-12);
    // fraction tolerance admits a few threshold-straddling cells under libm
    // variation of std::log; entropy is a smooth sum and pinned tightly
    c.require_le("fixture_fraction_drift", std::fabs(fraction - kFtleFixtureFraction), 2e-4);
    c.require_le("fixture_entropy_drift",
                 std::fabs(entropy - kFtleFixtureEntropy) / kFtleFixtureEntropy, 1e-9);
}

// 8. Near-integrability: epsilon 0.05, 50 samples in [-1,1], circle-like
//    fraction >= 0.9 at the stated thresholds.
void crit_kam(Ctx& c) {
    auto spec = cylinder::TwistMapSpec::create(0.05, 12.0, 1e-9,
                                               suspension::IntegratorProfile::accurate());
    auto map = chaos::twist_system(spec);
    auto report = chaos::kam_circles(map, -1.0, 1.0, 50, 1000, 0.05, 0.05);
    c.require_ge("circle_like_fraction", report.circle_like_fraction, 0.9);
}

// 9. Legendre round trip <= 1e-10 and duality <= 1e-12 on 10^3 samples.
void crit_legendre(Ctx& c) {
    auto spec = suspension::SuspensionSpec::create(0.3);
    Rng rng(909);
    double worst_rt = 0.0, worst_dual = 0.0;
    double K = spec.band_K;
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform(), x = rng.uniform(), v = rng.uniform(-K - 2.0, K + 2.0);
        auto r = suspension::legendre_transform(spec, t, x, v);
        auto H = suspension::hamiltonian_partials(spec, t, x, r.p);
        worst_rt = std::fmax(worst_rt, std::fabs(H.Hy - v));
        worst_dual = std::fmax(worst_dual, std::fabs(r.lagrangian + H.H - r.p * v));
    }
    c.require_le("max_round_trip", worst_rt, 1e-10);
    c.require_le("max_duality", worst_dual, 1e-12);
}

// 10. EL/Hamiltonian cross-check to 1e-8 over t in [0,1], 100 random ICs.
void crit_el_hamiltonian(Ctx& c) {
    auto model = model_for(0.3);
    const auto& spec = model.spec();
    Rng rng(1010);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        double h = rng.uniform(), w0 = rng.uniform(-4.0, 4.0);
        double p0 = suspension::legendre_transform(spec, 0.0, h, w0).p;
        auto rhs = [&spec](double t, const std::array<double, 2>& z,
                           std::array<double, 2>& dz) {
            auto H = suspension::hamiltonian_partials(spec, t, z[0], z[1]);
            dz[0] = H.Hy;
            dz[1] = -H.Hx;
        };
        std::array<double, 2> z{h, p0};
        double theta = h, w = w0;
        for (int j = 1; j <= 10; ++j) {
            double t0 = (j - 1) / 10.0, t1 = j / 10.0;
            z = ode::integrate_dopri5<2>(rhs, t0, t1, z, 1e-12, 1e-12, "crit10");
            auto zz = std::array<double, 2>{theta, w};
            auto grhs = [&model](double t, const std::array<double, 2>& s,
                                 std::array<double, 2>& ds) {
                ds[0] = s[1];
                ds[1] = geodesics::el_rhs(model, t, s[0], s[1]);
            };
            zz = ode::integrate_dopri5<2>(grhs, t0, t1, zz, 1e-11, 1e-11, "crit10-el");
            theta = zz[0];
            w = zz[1];
            auto H = suspension::hamiltonian_partials(spec, t1, z[0], z[1]);
            worst = std::fmax(worst, std::fabs(theta - z[0]));
            worst = std::fmax(worst, std::fabs(w - H.Hy));
        }
    }
    c.require_le("sup|graph - hamiltonian|", worst, 1e-8);
}

// 11. C^r flat-closeness trend: cr1(eps=0.05) <= 0.6 * cr1(eps=0.1).
void crit_cr_trend(Ctx& c) {
    double d1 = finsler::cr_distance(model_for(0.1), 1);
    double d2 = finsler::cr_distance(model_for(0.05), 1);
    c.detail << "cr1(0.1)=" << d1 << "; cr1(0.05)=" << d2 << "; ";
    c.require_le("ratio", d2 / d1, 0.6);
}

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds; 0 = none
    std::function<void(Ctx&)> fn;
};

}  // namespace

std::vector<CriterionResult> run_all(std::ostream& out, const std::vector<int>& only) {
    const std::vector<Criterion> criteria = {
        {1, "flat limit (epsilon=0 return map equals the shear)", 10.0, crit_flat_limit},
        {2, "conjugacy g.R.ginv = fhat (eps 0.1/0.3/0.5, 32x32)", 300.0, crit_conjugacy},
        {3, "shear region |y| in (K, K+2)", 0.0, crit_shear_region},
        {4, "finsler certification (tensor PD, Hessian closed form vs FD)", 0.0,
         crit_finsler_certification},
        {5, "homogeneity F(lambda v) = lambda F(v)", 0.0, crit_homogeneity},
        {6, "area preservation det D(g.R.ginv) = 1", 0.0, crit_area_preservation},
        {7, "chaos: FTLE island fraction and entropy (eps=1.2, 256^2)", 600.0, crit_chaos},
        {8, "near-integrability: KAM circle fraction (eps=0.05)", 0.0, crit_kam},
        {9, "legendre round trip and duality", 0.0, crit_legendre},
        {10, "EL/Hamiltonian cross-check", 0.0, crit_el_hamiltonian},
        {11, "C^r flat-closeness trend", 0.0, crit_cr_trend},
    };

    std::vector<CriterionResult> results;
    for (const auto& crit : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), crit.id) == only.end())
            continue;
        Ctx ctx;
        auto t0 = std::chrono::steady_clock::now();
        try {
            crit.fn(ctx);
        } catch (const std::exception& e) {
            ctx.pass = false;
            ctx.detail << "exception: " << e.what();
        }
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();
        if (crit.time_limit > 0.0 && secs > crit.time_limit) {
            ctx.pass = false;
            ctx.detail << "runtime " << secs << "s exceeded " << crit.time_limit << "s; ";
        }
        CriterionResult r{crit.id, crit.name, ctx.pass, ctx.detail.str(), secs};
        results.push_back(r);
        out << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << " — " << r.detail
            << "(" << secs << " s)" << std::endl;
    }
    return results;
}

}  // namespace twistflow::acceptance
