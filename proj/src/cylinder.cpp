#include "twistflow/cylinder.hpp"

#include "twistflow/fastmath.hpp"

#include <cmath>

namespace twistflow::cylinder {

CylinderPoint shear_apply(const CylinderPoint& p) {
    return {fastmath::mod1(p.x + p.y), p.y};
}

TwistMapSpec TwistMapSpec::create(double epsilon, double band_K, double integrator_tol,
                                  suspension::IntegratorProfile profile) {
    return from_suspension(suspension::SuspensionSpec::create(epsilon, band_K, integrator_tol),
                           profile);
}

TwistMapSpec TwistMapSpec::from_suspension(suspension::SuspensionSpec spec,
                                           suspension::IntegratorProfile profile) {
    return TwistMapSpec(std::make_shared<suspension::TimeOneMap>(std::move(spec), profile));
}

CylinderPoint twist_apply(const TwistMapSpec& spec, const CylinderPoint& p) {
    return spec.time1_map().apply(p);
}

Mat2 twist_jacobian(const TwistMapSpec& spec, const CylinderPoint& p) {
    return spec.time1_map().apply_with_jacobian(p).second;
}

double rotation_number(const TwistMapSpec& spec, const CylinderPoint& p, int n_iter) {
    if (n_iter < 100) throw std::invalid_argument("rotation_number: n_iter must be >= 100");
    double x = p.x, y = p.y;
    for (int i = 0; i < n_iter; ++i) spec.time1_map().apply_lifted(x, y);
    return (x - p.x) / n_iter;
}

double flux_at(const TwistMapSpec& spec, double y0, int n_samples) {
    if (n_samples < 64) throw std::invalid_argument("flux: n_samples must be >= 64");
    // Flux through {y = y0}: integral of Y(x0) X'(x0) dx0 - y0, with (X, Y)
    // the lifted image and X' from the tangent map. Trapezoid rule converges
    // spectrally for this periodic integrand.
    double acc = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        double x0 = static_cast<double>(i) / n_samples;
        auto [q, M] = spec.time1_map().apply_with_jacobian({x0, y0});
        acc += q.y * M.a11;
    }
    return acc / n_samples - y0;
}

double flux(const TwistMapSpec& spec, int n_samples) {
    const int n_levels = 5;
    double acc = 0.0;
    for (int level = 0; level < n_levels; ++level) {
        double y0 = -spec.band_K() + (2.0 * spec.band_K()) * (level + 0.5) / n_levels;
        acc += flux_at(spec, y0, n_samples);
    }
    return acc / n_levels;
}

double twist_lower_bound(const TwistMapSpec& spec, const GridSpec& grid) {
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            Mat2 m = twist_jacobian(spec, {grid.cx(i), grid.cy(j)});
            lo = std::fmin(lo, m.a12);
        }
    return lo;
}

}  // namespace twistflow::cylinder
