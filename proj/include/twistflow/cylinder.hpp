#pragma once

#include "twistflow/core.hpp"
#include "twistflow/suspension.hpp"

#include <memory>

// The cylinder Z = S^1 x R with the shear map f1, the perturbed twist map
// fhat (the time-1 map of the suspension Hamiltonian), and twist/flux/area
// diagnostics.

namespace twistflow::cylinder {

// f1(x,y) = (x + y mod 1, y). Exact arithmetic, no integration.
CylinderPoint shear_apply(const CylinderPoint& p);

class TwistMapSpec {
  public:
    static TwistMapSpec create(double epsilon, double band_K = 12.0,
                               double integrator_tol = 1e-9,
                               suspension::IntegratorProfile profile =
                                   suspension::IntegratorProfile::accurate());

    static TwistMapSpec from_suspension(suspension::SuspensionSpec spec,
                                        suspension::IntegratorProfile profile);

    double epsilon() const { return map_->spec().epsilon; }
    double band_K() const { return map_->spec().band_K; }
    double integrator_tol() const { return map_->spec().integrator_tol; }
    const suspension::SuspensionSpec& suspension_spec() const { return map_->spec(); }
    const suspension::TimeOneMap& time1_map() const { return *map_; }

  private:
    explicit TwistMapSpec(std::shared_ptr<const suspension::TimeOneMap> map)
        : map_(std::move(map)) {}
    std::shared_ptr<const suspension::TimeOneMap> map_;
};

// fhat(p): identical call path to the suspension time-1 map.
CylinderPoint twist_apply(const TwistMapSpec& spec, const CylinderPoint& p);

// Derivative of twist_apply; det = 1 up to integrator error.
Mat2 twist_jacobian(const TwistMapSpec& spec, const CylinderPoint& p);

// (lift of x after n iterations - x0)/n, accumulated on the unreduced lift.
double rotation_number(const TwistMapSpec& spec, const CylinderPoint& p, int n_iter);

// Signed area between the circle {y = y0} and its image. Zero for
// exact-symplectic maps.
double flux_at(const TwistMapSpec& spec, double y0, int n_samples);

// flux_at averaged over sampled y0 in the band.
double flux(const TwistMapSpec& spec, int n_samples);

// min over the grid of the twist dx'/dy (entry (1,2) of the Jacobian).
double twist_lower_bound(const TwistMapSpec& spec, const GridSpec& grid);

}  // namespace twistflow::cylinder
