#pragma once

#include "twistflow/core.hpp"
#include "twistflow/smooth.hpp"

#include <memory>
#include <vector>

// The strictly convex, time-periodic Hamiltonian family
//
//     H(t,x,y) = y^2/2 + epsilon * b(t) * V(x) * c(y)
//
// realizing the perturbed twist map as its time-1 map, together with the
// Legendre transform to the Lagrangian side. b is the unit-mass bump, V(x) =
// cos(2*pi*x), and c is a plateau cutoff making H = y^2/2 exactly for
// |y| >= cutoff.edge, so the map is the plain shear outside the band.

namespace twistflow::suspension {

struct SuspensionSpec {
    double epsilon = 0.0;
    double band_K = 12.0;       // H == y^2/2 and the map is the shear for |y| >= band_K
    double lagrangian_D = 12.0; // half-width of the Lagrangian band (D >= band_K)
    double D_plus = 0.0;        // H = y^2/2 + D± outside the band; 0 in this family
    double D_minus = 0.0;
    double integrator_tol = 1e-9;
    smooth::CutoffShape cutoff; // plateau [-4,4], zero for |y| >= band_K - 1/2
    smooth::Bump bump;

    // Validates strict convexity in y: min over a fine (t,y) grid (V = ±1
    // worst case) of d2H/dy2 must exceed 0.5. Throws std::invalid_argument.
    static SuspensionSpec create(double epsilon, double band_K = 12.0,
                                 double integrator_tol = 1e-9);

    // min over the validation grid of d2H/dy2 for this spec.
    double convexity_margin() const;
};

double hamiltonian_eval(const SuspensionSpec& spec, double t, double x, double y);

// Partial derivatives of H up to the combinations needed by the
// Euler-Lagrange right-hand side and its variational equation.
struct HPartials {
    double H, Hx, Hy, Hxx, Hxy, Hyy, Hty;
    double Hyyy, Hxyy, Htyy, Htxy, Hxxy;
};
HPartials hamiltonian_partials(const SuspensionSpec& spec, double t, double x, double y);

// --- Legendre transform ------------------------------------------------

struct LegendreResult {
    double p;           // momentum with dH/dy(t,x,p) = v
    double lagrangian;  // Lhat(t,x,v) = p*v - H(t,x,p)
};

// Safeguarded Newton (bisection fallback). Total under the convexity
// validation; throws NumericalError after 100 iterations.
LegendreResult legendre_transform(const SuspensionSpec& spec, double t, double x, double v);

double lagrangian_hat_eval(const SuspensionSpec& spec, double t, double x, double v);

// --- Time-1 map via symplectic splitting --------------------------------

struct IntegratorProfile {
    int order = 6;        // 2 (Strang), 4 (Suzuki), 6 (Yoshida)
    double step = 1e-3;   // macro step ceiling; actual step is 1/N <= step
    int newton_iters = 2; // corrector iterations inside the implicit kicks
    bool richardson = true;  // verify against a half-step run per evaluation

    static IntegratorProfile accurate() { return {6, 1e-3, 2, true}; }
    static IntegratorProfile fast() { return {2, 1e-3, 1, false}; }
};

// Precompiled drift/kick sequence for one period. Each op drifts by dt and
// then applies a kick of impulse tau (tau == 0 on the trailing op).
struct ScheduleOp {
    double dt;
    double tau;
};

struct Schedule {
    std::vector<ScheduleOp> ops;
    int newton_iters = 2;
};

Schedule build_schedule(const SuspensionSpec& spec, int order, double step_ceiling,
                        int newton_iters);

// State advanced by the schedule: position, momentum and the tangent matrix.
struct FlowState {
    double x = 0.0;
    double y = 0.0;
    Mat2 M{};
};

void run_schedule(const smooth::CutoffShape& cutoff, const Schedule& schedule, FlowState& state,
                  bool with_tangent);

// The time-1 map psi_H^{0,1} with cached schedules. Immutable after
// construction; evaluations are pure and thread-safe.
class TimeOneMap {
  public:
    TimeOneMap(SuspensionSpec spec, IntegratorProfile profile);

    const SuspensionSpec& spec() const { return spec_; }
    const IntegratorProfile& profile() const { return profile_; }

    CylinderPoint apply(const CylinderPoint& p) const;
    // Unreduced x for rotation-number lifts.
    void apply_lifted(double& x, double& y) const;
    std::pair<CylinderPoint, Mat2> apply_with_jacobian(const CylinderPoint& p) const;

    const Schedule& schedule() const { return schedule_; }

  private:
    FlowState run(double x, double y, bool tangent) const;

    SuspensionSpec spec_;
    IntegratorProfile profile_;
    Schedule schedule_;
    Schedule half_schedule_;  // for the Richardson check
};

// Non-symplectic adaptive reference integration of the same flow, used as an
// independent cross-check of the splitting path.
CylinderPoint reference_time1_map(const SuspensionSpec& spec, const CylinderPoint& p,
                                  double rtol = 1e-12);

}  // namespace twistflow::suspension
