#include "twistflow/suspension.hpp"

#include "twistflow/fastmath.hpp"
#include "twistflow/kick.hpp"
#include "twistflow/ode.hpp"

#include <algorithm>
#include <cmath>

namespace twistflow::suspension {

namespace {

// max_t b(t) and max_u |s''(u)| for the fixed bump/step shapes, cached.
double bump_max(const smooth::Bump& bump) {
    static const double peak = [] {
        smooth::Bump b = smooth::Bump::make();
        double m = 0.0;
        for (int i = 1; i < 8192; ++i) m = std::fmax(m, b.value(i / 8192.0));
        return m;
    }();
    (void)bump;
    return peak;
}

double step_s2_max() {
    static const double m = [] {
        double v = 0.0;
        for (int i = 1; i < 65536; ++i)
            v = std::fmax(v, std::fabs(smooth::step_pack(i / 65536.0).s2));
        return v;
    }();
    return m;
}

}  // namespace

SuspensionSpec SuspensionSpec::create(double epsilon, double band_K, double integrator_tol) {
    if (epsilon < 0.0) throw std::invalid_argument("suspension: epsilon must be >= 0");
    if (band_K <= 1.0) throw std::invalid_argument("suspension: band_K must exceed 1");
    if (integrator_tol <= 0.0) throw std::invalid_argument("suspension: tolerance must be positive");

    SuspensionSpec spec;
    spec.epsilon = epsilon;
    spec.band_K = band_K;
    spec.lagrangian_D = band_K;
    spec.integrator_tol = integrator_tol;
    spec.cutoff.edge = band_K - 0.5;
    // Transition width 7.5 keeps d2H/dy2 > 0.5 for epsilon up to ~1.7; small
    // bands keep a narrow plateau and the validation below gates epsilon.
    spec.cutoff.plateau = std::fmax(spec.cutoff.edge - 7.5, spec.cutoff.edge / 8.0);
    spec.bump = smooth::Bump::make();

    double margin = spec.convexity_margin();
    if (margin <= 0.5)
        throw std::invalid_argument(
            "suspension: min d2H/dy2 = " + std::to_string(margin) +
            " <= 0.5; the cutoff transition cannot absorb this epsilon");
    return spec;
}

double SuspensionSpec::convexity_margin() const {
    // d2H/dy2 = 1 + eps*b(t)*V(x)*c''(y); the extrema factor over the grid
    // since V ranges over [-1,1].
    double w = cutoff.width();
    return 1.0 - epsilon * bump_max(bump) * step_s2_max() / (w * w);
}

double hamiltonian_eval(const SuspensionSpec& spec, double t, double x, double y) {
    double kin = 0.5 * y * y;
    if (spec.epsilon == 0.0) return kin;
    double c = spec.cutoff.value(y);
    if (c == 0.0) return kin;
    auto [s, cx] = fastmath::sincos_2pi(x);
    (void)s;
    return kin + spec.epsilon * spec.bump.value(t) * cx * c;
}

HPartials hamiltonian_partials(const SuspensionSpec& spec, double t, double x, double y) {
    HPartials h{};
    h.H = 0.5 * y * y;
    h.Hy = y;
    h.Hyy = 1.0;
    if (spec.epsilon != 0.0) {
        auto bp = spec.bump.pack(t);
        auto vp = smooth::potential_pack(x);
        auto cp = spec.cutoff.pack(y);
        double e = spec.epsilon;
        h.H += e * bp.b * vp.V * cp.c;
        h.Hx = e * bp.b * vp.V1 * cp.c;
        h.Hy += e * bp.b * vp.V * cp.c1;
        h.Hxx = e * bp.b * vp.V2 * cp.c;
        h.Hxy = e * bp.b * vp.V1 * cp.c1;
        h.Hyy += e * bp.b * vp.V * cp.c2;
        h.Hty = e * bp.b1 * vp.V * cp.c1;
        h.Hyyy = e * bp.b * vp.V * cp.c3;
        h.Hxyy = e * bp.b * vp.V1 * cp.c2;
        h.Htyy = e * bp.b1 * vp.V * cp.c2;
        h.Htxy = e * bp.b1 * vp.V1 * cp.c1;
        h.Hxxy = e * bp.b * vp.V2 * cp.c1;
    }
    return h;
}

LegendreResult legendre_transform(const SuspensionSpec& spec, double t, double x, double v) {
    // Solve p + alpha*c'(p) = v with alpha = eps*b(t)*V(x).
    if (spec.epsilon == 0.0 || std::fabs(v) >= spec.cutoff.edge) {
        // c' vanishes at p = v and the root is exact.
        return {v, 0.5 * v * v};
    }
    double alpha = spec.epsilon * spec.bump.value(t) * smooth::potential_pack(x).V;
    if (alpha == 0.0) return {v, 0.5 * v * v};  // the perturbation term vanishes identically

    // |c'| <= 2/width bounds the root bracket around v.
    double r = std::fabs(alpha) * 2.0 / spec.cutoff.width() + 1e-9;
    double lo = v - r, hi = v + r;
    double p = v;
    double tol = 1e-14 * (1.0 + std::fabs(v));
    bool converged = false;
    double f = 0.0;
    for (int it = 0; it < 100; ++it) {
        auto cp = spec.cutoff.pack(p);
        f = p + alpha * cp.c1 - v;
        if (std::fabs(f) <= tol) {
            converged = true;
            break;
        }
        if (f > 0.0) hi = p; else lo = p;
        double fp = 1.0 + alpha * cp.c2;
        double pn = p - f / fp;
        if (!(pn > lo && pn < hi)) pn = 0.5 * (lo + hi);  // bisection safeguard
        p = pn;
    }
    if (!converged)
        throw NumericalError("legendre_transform: Newton did not converge", std::fabs(f));
    double lag = p * v - hamiltonian_eval(spec, t, x, p);
    return {p, lag};
}

double lagrangian_hat_eval(const SuspensionSpec& spec, double t, double x, double v) {
    return legendre_transform(spec, t, x, v).lagrangian;
}

// --- splitting integrator ------------------------------------------------

Schedule build_schedule(const SuspensionSpec& spec, int order, double step_ceiling,
                        int newton_iters) {
    if (step_ceiling <= 0.0 || step_ceiling > 1e-3)
        throw std::invalid_argument("schedule: step ceiling must be in (0, 1e-3]");
    int n = static_cast<int>(std::ceil(1.0 / step_ceiling - 1e-12));
    double h = 1.0 / n;

    std::vector<double> w;
    switch (order) {
        case 2:
            w = {1.0};
            break;
        case 4: {
            double p = 1.0 / (4.0 - std::pow(4.0, 1.0 / 3.0));
            w = {p, p, 1.0 - 4.0 * p, p, p};
            break;
        }
        case 6: {
            double w1 = -1.17767998417887;
            double w2 = 0.235573213359357;
            double w3 = 0.784513610477560;
            double w0 = 1.0 - 2.0 * (w1 + w2 + w3);
            w = {w3, w2, w1, w0, w1, w2, w3};
            break;
        }
        default:
            throw std::invalid_argument("schedule: order must be 2, 4 or 6");
    }

    Schedule sched;
    sched.newton_iters = newton_iters;
    sched.ops.reserve(static_cast<std::size_t>(n) * w.size() + 1);
    double pending = 0.0;
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
        for (double wj : w) {
            double half = 0.5 * wj * h;
            pending += half;
            t += half;
            double tau = spec.epsilon * wj * h * spec.bump.value(t);
            if (tau != 0.0) {
                sched.ops.push_back({pending, tau});
                pending = 0.0;
            }
            pending += half;
            t += half;
        }
    }
    sched.ops.push_back({pending, 0.0});
    return sched;
}

namespace {

template <bool Tangent>
void run_schedule_impl(const smooth::CutoffShape& cutoff, const Schedule& sched,
                       FlowState& st) {
    const double guard = cutoff.plateau - 0.05;
    for (const ScheduleOp& op : sched.ops) {
        st.x += op.dt * st.y;
        if constexpr (Tangent) {
            st.M.a11 += op.dt * st.M.a21;
            st.M.a12 += op.dt * st.M.a22;
        }
        if (op.tau != 0.0) {
            if (std::fabs(st.y) < guard)
                detail::kick_plateau<Tangent>(op.tau, st.x, st.y, st.M);
            else
                detail::kick<Tangent>(cutoff, op.tau, sched.newton_iters, st.x, st.y, st.M);
        }
    }
}

}  // namespace

void run_schedule(const smooth::CutoffShape& cutoff, const Schedule& schedule, FlowState& state,
                  bool with_tangent) {
    if (with_tangent)
        run_schedule_impl<true>(cutoff, schedule, state);
    else
        run_schedule_impl<false>(cutoff, schedule, state);
}

TimeOneMap::TimeOneMap(SuspensionSpec spec, IntegratorProfile profile)
    : spec_(std::move(spec)), profile_(profile) {
    schedule_ = build_schedule(spec_, profile_.order, profile_.step, profile_.newton_iters);
    if (profile_.richardson)
        half_schedule_ =
            build_schedule(spec_, profile_.order, profile_.step * 0.5, profile_.newton_iters);
}

FlowState TimeOneMap::run(double x, double y, bool tangent) const {
    FlowState st{x, y, Mat2::identity()};
    run_schedule(spec_.cutoff, schedule_, st, tangent);
    if (profile_.richardson) {
        FlowState fine{x, y, Mat2::identity()};
        run_schedule(spec_.cutoff, half_schedule_, fine, tangent);
        double resid = std::fmax(std::fabs(fine.x - st.x), std::fabs(fine.y - st.y));
        if (resid > spec_.integrator_tol)
            throw NumericalError("time-1 map: Richardson check failed", resid);
        return fine;
    }
    return st;
}

CylinderPoint TimeOneMap::apply(const CylinderPoint& p) const {
    if (spec_.epsilon == 0.0 || std::fabs(p.y) >= spec_.cutoff.edge)
        return {fastmath::mod1(p.x + p.y), p.y};  // exact free flow
    FlowState st = run(p.x, p.y, false);
    return {fastmath::mod1(st.x), st.y};
}

void TimeOneMap::apply_lifted(double& x, double& y) const {
    if (spec_.epsilon == 0.0 || std::fabs(y) >= spec_.cutoff.edge) {
        x += y;
        return;
    }
    FlowState st = run(x, y, false);
    x = st.x;
    y = st.y;
}

std::pair<CylinderPoint, Mat2> TimeOneMap::apply_with_jacobian(const CylinderPoint& p) const {
    if (spec_.epsilon == 0.0 || std::fabs(p.y) >= spec_.cutoff.edge)
        return {{fastmath::mod1(p.x + p.y), p.y}, Mat2{1.0, 1.0, 0.0, 1.0}};
    FlowState st = run(p.x, p.y, true);
    return {{fastmath::mod1(st.x), st.y}, st.M};
}

CylinderPoint reference_time1_map(const SuspensionSpec& spec, const CylinderPoint& p,
                                  double rtol) {
    auto rhs = [&spec](double t, const std::array<double, 2>& z, std::array<double, 2>& dz) {
        HPartials h = hamiltonian_partials(spec, t, z[0], z[1]);
        dz[0] = h.Hy;
        dz[1] = -h.Hx;
    };
    auto z = ode::integrate_dopri5<2>(rhs, 0.0, 1.0, {p.x, p.y}, rtol, rtol,
                                      "reference_time1_map");
    return {fastmath::mod1(z[0]), z[1]};
}

}  // namespace twistflow::suspension
