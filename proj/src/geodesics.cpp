#include "twistflow/geodesics.hpp"

#include "twistflow/fastmath.hpp"
#include "twistflow/ode.hpp"

#include <cmath>
#include <sstream>

namespace twistflow::geodesics {

using suspension::hamiltonian_partials;
using suspension::HPartials;
using suspension::legendre_transform;

SectionState make_section_state(const finsler::FinslerModel& model, double h, double slope) {
    double F = model.finsler_eval(0.0, h, 1.0, slope);
    return {fastmath::mod1(h), 1.0 / F, slope / F};
}

void validate_section_state(const finsler::FinslerModel& model, const SectionState& s) {
    if (!(s.v1 > 0.0)) throw std::domain_error("section state: v1 must be positive");
    double F = model.finsler_eval(0.0, s.h, s.v1, s.v2);
    if (std::fabs(F - 1.0) > 1e-10)
        throw std::domain_error("section state: not unit speed, F = " + std::to_string(F));
}

double el_rhs(const finsler::FinslerModel& model, double t, double theta, double thetadot) {
    const auto& spec = model.spec();
    if (spec.epsilon == 0.0 || std::fabs(thetadot) >= spec.cutoff.edge)
        return 0.0;  // L depends on the slope alone; straight lines
    double p = legendre_transform(spec, t, theta, thetadot).p;
    HPartials H = hamiltonian_partials(spec, t, theta, p);
    return -H.Hx * H.Hyy + H.Hty + H.Hxy * thetadot;
}

ElJet el_rhs_with_partials(const finsler::FinslerModel& model, double t, double theta,
                           double thetadot) {
    const auto& spec = model.spec();
    if (spec.epsilon == 0.0 || std::fabs(thetadot) >= spec.cutoff.edge) return {0.0, 0.0, 0.0};
    double p = legendre_transform(spec, t, theta, thetadot).p;
    HPartials H = hamiltonian_partials(spec, t, theta, p);
    double rhs = -H.Hx * H.Hyy + H.Hty + H.Hxy * thetadot;
    double Gx = -H.Hxx * H.Hyy - H.Hx * H.Hxyy + H.Htxy + H.Hxxy * thetadot;
    double Gp = -H.Hxy * H.Hyy - H.Hx * H.Hyyy + H.Htyy + H.Hxyy * thetadot;
    double px = -H.Hxy / H.Hyy;
    double pw = 1.0 / H.Hyy;
    return {rhs, Gx + Gp * px, H.Hxy + Gp * pw};
}

namespace {

struct GraphRhs {
    const finsler::FinslerModel* model;
    void operator()(double t, const std::array<double, 2>& z, std::array<double, 2>& dz) const {
        dz[0] = z[1];
        dz[1] = el_rhs(*model, t, z[0], z[1]);
    }
};

struct VariationalRhs {
    const finsler::FinslerModel* model;
    void operator()(double t, const std::array<double, 6>& z, std::array<double, 6>& dz) const {
        ElJet jet = el_rhs_with_partials(*model, t, z[0], z[1]);
        dz[0] = z[1];
        dz[1] = jet.rhs;
        // two tangent columns (d theta, d thetadot)
        dz[2] = z[3];
        dz[3] = jet.d_theta * z[2] + jet.d_thetadot * z[3];
        dz[4] = z[5];
        dz[5] = jet.d_theta * z[4] + jet.d_thetadot * z[5];
    }
};

}  // namespace

GraphTrajectory integrate_graph(const finsler::FinslerModel& model, double h, double slope0,
                                double tol, int n_samples) {
    GraphTrajectory traj;
    traj.tolerance = tol;
    traj.method_order = 5;
    traj.samples.reserve(n_samples);
    std::array<double, 2> z{h, slope0};
    traj.samples.push_back({0.0, z[0], z[1]});
    GraphRhs rhs{&model};
    for (int j = 1; j < n_samples; ++j) {
        double t0 = static_cast<double>(j - 1) / (n_samples - 1);
        double t1 = static_cast<double>(j) / (n_samples - 1);
        z = ode::integrate_dopri5<2>(rhs, t0, t1, z, tol, tol, "integrate_graph");
        traj.samples.push_back({t1, z[0], z[1]});
    }
    return traj;
}

std::pair<double, double> integrate_graph_endpoint(const finsler::FinslerModel& model, double h,
                                                   double slope0, double tol) {
    const auto& spec = model.spec();
    if (spec.epsilon == 0.0 || std::fabs(slope0) >= spec.cutoff.edge)
        return {h + slope0, slope0};  // exact straight geodesic
    GraphRhs rhs{&model};
    auto z = ode::integrate_dopri5<2>(rhs, 0.0, 1.0, {h, slope0}, tol, tol, "return_map");
    return {z[0], z[1]};
}

SectionState return_map(const finsler::FinslerModel& model, const SectionState& s) {
    if (!(s.v1 > 0.0)) throw std::domain_error("return_map: v1 must be positive");
    auto [theta1, w1] = integrate_graph_endpoint(model, s.h, s.v2 / s.v1);
    return make_section_state(model, fastmath::mod1(theta1), w1);
}

CylinderPoint conjugacy_g(const SectionState& s) {
    if (!(s.v1 > 0.0)) throw std::domain_error("conjugacy_g: v1 must be positive");
    return {fastmath::mod1(s.h), s.v2 / s.v1};
}

SectionState conjugacy_g_inverse(const finsler::FinslerModel& model, const CylinderPoint& p) {
    return make_section_state(model, p.x, p.y);
}

CylinderPoint conjugated_return_map(const finsler::FinslerModel& model, const CylinderPoint& p,
                                    double tol) {
    auto [theta1, w1] = integrate_graph_endpoint(model, p.x, p.y, tol);
    return {fastmath::mod1(theta1), w1};
}

Mat2 conjugated_return_map_jacobian(const finsler::FinslerModel& model, const CylinderPoint& p,
                                    double tol) {
    const auto& spec = model.spec();
    if (spec.epsilon == 0.0 || std::fabs(p.y) >= spec.cutoff.edge) return {1.0, 1.0, 0.0, 1.0};
    VariationalRhs rhs{&model};
    auto z = ode::integrate_dopri5<6>(rhs, 0.0, 1.0, {p.x, p.y, 1.0, 0.0, 0.0, 1.0}, tol, tol,
                                      "return_map_jacobian");
    return {z[2], z[4], z[3], z[5]};
}

Mat2 return_map_jacobian(const finsler::FinslerModel& model, const SectionState& s, double tol) {
    if (!(s.v1 > 0.0)) throw std::domain_error("return_map_jacobian: v1 must be positive");
    return conjugated_return_map_jacobian(model, conjugacy_g(s), tol);
}

double el_residual(const finsler::FinslerModel& model, const GraphTrajectory& traj) {
    const auto& spec = model.spec();
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < traj.samples.size(); ++j) {
        const auto& a = traj.samples[j - 1];
        const auto& b = traj.samples[j];
        const auto& c = traj.samples[j + 1];
        double pa = legendre_transform(spec, a.t, a.theta, a.thetadot).p;
        double pc = legendre_transform(spec, c.t, c.theta, c.thetadot).p;
        double dpdt = (pc - pa) / (c.t - a.t);
        double pb = legendre_transform(spec, b.t, b.theta, b.thetadot).p;
        double Lx = -hamiltonian_partials(spec, b.t, b.theta, pb).Hx;
        worst = std::fmax(worst, std::fabs(dpdt - Lx));
    }
    return worst;
}

std::string trajectory_to_csv(const GraphTrajectory& traj, const std::string& metadata) {
    std::ostringstream os;
    os.precision(17);
    os << "# " << metadata << "\n";
    os << "# tolerance=" << traj.tolerance << " method_order=" << traj.method_order << "\n";
    os << "t,theta,thetadot\n";
    for (const auto& s : traj.samples) os << s.t << "," << s.theta << "," << s.thetadot << "\n";
    return os.str();
}

}  // namespace twistflow::geodesics
