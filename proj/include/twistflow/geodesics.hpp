#pragma once

#include "twistflow/core.hpp"
#include "twistflow/finsler.hpp"

#include <string>
#include <vector>

// Geodesics of F in graph form: curves gamma(t) = (t, theta(t)) are
// reparametrized F-geodesics iff theta solves the Euler-Lagrange equation of
// L. The section V0 = {(0,h,v) : v1 > 0, F = 1}, its first-return map R
// (return time exactly 1 in graph parametrization), and the conjugacy
// g(0,h,v) = (h, v2/v1) to the twist map.

namespace twistflow::geodesics {

struct SectionState {
    double h = 0.0;   // S^1 coordinate of the section point (0, h)
    double v1 = 1.0;  // tangent components, v1 > 0, F(0,h,v1,v2) = 1
    double v2 = 0.0;

    double slope() const { return v2 / v1; }
};

// Unit-speed section state over (h, slope); throws std::domain_error on a
// non-positive v1 request.
SectionState make_section_state(const finsler::FinslerModel& model, double h, double slope);
void validate_section_state(const finsler::FinslerModel& model, const SectionState& s);

struct GraphTrajectory {
    struct Sample {
        double t, theta, thetadot;
    };
    std::vector<Sample> samples;
    double tolerance = 0.0;
    int method_order = 5;
};

// theta'' from the Euler-Lagrange equation of L; zero outside the band where
// L depends on the slope alone.
double el_rhs(const finsler::FinslerModel& model, double t, double theta, double thetadot);

struct ElJet {
    double rhs, d_theta, d_thetadot;
};
ElJet el_rhs_with_partials(const finsler::FinslerModel& model, double t, double theta,
                           double thetadot);

// Integrates theta'' = el_rhs on [0,1] with theta(0) = h, theta'(0) = slope0.
GraphTrajectory integrate_graph(const finsler::FinslerModel& model, double h, double slope0,
                                double tol = 1e-10, int n_samples = 65);

// Endpoint only (theta(1), theta'(1)).
std::pair<double, double> integrate_graph_endpoint(const finsler::FinslerModel& model, double h,
                                                   double slope0, double tol = 1e-10);

// First-return map of the geodesic flow on V0.
SectionState return_map(const finsler::FinslerModel& model, const SectionState& s);

// g(0,h,v1,v2) = (h, v2/v1); throws std::domain_error for v1 <= 0.
CylinderPoint conjugacy_g(const SectionState& s);

// g^{-1}(x,y) = (0, x, (1,y)/F(0,x,1,y)).
SectionState conjugacy_g_inverse(const finsler::FinslerModel& model, const CylinderPoint& p);

// The conjugated map g . R . g^{-1} acting on cylinder coordinates.
CylinderPoint conjugated_return_map(const finsler::FinslerModel& model, const CylinderPoint& p,
                                    double tol = 1e-10);

// Derivative of g . R . g^{-1} at p, via the variational equation along
// el_rhs; det = 1 up to integrator error.
Mat2 return_map_jacobian(const finsler::FinslerModel& model, const SectionState& s,
                         double tol = 1e-10);
Mat2 conjugated_return_map_jacobian(const finsler::FinslerModel& model, const CylinderPoint& p,
                                    double tol = 1e-10);

// Max |d/dt(dL/dv) - dL/dx| along the trajectory, by centered differences of
// the momentum between samples.
double el_residual(const finsler::FinslerModel& model, const GraphTrajectory& traj);

// CSV rows (t, theta, thetadot) with a run-metadata comment header.
std::string trajectory_to_csv(const GraphTrajectory& traj, const std::string& metadata);

}  // namespace twistflow::geodesics
