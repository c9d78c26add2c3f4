#pragma once

#include "twistflow/core.hpp"
#include "twistflow/smooth.hpp"

// The symplectic kick shared by the scalar schedule runner and the lockstep
// FTLE kernel. One kick of impulse tau is the exactly symplectic
// generating-function pair A(tau/2) (y-implicit, x-explicit) then B(tau/2)
// (x-implicit, y-explicit); the pair is self-adjoint, so symmetric
// compositions reach even orders.
//
// kick_plateau is the same arithmetic specialized to the cutoff plateau
// (c = 1, c' = c'' = 0); it produces bit-identical results there, which the
// tests assert.

namespace twistflow::suspension::detail {

template <bool Tangent>
inline void kick(const smooth::CutoffShape& cutoff, double tau, int iters, double& x, double& y,
                 Mat2& M) {
    const double sg = 0.5 * tau;

    // A: solve d = y1 - y from d + sg*V'(x)*c(y+d) = 0, then x += sg*V(x)*c'(y1)
    smooth::PotentialPack va = smooth::potential_pack(x);
    smooth::CutoffShape::Pack cw = cutoff.pack(y);
    double d = -sg * va.V1 * cw.c;
    for (int it = 0; it < iters; ++it) {
        cw = cutoff.pack(y + d);
        double f = d + sg * va.V1 * cw.c;
        double fp = 1.0 + sg * va.V1 * cw.c1;
        d -= f / fp;
    }
    cw = cutoff.pack(y + d);
    if constexpr (Tangent) {
        double rho = 1.0 + sg * va.V1 * cw.c1;
        double y1x = -sg * va.V2 * cw.c / rho;
        double y1y = 1.0 / rho;
        double x1x = rho + sg * va.V * cw.c2 * y1x;
        double x1y = sg * va.V * cw.c2 * y1y;
        M = Mat2{x1x, x1y, y1x, y1y} * M;
    }
    x += sg * va.V * cw.c1;
    y += d;

    // B: solve e = x1 - x from e = sg*V(x+e)*c'(y), then y -= sg*V'(x1)*c(y)
    smooth::CutoffShape::Pack cb = cutoff.pack(y);
    smooth::PotentialPack vb = smooth::potential_pack(x);
    double e = sg * vb.V * cb.c1;
    for (int it = 0; it < iters; ++it) {
        vb = smooth::potential_pack(x + e);
        double g = e - sg * vb.V * cb.c1;
        double gp = 1.0 - sg * vb.V1 * cb.c1;
        e -= g / gp;
    }
    smooth::PotentialPack vf = smooth::potential_pack(x + e);
    if constexpr (Tangent) {
        double rho = 1.0 - sg * vf.V1 * cb.c1;
        double xx = 1.0 / rho;
        double xy = sg * vf.V * cb.c2 / rho;
        double yx = -sg * vf.V2 * cb.c * xx;
        double yy = rho - sg * vf.V2 * cb.c * xy;
        M = Mat2{xx, xy, yx, yy} * M;
    }
    x += e;
    y -= sg * vf.V1 * cb.c;
}

// Branch-free plateau specialization (c == 1, derivatives 0 exactly). Mirrors
// the expression shapes of the general kick so the results agree bitwise.
template <bool Tangent>
inline void kick_plateau(double tau, double& x, double& y, Mat2& M) {
    const double sg = 0.5 * tau;
    smooth::PotentialPack va = smooth::potential_pack(x);
    double d = -sg * va.V1;
    if constexpr (Tangent) {
        double y1x = -sg * va.V2;
        M = Mat2{1.0, 0.0, y1x, 1.0} * M;
    }
    y += d;
    if constexpr (Tangent) {
        double yx = -sg * va.V2;
        M = Mat2{1.0, 0.0, yx, 1.0} * M;
    }
    y -= sg * va.V1;
}

}  // namespace twistflow::suspension::detail
