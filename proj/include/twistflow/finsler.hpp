#pragma once

#include "twistflow/core.hpp"
#include "twistflow/suspension.hpp"

#include <functional>
#include <string>
#include <vector>

// The Finsler metric F built over the suspension Lagrangian: convex profiles
// h± closing the band Lagrangian off to the cone sqrt(A + B y^2), the
// piecewise Lagrangian L, the two-sector metric F / F0, the fundamental
// tensor, and C^r distance to the flat (epsilon = 0) reference metric.
//
// The band piece carries a positive gauge constant (lagrangian_offset, the
// profiles' inner pieces are y^2/2 + offset, i.e. D± = -offset): adding a
// constant leaves the Euler-Lagrange flow untouched but is what makes F
// positive and the convex gluing to the cone feasible.

namespace twistflow::finsler {

// Chebyshev series on [a, b]; fitting, Clenshaw evaluation, antiderivatives.
class ChebSeries {
  public:
    ChebSeries() = default;
    ChebSeries(double a, double b, std::vector<double> coef)
        : a_(a), b_(b), coef_(std::move(coef)) {}

    static ChebSeries fit(const std::function<double(double)>& f, double a, double b, int n);

    double eval(double x) const;
    // Antiderivative with F(a) = value_at_a.
    ChebSeries antiderivative(double value_at_a) const;
    // Integral over the whole interval.
    double integral() const;

    double lo() const { return a_; }
    double hi() const { return b_; }
    const std::vector<double>& coef() const { return coef_; }

  private:
    double a_ = -1.0, b_ = 1.0;
    std::vector<double> coef_;
};

enum class ProfileSide { plus, minus };

// h±: inner parabola y^2/2 + offset (for |y| < D+1 on its side), outer cone
// sqrt(A + B y^2) (for |y| > D+2), and a certified-convex blend in between.
class ConvexProfile {
  public:
    struct Pack {
        double h, h1, h2;
    };

    double value(double y) const;
    Pack pack(double y) const;

    ProfileSide side() const { return side_; }
    double D() const { return D_; }
    double A() const { return A_; }
    double B() const { return B_; }
    double inner_offset() const { return offset_; }
    // Blend second-derivative series (side-plus orientation).
    const ChebSeries& blend_h2() const { return h2_; }
    const ChebSeries& blend_h1() const { return h1_; }
    const ChebSeries& blend_h() const { return h_; }

    friend ConvexProfile build_profile(double D, double A, double B, double offset,
                                       ProfileSide side);
    friend class FinslerModel;

  private:
    ProfileSide side_ = ProfileSide::plus;
    double D_ = 0.0, A_ = 0.0, B_ = 0.0, offset_ = 0.0;
    ChebSeries h2_, h1_, h_;  // blend pieces on [D+1, D+2] in plus orientation
};

// Feasible (A, B, offset) for a given D, solved so the convex gluing exists
// with comfortable margins.
struct ProfileConstants {
    double A, B, offset;
};
ProfileConstants solve_profile_constants(double D);

// Builds a profile or throws std::invalid_argument naming the violated
// admissibility inequality. The blend is convex by construction and certified
// on a 10^4-point grid.
ConvexProfile build_profile(double D, double A, double B, double offset, ProfileSide side);

// F0(v) = sqrt(A v1^2 + B v2^2).
double flat_sector_norm(double A, double B, double v1, double v2);

class FinslerModel {
  public:
    // Auto-derived constants (solve_profile_constants) for the family.
    static FinslerModel create(double epsilon, double band_K = 12.0,
                               suspension::IntegratorProfile profile =
                                   suspension::IntegratorProfile::accurate());
    static FinslerModel create_with(suspension::SuspensionSpec spec, ProfileConstants constants,
                                    suspension::IntegratorProfile profile =
                                        suspension::IntegratorProfile::accurate());

    const suspension::SuspensionSpec& spec() const { return spec_; }
    const suspension::TimeOneMap& time1_map() const { return *map_; }
    const ConvexProfile& h_plus() const { return h_plus_; }
    const ConvexProfile& h_minus() const { return h_minus_; }
    double A() const { return A_; }
    double B() const { return B_; }
    double D() const { return spec_.lagrangian_D; }
    double lagrangian_offset() const { return offset_; }

    // L(t,x,y): h-(y) | Lhat(t,x,y) + offset | h+(y).
    double lagrangian_full_eval(double t, double x, double y) const;
    // L with first and second y-derivatives (band: via the Legendre solve).
    ConvexProfile::Pack lagrangian_slope_pack(double t, double x, double y) const;
    // epsilon = 0 specialization of the same piecewise function.
    ConvexProfile::Pack flat_slope_pack(double y) const;

    double finsler_eval(double t, double x, double v1, double v2) const;
    double flat_reference_eval(double t, double x, double v1, double v2) const;

    // Fiberwise Hessian of F^2/2; positive definite.
    Mat2 fundamental_tensor(double t, double x, double v1, double v2) const;

    std::string to_json() const;
    static FinslerModel from_json(const std::string& text);

  private:
    FinslerModel(suspension::SuspensionSpec spec, ConvexProfile hp, ConvexProfile hm, double A,
                 double B, double offset, suspension::IntegratorProfile profile);

    suspension::SuspensionSpec spec_;
    suspension::IntegratorProfile profile_;
    std::shared_ptr<const suspension::TimeOneMap> map_;
    ConvexProfile h_plus_, h_minus_;
    double A_, B_, offset_;
};

// Region for cr_distance: a grid over (t, x, phi) with v = (cos phi, sin phi).
struct CrRegion {
    int nt = 6, nx = 6, nphi = 17;
    double phi_max = 1.25;  // v1 >= cos(phi_max) > 0
};

// max over the grid and multi-indices |alpha| <= r of |d^alpha (F - Fbar)|,
// nested central differences with step 1e-3 per order.
double cr_distance(const FinslerModel& model, int r, const CrRegion& region = {});

}  // namespace twistflow::finsler
