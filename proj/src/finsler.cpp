#include "twistflow/finsler.hpp"

#include "twistflow/fastmath.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace twistflow::finsler {

// --- Chebyshev -----------------------------------------------------------

ChebSeries ChebSeries::fit(const std::function<double(double)>& f, double a, double b, int n) {
    // Chebyshev-Lobatto interpolation, direct DCT (n is small).
    std::vector<double> fx(n + 1);
    for (int j = 0; j <= n; ++j) {
        double u = std::cos(M_PI * j / n);
        fx[j] = f(0.5 * (a + b) + 0.5 * (b - a) * u);
    }
    std::vector<double> c(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            double w = (j == 0 || j == n) ? 0.5 : 1.0;
            acc += w * fx[j] * std::cos(M_PI * k * j / n);
        }
        c[k] = 2.0 * acc / n;
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    return ChebSeries(a, b, std::move(c));
}

double ChebSeries::eval(double x) const {
    double u = (2.0 * x - (a_ + b_)) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(coef_.size()) - 1; k >= 1; --k) {
        double tmp = 2.0 * u * b1 - b2 + coef_[k];
        b2 = b1;
        b1 = tmp;
    }
    return u * b1 - b2 + coef_[0];
}

ChebSeries ChebSeries::antiderivative(double value_at_a) const {
    int n = static_cast<int>(coef_.size());
    std::vector<double> b(n + 1, 0.0);
    double scale = 0.5 * (b_ - a_);
    auto c = [&](int k) { return k < n ? coef_[k] : 0.0; };
    if (n >= 1) b[1] = scale * (c(0) - 0.5 * c(2));
    for (int k = 2; k <= n; ++k) b[k] = scale * (c(k - 1) - c(k + 1)) / (2.0 * k);
    ChebSeries out(a_, b_, std::move(b));
    out.coef_[0] += value_at_a - out.eval(a_);
    return out;
}

double ChebSeries::integral() const {
    ChebSeries F = antiderivative(0.0);
    return F.eval(b_) - F.eval(a_);
}

// --- profiles ------------------------------------------------------------

namespace {

// Unnormalized compactly supported bump on (0,1).
double unit_bump(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double q = 4.0 * u * (1.0 - u);
    return fastmath::fast_exp(1.0 - 1.0 / q);
}

double cone_h2(double A, double B, double y) {
    double s = std::sqrt(A + B * y * y);
    return A * B / (s * s * s);
}

}  // namespace

ProfileConstants solve_profile_constants(double D) {
    if (D <= 0.0) throw std::invalid_argument("profile: D must be positive");
    double y1 = D + 1.0, y2 = D + 2.0;
    double s2 = y2;  // target outer slope at y2
    double offset = s2 * y2 - 0.5 * y1 * y1 - y1 - 0.5 + 0.5 * y2;
    double sigma = 0.5 * y1 * y1 + offset + y1 + 0.5;  // target outer value at y2
    double A = sigma * (sigma - s2 * y2);
    double B = s2 * sigma / y2;
    return {A, B, offset};
}

ConvexProfile build_profile(double D, double A, double B, double offset, ProfileSide side) {
    if (D <= 0.0) throw std::invalid_argument("profile: D must be positive");
    if (A <= 0.0 || B <= 0.0) throw std::invalid_argument("profile: A, B must be positive");
    double y1 = D + 1.0, y2 = D + 2.0;
    if (std::sqrt(B) <= y2)
        throw std::invalid_argument(
            "profile: slope compatibility sqrt(B) > D+2 violated (cone too shallow)");

    // Required junction data.
    double h_y1 = 0.5 * y1 * y1 + offset;  // inner piece value/slope at y1
    double sigma = std::sqrt(A + B * y2 * y2);
    double s2 = B * y2 / sigma;
    if (s2 <= y1)
        throw std::invalid_argument(
            "profile: outer slope at D+2 does not exceed the inner slope at D+1 "
            "(convex interpolation impossible)");
    // Tangent-intercept monotonicity: tau(y) = h - y h' must not increase.
    double tau1 = h_y1 - y1 * y1;  // inner tangent intercept at y1
    double tau2 = sigma - y2 * s2;  // = A/sigma > 0
    if (tau2 >= tau1)
        throw std::invalid_argument(
            "profile: tangent intercept A/sigma >= offset - (D+1)^2/2; no convex "
            "completion exists (offset too small for these A, B)");
    double dS = s2 - y1;          // slope increment over the blend
    double dV = sigma - h_y1;     // value increment over the blend

    // h'' on the blend: bridge between the inner value 1 and the outer cone
    // curvature, plus two compact bumps solving the slope/value moments.
    const int N = 220;
    auto to_u = [y1](double y) { return y - y1; };
    ChebSeries bridge = ChebSeries::fit(
        [&](double y) {
            double u = to_u(y);
            return 1.0 + (cone_h2(A, B, y) - 1.0) * smooth::step(u);
        },
        y1, y2, N);
    ChebSeries w1 = ChebSeries::fit([&](double y) { return unit_bump(to_u(y) / 0.55); }, y1, y2, N);
    ChebSeries w2 = ChebSeries::fit(
        [&](double y) { return unit_bump((to_u(y) - 0.45) / 0.55); }, y1, y2, N);

    auto moments = [&](const ChebSeries& s) {
        ChebSeries F1 = s.antiderivative(0.0);
        ChebSeries F2 = F1.antiderivative(0.0);
        return std::pair{F1.eval(y2), F2.eval(y2)};  // {integral, double integral}
    };
    auto [Ib, Jb] = moments(bridge);
    auto [I1, J1] = moments(w1);
    auto [I2, J2] = moments(w2);

    // Solve alpha*I1 + beta*I2 = dS - Ib ; alpha*J1 + beta*J2 = dV - y1 - Jb.
    double r1 = dS - Ib;
    double r2 = dV - y1 * (y2 - y1) - Jb;
    double det = I1 * J2 - I2 * J1;
    if (std::fabs(det) < 1e-14)
        throw std::invalid_argument("profile: degenerate moment system");
    double alpha = (r1 * J2 - r2 * I2) / det;
    double beta = (I1 * r2 - J1 * r1) / det;

    std::vector<double> coef(bridge.coef().size());
    for (std::size_t k = 0; k < coef.size(); ++k)
        coef[k] = bridge.coef()[k] + alpha * w1.coef()[k] + beta * w2.coef()[k];
    ChebSeries h2(y1, y2, std::move(coef));

    // Convexity certification on a fine grid.
    double min_h2 = 1e300;
    for (int i = 0; i <= 10000; ++i)
        min_h2 = std::fmin(min_h2, h2.eval(y1 + (y2 - y1) * i / 10000.0));
    if (min_h2 <= 0.0)
        throw std::invalid_argument(
            "profile: blend convexity h'' > 0 failed (min = " + std::to_string(min_h2) + ")");

    ConvexProfile p;
    p.side_ = side;
    p.D_ = D;
    p.A_ = A;
    p.B_ = B;
    p.offset_ = offset;
    p.h2_ = h2;
    p.h1_ = h2.antiderivative(y1);
    p.h_ = p.h1_.antiderivative(h_y1);
    return p;
}

double ConvexProfile::value(double y) const { return pack(y).h; }

ConvexProfile::Pack ConvexProfile::pack(double y) const {
    // side minus is the mirror image of side plus.
    double z = side_ == ProfileSide::plus ? y : -y;
    double sgn = side_ == ProfileSide::plus ? 1.0 : -1.0;
    double y1 = D_ + 1.0, y2 = D_ + 2.0;
    Pack out;
    if (z <= y1) {
        out = {0.5 * z * z + offset_, z, 1.0};
    } else if (z >= y2) {
        double s = std::sqrt(A_ + B_ * z * z);
        out = {s, B_ * z / s, A_ * B_ / (s * s * s)};
    } else {
        out = {h_.eval(z), h1_.eval(z), h2_.eval(z)};
    }
    out.h1 *= sgn;
    return out;
}

double flat_sector_norm(double A, double B, double v1, double v2) {
    if (v1 == 0.0 && v2 == 0.0)
        throw std::domain_error("finsler: metric undefined on the zero vector");
    return std::sqrt(A * v1 * v1 + B * v2 * v2);
}

// --- model ---------------------------------------------------------------

FinslerModel::FinslerModel(suspension::SuspensionSpec spec, ConvexProfile hp, ConvexProfile hm,
                           double A, double B, double offset,
                           suspension::IntegratorProfile profile)
    : spec_(std::move(spec)),
      profile_(profile),
      map_(std::make_shared<suspension::TimeOneMap>(spec_, profile)),
      h_plus_(std::move(hp)),
      h_minus_(std::move(hm)),
      A_(A),
      B_(B),
      offset_(offset) {}

FinslerModel FinslerModel::create(double epsilon, double band_K,
                                  suspension::IntegratorProfile profile) {
    auto spec = suspension::SuspensionSpec::create(epsilon, band_K);
    return create_with(std::move(spec), solve_profile_constants(band_K), profile);
}

FinslerModel FinslerModel::create_with(suspension::SuspensionSpec spec,
                                       ProfileConstants constants,
                                       suspension::IntegratorProfile profile) {
    double D = spec.lagrangian_D;
    // The gauge constant must dominate the band Lagrangian's negative part.
    if (constants.offset <= 0.5 * (D + 1.0) * (D + 1.0))
        throw std::invalid_argument(
            "finsler: lagrangian offset must exceed (D+1)^2/2 for a positive metric");
    ConvexProfile hp = build_profile(D, constants.A, constants.B, constants.offset,
                                     ProfileSide::plus);
    ConvexProfile hm = build_profile(D, constants.A, constants.B, constants.offset,
                                     ProfileSide::minus);
    return FinslerModel(std::move(spec), std::move(hp), std::move(hm), constants.A, constants.B,
                        constants.offset, profile);
}

double FinslerModel::lagrangian_full_eval(double t, double x, double y) const {
    double D = spec_.lagrangian_D;
    if (y < -D) return h_minus_.value(y);
    if (y > D) return h_plus_.value(y);
    return suspension::lagrangian_hat_eval(spec_, t, x, y) + offset_;
}

ConvexProfile::Pack FinslerModel::lagrangian_slope_pack(double t, double x, double y) const {
    double D = spec_.lagrangian_D;
    if (y < -D) return h_minus_.pack(y);
    if (y > D) return h_plus_.pack(y);
    auto lr = suspension::legendre_transform(spec_, t, x, y);
    auto hp = suspension::hamiltonian_partials(spec_, t, x, lr.p);
    return {lr.lagrangian + offset_, lr.p, 1.0 / hp.Hyy};
}

ConvexProfile::Pack FinslerModel::flat_slope_pack(double y) const {
    double D = spec_.lagrangian_D;
    if (y < -D) return h_minus_.pack(y);
    if (y > D) return h_plus_.pack(y);
    return {0.5 * y * y + offset_, y, 1.0};
}

double FinslerModel::finsler_eval(double t, double x, double v1, double v2) const {
    if (v1 == 0.0 && v2 == 0.0)
        throw std::domain_error("finsler: metric undefined on the zero vector");
    if (v1 <= 0.0) return flat_sector_norm(A_, B_, v1, v2);
    return v1 * lagrangian_full_eval(t, x, v2 / v1);
}

double FinslerModel::flat_reference_eval(double t, double x, double v1, double v2) const {
    (void)t;
    (void)x;
    if (v1 == 0.0 && v2 == 0.0)
        throw std::domain_error("finsler: metric undefined on the zero vector");
    if (v1 <= 0.0) return flat_sector_norm(A_, B_, v1, v2);
    return v1 * flat_slope_pack(v2 / v1).h;
}

Mat2 FinslerModel::fundamental_tensor(double t, double x, double v1, double v2) const {
    if (v1 == 0.0 && v2 == 0.0)
        throw std::domain_error("finsler: metric undefined on the zero vector");
    if (v1 <= 0.0) return {A_, 0.0, 0.0, B_};  // constant Hessian of F0^2/2
    double w = v2 / v1;
    auto lp = lagrangian_slope_pack(t, x, w);
    double f = v1 * lp.h;
    double d1 = lp.h - w * lp.h1;  // df/dv1
    double d2 = lp.h1;             // df/dv2
    double k = lp.h2 / v1;
    // Hess f = l''/v1 * [[w^2, -w], [-w, 1]];  g = Df (x) Df + f Hess f
    return {d1 * d1 + f * k * w * w, d1 * d2 - f * k * w,
            d1 * d2 - f * k * w, d2 * d2 + f * k};
}

// --- C^r distance --------------------------------------------------------

namespace {

double diff_rec(const FinslerModel& model, bool flat, std::array<double, 4> z,
                const std::vector<int>& alpha, std::size_t idx, double step) {
    if (idx == alpha.size()) {
        return flat ? model.flat_reference_eval(z[0], z[1], z[2], z[3])
                    : model.finsler_eval(z[0], z[1], z[2], z[3]);
    }
    int dim = alpha[idx];
    auto zp = z, zm = z;
    zp[dim] += step;
    zm[dim] -= step;
    return (diff_rec(model, flat, zp, alpha, idx + 1, step) -
            diff_rec(model, flat, zm, alpha, idx + 1, step)) /
           (2.0 * step);
}

void enumerate_alphas(int r, std::vector<std::vector<int>>& out) {
    // all monotone index tuples over 4 dims with length 1..r
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth > 0) out.push_back(cur);
        if (depth == r) return;
        for (int d = start; d < 4; ++d) {
            cur.push_back(d);
            rec(d, depth + 1);
            cur.pop_back();
        }
    };
    rec(0, 0);
}

}  // namespace

double cr_distance(const FinslerModel& model, int r, const CrRegion& region) {
    if (r < 0 || r > 4) throw std::invalid_argument("cr_distance: order must be in [0,4]");
    std::vector<std::vector<int>> alphas;
    alphas.push_back({});  // order 0
    enumerate_alphas(r, alphas);

    const double step = 1e-3;
    double worst = 0.0;
    for (int it = 0; it < region.nt; ++it)
        for (int ix = 0; ix < region.nx; ++ix)
            for (int ip = 0; ip < region.nphi; ++ip) {
                double t = (it + 0.5) / region.nt;
                double x = (ix + 0.5) / region.nx;
                double phi = -region.phi_max +
                             2.0 * region.phi_max * ip / std::max(1, region.nphi - 1);
                std::array<double, 4> z{t, x, std::cos(phi), std::sin(phi)};
                for (const auto& alpha : alphas) {
                    double dF = diff_rec(model, false, z, alpha, 0, step);
                    double dFb = diff_rec(model, true, z, alpha, 0, step);
                    worst = std::fmax(worst, std::fabs(dF - dFb));
                }
            }
    return worst;
}

// --- serialization -------------------------------------------------------

std::string FinslerModel::to_json() const {
    nlohmann::json j;
    j["epsilon"] = spec_.epsilon;
    j["band_K"] = spec_.band_K;
    j["D"] = spec_.lagrangian_D;
    j["D_plus"] = -offset_;
    j["D_minus"] = -offset_;
    j["A"] = A_;
    j["B"] = B_;
    j["lagrangian_offset"] = offset_;
    j["cutoff_plateau"] = spec_.cutoff.plateau;
    j["cutoff_edge"] = spec_.cutoff.edge;
    j["integrator"] = {{"order", profile_.order},
                       {"step", profile_.step},
                       {"newton_iters", profile_.newton_iters},
                       {"richardson", profile_.richardson}};
    j["integrator_tol"] = spec_.integrator_tol;
    auto series = [](const ChebSeries& s) {
        return nlohmann::json{{"lo", s.lo()}, {"hi", s.hi()}, {"coef", s.coef()}};
    };
    j["h_plus_blend_h2"] = series(h_plus_.blend_h2());
    j["h_minus_blend_h2"] = series(h_minus_.blend_h2());
    return j.dump(2);
}

FinslerModel FinslerModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    auto spec = suspension::SuspensionSpec::create(j.at("epsilon").get<double>(),
                                                   j.at("band_K").get<double>(),
                                                   j.at("integrator_tol").get<double>());
    suspension::IntegratorProfile prof;
    prof.order = j.at("integrator").at("order").get<int>();
    prof.step = j.at("integrator").at("step").get<double>();
    prof.newton_iters = j.at("integrator").at("newton_iters").get<int>();
    prof.richardson = j.at("integrator").at("richardson").get<bool>();
    ProfileConstants pc{j.at("A").get<double>(), j.at("B").get<double>(),
                        j.at("lagrangian_offset").get<double>()};
    return create_with(std::move(spec), pc, prof);
}

}  // namespace twistflow::finsler
