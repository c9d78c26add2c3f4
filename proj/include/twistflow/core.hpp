#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace twistflow {

// Thrown when an integrator or root solve cannot reach its tolerance.
// `residual` carries the achieved error estimate for diagnostics.
struct NumericalError : std::runtime_error {
    NumericalError(const std::string& what, double residual_)
        : std::runtime_error(what + " (achieved residual " + std::to_string(residual_) + ")"),
          residual(residual_) {}
    double residual;
};

// Point of the cylinder Z = S^1 x R. x is kept reduced into [0,1).
struct CylinderPoint {
    double x = 0.0;
    double y = 0.0;
};

// 2x2 real matrix, row-major.
struct Mat2 {
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

    static Mat2 identity() { return {}; }

    friend Mat2 operator*(const Mat2& l, const Mat2& r) {
        return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
                l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
    }

    double det() const { return a11 * a22 - a12 * a21; }

    // Spectral norm (largest singular value).
    double norm2() const {
        double g11 = a11 * a11 + a21 * a21;
        double g12 = a11 * a12 + a21 * a22;
        double g22 = a12 * a12 + a22 * a22;
        double tr = g11 + g22;
        double disc = std::sqrt(std::fmax((g11 - g22) * (g11 - g22) + 4.0 * g12 * g12, 0.0));
        return std::sqrt(std::fmax(0.5 * (tr + disc), 0.0));
    }

    double max_abs() const {
        return std::fmax(std::fmax(std::fabs(a11), std::fabs(a12)),
                         std::fmax(std::fabs(a21), std::fabs(a22)));
    }

    // Smallest eigenvalue of a symmetric matrix.
    double symmetric_min_eigenvalue() const {
        double mean = 0.5 * (a11 + a22);
        double disc = std::sqrt(std::fmax(0.25 * (a11 - a22) * (a11 - a22) + a12 * a21, 0.0));
        return mean - disc;
    }
};

// Rectangular evaluation grid on the cylinder.
struct GridSpec {
    double x0 = 0.0, x1 = 1.0;
    double y0 = -0.5, y1 = 0.5;
    int nx = 256, ny = 256;

    double cell_area() const { return (x1 - x0) / nx * ((y1 - y0) / ny); }
    double cx(int i) const { return x0 + (i + 0.5) * (x1 - x0) / nx; }
    double cy(int j) const { return y0 + (j + 0.5) * (y1 - y0) / ny; }
};

// Deterministic uniform RNG (splitmix64 core). Kept libc-independent so
// fixtures do not depend on the standard library's distribution details.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::uint64_t state_;
};

}  // namespace twistflow
