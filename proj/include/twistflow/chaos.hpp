#pragma once

#include "twistflow/core.hpp"
#include "twistflow/cylinder.hpp"
#include "twistflow/finsler.hpp"

#include <functional>
#include <string>
#include <vector>

// Finite-time maximal Lyapunov exponents, island-area and metric-entropy
// estimates, and KAM-circle detection for any area-preserving map supplied by
// the other modules.
//
// The grid sweep has two implementations with bit-identical output: a serial
// per-cell reference, and the production kernel that advances blocks of cells
// in lockstep (vectorizable) under OpenMP. Cells are independent work items;
// the output is deterministic regardless of scheduling.

namespace twistflow::chaos {

struct MapSystem {
    // One application of the map with its Jacobian.
    std::function<std::pair<CylinderPoint, Mat2>(const CylinderPoint&)> step;
    // Optional lockstep kernel: advances `count` cells one application each,
    // writing the per-application tangent into J. Bit-identical to `step`.
    // The arrays must have capacity 8 with lanes beyond `count` initialized.
    std::function<void(double* x, double* y, Mat2* J, int count)> block_step;
};

MapSystem shear_system();
MapSystem twist_system(const cylinder::TwistMapSpec& spec);
MapSystem conjugated_return_system(const finsler::FinslerModel& model, double tol = 1e-10);

// (1/n) log ||Df^n(p)||: Jacobian products with spectral-norm rescaling every
// step, log-sum accumulated.
double ftle(const MapSystem& map, const CylinderPoint& p, int n_iter);

struct FTLEField {
    GridSpec grid;
    int n_iter = 0;
    double threshold = 0.05;
    std::vector<double> values;  // row-major, index j*nx + i (j indexes y)

    double value(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
    double max_value() const;
};

// Serial reference sweep (per-cell, no blocking).
FTLEField ftle_field_serial(const MapSystem& map, const GridSpec& grid, int n_iter,
                            double threshold = 0.05);
// Production sweep: OpenMP over cell blocks, lockstep kernel when available.
FTLEField ftle_field(const MapSystem& map, const GridSpec& grid, int n_iter,
                     double threshold = 0.05);

// Cell measure of {FTLE > threshold}.
double island_area(const FTLEField& field);
double island_area(const FTLEField& field, double threshold);
// Riemann sum of max(FTLE, 0) over the field domain.
double metric_entropy_estimate(const FTLEField& field);

struct KamSample {
    double y0;
    double oscillation;  // max_n |y_n - y0|
    double x_fill_gap;   // largest circular gap of the visited x values
    bool circle_like;
};

struct KamReport {
    std::vector<KamSample> samples;
    double circle_like_fraction = 0.0;
};

// Samples y0 over the band (golden-ratio offsets, avoiding low-denominator
// rationals), iterates (0, y0), classifies circle-like orbits by oscillation
// and x-fill thresholds.
KamReport kam_circles(const MapSystem& map, double y_lo, double y_hi, int n_samples, int n_iter,
                      double oscillation_threshold = 0.05, double fill_threshold = 0.05);

// Two-orbit divergence estimate of the maximal exponent (renormalized nearby
// orbits); the cross-check oracle for ftle.
double orbit_divergence_exponent(const MapSystem& map, const CylinderPoint& p, int n_iter,
                                 double separation = 1e-8);

// CSV rows (x, y, ftle).
std::string field_to_csv(const FTLEField& field);
// Compact binary: magic "FTLEFLD1", doubles x0,x1,y0,y1, u32 nx,ny,
// u64 n_iter, double threshold, then row-major little-endian f64 values.
void field_to_binary(const FTLEField& field, const std::string& path);
FTLEField field_from_binary(const std::string& path);

}  // namespace twistflow::chaos
