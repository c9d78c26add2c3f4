#include "twistflow/chaos.hpp"

#include "twistflow/fastmath.hpp"
#include "twistflow/geodesics.hpp"
#include "twistflow/kick.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace twistflow::chaos {

MapSystem shear_system() {
    MapSystem sys;
    sys.step = [](const CylinderPoint& p) {
        return std::pair{cylinder::shear_apply(p), Mat2{1.0, 1.0, 0.0, 1.0}};
    };
    return sys;
}

namespace {

constexpr int kLanes = 8;

// Lockstep advance of up to kLanes cells through one map application,
// mirroring TimeOneMap::apply_with_jacobian bit for bit. Only valid when no
// lane sits in the far region (the caller checks). State and tangent lanes
// are kept in SoA arrays so the plateau path vectorizes.
void twist_block_apply(const suspension::SuspensionSpec& spec,
                       const suspension::Schedule& sched, double* x, double* y, Mat2* J,
                       int count) {
    const double guard = spec.cutoff.plateau - 0.05;
    constexpr double TP = 6.2831853071795864769;
    constexpr double TP2 = TP * TP;

    alignas(64) double m11[kLanes], m12[kLanes], m21[kLanes], m22[kLanes];
    for (int l = 0; l < count; ++l) {
        m11[l] = 1.0;
        m12[l] = 0.0;
        m21[l] = 0.0;
        m22[l] = 1.0;
    }

    for (const auto& op : sched.ops) {
        const double dt = op.dt;
#pragma omp simd
        for (int l = 0; l < kLanes; ++l) {
            x[l] += dt * y[l];
            m11[l] += dt * m21[l];
            m12[l] += dt * m22[l];
        }
        if (op.tau == 0.0) continue;

        bool all_plateau = true;
        for (int l = 0; l < count; ++l) all_plateau &= std::fabs(y[l]) < guard;
        if (all_plateau) {
            // inline SoA form of detail::kick_plateau<true>
            const double sg = 0.5 * op.tau;
#pragma omp simd
            for (int l = 0; l < kLanes; ++l) {
                auto [sn, cs] = fastmath::sincos_2pi(x[l]);
                double V1 = -TP * sn;
                double V2 = -TP2 * cs;
                double d = -sg * V1;
                double y1x = -sg * V2;
                m21[l] = y1x * m11[l] + m21[l];
                m22[l] = y1x * m12[l] + m22[l];
                y[l] += d;
                m21[l] = y1x * m11[l] + m21[l];
                m22[l] = y1x * m12[l] + m22[l];
                y[l] -= sg * V1;
            }
        } else {
            for (int l = 0; l < count; ++l) {
                Mat2 M{m11[l], m12[l], m21[l], m22[l]};
                if (std::fabs(y[l]) < guard)
                    suspension::detail::kick_plateau<true>(op.tau, x[l], y[l], M);
                else
                    suspension::detail::kick<true>(spec.cutoff, op.tau, sched.newton_iters, x[l],
                                                   y[l], M);
                m11[l] = M.a11;
                m12[l] = M.a12;
                m21[l] = M.a21;
                m22[l] = M.a22;
            }
        }
    }
    for (int l = 0; l < count; ++l) {
        x[l] = fastmath::mod1(x[l]);
        J[l] = Mat2{m11[l], m12[l], m21[l], m22[l]};
    }
}

}  // namespace

MapSystem twist_system(const cylinder::TwistMapSpec& spec) {
    MapSystem sys;
    sys.step = [spec](const CylinderPoint& p) { return spec.time1_map().apply_with_jacobian(p); };
    // The lockstep kernel matches the scalar path only when it runs the same
    // schedule once per application (no Richardson re-run).
    if (!spec.time1_map().profile().richardson) {
        sys.block_step = [spec](double* x, double* y, Mat2* J, int count) {
            const auto& map = spec.time1_map();
            const auto& sspec = map.spec();
            bool fallback = sspec.epsilon == 0.0;
            for (int l = 0; l < count && !fallback; ++l)
                fallback |= std::fabs(y[l]) >= sspec.cutoff.edge;
            if (fallback) {
                // Far lanes take the exact-shear shortcut inside the scalar
                // path; blocks touching that region defer to it lane by lane.
                for (int l = 0; l < count; ++l) {
                    auto [q, m] = map.apply_with_jacobian({x[l], y[l]});
                    x[l] = q.x;
                    y[l] = q.y;
                    J[l] = m;
                }
                return;
            }
            twist_block_apply(sspec, map.schedule(), x, y, J, count);
        };
    }
    return sys;
}

MapSystem conjugated_return_system(const finsler::FinslerModel& model, double tol) {
    MapSystem sys;
    sys.step = [&model, tol](const CylinderPoint& p) {
        return std::pair{geodesics::conjugated_return_map(model, p, tol),
                         geodesics::conjugated_return_map_jacobian(model, p, tol)};
    };
    return sys;
}

double ftle(const MapSystem& map, const CylinderPoint& p, int n_iter) {
    if (n_iter < 1) throw std::invalid_argument("ftle: n_iter must be >= 1");
    CylinderPoint q = p;
    Mat2 M = Mat2::identity();
    double log_acc = 0.0;
    for (int k = 0; k < n_iter; ++k) {
        auto [qn, J] = map.step(q);
        q = qn;
        M = J * M;
        double s = M.norm2();
        double inv = 1.0 / s;
        M.a11 *= inv;
        M.a12 *= inv;
        M.a21 *= inv;
        M.a22 *= inv;
        log_acc += std::log(s);
    }
    return log_acc / n_iter;
}

double FTLEField::max_value() const {
    double m = -1e300;
    for (double v : values) m = std::fmax(m, v);
    return m;
}

namespace {

void check_grid(const GridSpec& grid) {
    if (grid.nx < 2 || grid.ny < 2)
        throw std::invalid_argument("ftle_field: grid resolutions must be >= 2");
}

}  // namespace

FTLEField ftle_field_serial(const MapSystem& map, const GridSpec& grid, int n_iter,
                            double threshold) {
    check_grid(grid);
    FTLEField field{grid, n_iter, threshold, {}};
    field.values.resize(static_cast<std::size_t>(grid.nx) * grid.ny);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            field.values[static_cast<std::size_t>(j) * grid.nx + i] =
                ftle(map, {grid.cx(i), grid.cy(j)}, n_iter);
    return field;
}

FTLEField ftle_field(const MapSystem& map, const GridSpec& grid, int n_iter, double threshold) {
    check_grid(grid);
    FTLEField field{grid, n_iter, threshold, {}};
    const std::size_t total = static_cast<std::size_t>(grid.nx) * grid.ny;
    field.values.resize(total);
    const std::int64_t n_blocks = (static_cast<std::int64_t>(total) + kLanes - 1) / kLanes;

#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t blk = 0; blk < n_blocks; ++blk) {
        std::size_t base = static_cast<std::size_t>(blk) * kLanes;
        int count = static_cast<int>(std::min<std::size_t>(kLanes, total - base));

        if (!map.block_step) {
            for (int l = 0; l < count; ++l) {
                std::size_t c = base + l;
                int i = static_cast<int>(c % grid.nx), j = static_cast<int>(c / grid.nx);
                field.values[c] = ftle(map, {grid.cx(i), grid.cy(j)}, n_iter);
            }
            continue;
        }

        alignas(64) double x[kLanes], y[kLanes];
        double logs[kLanes];
        Mat2 J[kLanes], M[kLanes];
        for (int l = 0; l < count; ++l) {
            std::size_t c = base + l;
            int i = static_cast<int>(c % grid.nx), j = static_cast<int>(c / grid.nx);
            x[l] = grid.cx(i);
            y[l] = grid.cy(j);
            M[l] = Mat2::identity();
            logs[l] = 0.0;
        }
        for (int l = count; l < kLanes; ++l) {  // deterministic padding lanes
            x[l] = 0.25;
            y[l] = 0.0;
        }
        for (int k = 0; k < n_iter; ++k) {
            map.block_step(x, y, J, count);
            for (int l = 0; l < count; ++l) {
                M[l] = J[l] * M[l];
                double s = M[l].norm2();
                double inv = 1.0 / s;
                M[l].a11 *= inv;
                M[l].a12 *= inv;
                M[l].a21 *= inv;
                M[l].a22 *= inv;
                logs[l] += std::log(s);
            }
        }
        for (int l = 0; l < count; ++l) field.values[base + l] = logs[l] / n_iter;
    }
    return field;
}

double island_area(const FTLEField& field, double threshold) {
    std::size_t count = 0;
    for (double v : field.values) count += v > threshold ? 1 : 0;
    return static_cast<double>(count) * field.grid.cell_area();
}

double island_area(const FTLEField& field) { return island_area(field, field.threshold); }

double metric_entropy_estimate(const FTLEField& field) {
    double acc = 0.0;
    for (double v : field.values) acc += std::fmax(v, 0.0);
    return acc * field.grid.cell_area();
}

KamReport kam_circles(const MapSystem& map, double y_lo, double y_hi, int n_samples, int n_iter,
                      double oscillation_threshold, double fill_threshold) {
    if (n_iter < 1000) throw std::invalid_argument("kam_circles: n_iter must be >= 1000");
    KamReport report;
    report.samples.reserve(n_samples);
    const double golden = 0.61803398874989485;
    int n_like = 0;
    for (int k = 0; k < n_samples; ++k) {
        double y0 = y_lo + (y_hi - y_lo) * (k + golden) / n_samples;
        CylinderPoint p{0.0, y0};
        std::vector<double> xs;
        xs.reserve(n_iter);
        double osc = 0.0;
        for (int it = 0; it < n_iter; ++it) {
            p = map.step(p).first;
            osc = std::fmax(osc, std::fabs(p.y - y0));
            xs.push_back(p.x);
        }
        std::sort(xs.begin(), xs.end());
        double gap = 1.0 - xs.back() + xs.front();  // wraparound gap
        for (std::size_t i = 1; i < xs.size(); ++i) gap = std::fmax(gap, xs[i] - xs[i - 1]);
        bool like = osc < oscillation_threshold && gap < fill_threshold;
        n_like += like ? 1 : 0;
        report.samples.push_back({y0, osc, gap, like});
    }
    report.circle_like_fraction = static_cast<double>(n_like) / n_samples;
    return report;
}

double orbit_divergence_exponent(const MapSystem& map, const CylinderPoint& p, int n_iter,
                                 double separation) {
    CylinderPoint a = p;
    CylinderPoint b{fastmath::mod1(p.x + separation * 0.70710678118654752),
                    p.y + separation * 0.70710678118654752};
    double acc = 0.0;
    for (int k = 0; k < n_iter; ++k) {
        a = map.step(a).first;
        b = map.step(b).first;
        double dx = b.x - a.x;
        dx -= std::nearbyint(dx);  // circle distance
        double dy = b.y - a.y;
        double dist = std::sqrt(dx * dx + dy * dy);
        acc += std::log(dist / separation);
        // renormalize b back to distance `separation` from a
        double scale = separation / dist;
        b.x = fastmath::mod1(a.x + dx * scale);
        b.y = a.y + dy * scale;
    }
    return acc / n_iter;
}

std::string field_to_csv(const FTLEField& field) {
    std::ostringstream os;
    os.precision(17);
    os << "x,y,ftle\n";
    for (int j = 0; j < field.grid.ny; ++j)
        for (int i = 0; i < field.grid.nx; ++i)
            os << field.grid.cx(i) << "," << field.grid.cy(j) << "," << field.value(i, j) << "\n";
    return os.str();
}

void field_to_binary(const FTLEField& field, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "binary field format is little-endian");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("field_to_binary: cannot open " + path);
    const char magic[8] = {'F', 'T', 'L', 'E', 'F', 'L', 'D', '1'};
    f.write(magic, 8);
    auto wd = [&](double v) { f.write(reinterpret_cast<const char*>(&v), 8); };
    auto wu32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
    wd(field.grid.x0);
    wd(field.grid.x1);
    wd(field.grid.y0);
    wd(field.grid.y1);
    wu32(static_cast<std::uint32_t>(field.grid.nx));
    wu32(static_cast<std::uint32_t>(field.grid.ny));
    std::uint64_t n = static_cast<std::uint64_t>(field.n_iter);
    f.write(reinterpret_cast<const char*>(&n), 8);
    wd(field.threshold);
    f.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * 8));
}

FTLEField field_from_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("field_from_binary: cannot open " + path);
    char magic[8];
    f.read(magic, 8);
    if (std::memcmp(magic, "FTLEFLD1", 8) != 0)
        throw std::runtime_error("field_from_binary: bad magic in " + path);
    FTLEField field;
    auto rd = [&](double& v) { f.read(reinterpret_cast<char*>(&v), 8); };
    std::uint32_t nx, ny;
    rd(field.grid.x0);
    rd(field.grid.x1);
    rd(field.grid.y0);
    rd(field.grid.y1);
    f.read(reinterpret_cast<char*>(&nx), 4);
    f.read(reinterpret_cast<char*>(&ny), 4);
    field.grid.nx = static_cast<int>(nx);
    field.grid.ny = static_cast<int>(ny);
    std::uint64_t n;
    f.read(reinterpret_cast<char*>(&n), 8);
    field.n_iter = static_cast<int>(n);
    rd(field.threshold);
    field.values.resize(static_cast<std::size_t>(nx) * ny);
    f.read(reinterpret_cast<char*>(field.values.data()),
           static_cast<std::streamsize>(field.values.size() * 8));
    if (!f) throw std::runtime_error("field_from_binary: truncated file " + path);
    return field;
}

}  // namespace twistflow::chaos
