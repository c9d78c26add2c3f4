#include "twistflow/experiments.hpp"

#include "twistflow/chaos.hpp"
#include "twistflow/cylinder.hpp"
#include "twistflow/fastmath.hpp"
#include "twistflow/finsler.hpp"
#include "twistflow/geodesics.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace twistflow::experiments {

using nlohmann::json;

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"flat-check", "conjugacy", "ftle-field",
                                                   "island-area", "kam-scan", "portrait",
                                                   "cr-distance"};
    return names;
}

ExperimentConfig ExperimentConfig::defaults_for(const std::string& experiment) {
    ExperimentConfig c;
    if (experiment == "flat-check") {
        c.epsilon = 0.0;
    } else if (experiment == "conjugacy") {
        c.epsilon = 0.3;
        c.grid = GridSpec{0.0, 1.0, -c.band_K, c.band_K, 32, 32};
    } else if (experiment == "ftle-field" || experiment == "island-area") {
        c.epsilon = 1.2;
        c.grid = GridSpec{0.0, 1.0, -0.5, 0.5, 256, 256};
        c.integrator = suspension::IntegratorProfile::fast();
    } else if (experiment == "kam-scan") {
        c.epsilon = 0.05;
        c.n_samples = 50;
        c.grid.y0 = -1.0;
        c.grid.y1 = 1.0;
    } else if (experiment == "portrait") {
        c.epsilon = 1.2;
        c.n_samples = 64;
        c.n_iter = 2000;
        c.grid = GridSpec{0.0, 1.0, -0.5, 0.5, 1, 1};
        c.integrator = suspension::IntegratorProfile::fast();
    } else if (experiment == "cr-distance") {
        c.epsilon = 0.1;
    } else {
        throw std::invalid_argument("unknown experiment '" + experiment + "'");
    }
    return c;
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["epsilon"] = c.epsilon;
    j["band_K"] = c.band_K;
    if (c.A) j["A"] = *c.A;
    if (c.B) j["B"] = *c.B;
    j["grid"] = {{"x0", c.grid.x0}, {"x1", c.grid.x1}, {"y0", c.grid.y0},
                 {"y1", c.grid.y1}, {"nx", c.grid.nx}, {"ny", c.grid.ny}};
    j["n_iter"] = c.n_iter;
    j["n_samples"] = c.n_samples;
    j["threshold"] = c.threshold;
    j["integrator_tol"] = c.integrator_tol;
    j["el_tol"] = c.el_tol;
    j["integrator"] = {{"order", c.integrator.order},
                       {"step", c.integrator.step},
                       {"newton_iters", c.integrator.newton_iters},
                       {"richardson", c.integrator.richardson}};
    j["map"] = c.map;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    return j;
}

void config_from_json(ExperimentConfig& c, const json& j) {
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("band_K")) c.band_K = j["band_K"].get<double>();
    if (j.contains("A")) c.A = j["A"].get<double>();
    if (j.contains("B")) c.B = j["B"].get<double>();
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.contains("x0")) c.grid.x0 = g["x0"].get<double>();
        if (g.contains("x1")) c.grid.x1 = g["x1"].get<double>();
        if (g.contains("y0")) c.grid.y0 = g["y0"].get<double>();
        if (g.contains("y1")) c.grid.y1 = g["y1"].get<double>();
        if (g.contains("nx")) c.grid.nx = g["nx"].get<int>();
        if (g.contains("ny")) c.grid.ny = g["ny"].get<int>();
    }
    if (j.contains("n_iter")) c.n_iter = j["n_iter"].get<int>();
    if (j.contains("n_samples")) c.n_samples = j["n_samples"].get<int>();
    if (j.contains("threshold")) c.threshold = j["threshold"].get<double>();
    if (j.contains("integrator_tol")) c.integrator_tol = j["integrator_tol"].get<double>();
    if (j.contains("el_tol")) c.el_tol = j["el_tol"].get<double>();
    if (j.contains("integrator")) {
        const json& g = j["integrator"];
        if (g.contains("order")) c.integrator.order = g["order"].get<int>();
        if (g.contains("step")) c.integrator.step = g["step"].get<double>();
        if (g.contains("newton_iters")) c.integrator.newton_iters = g["newton_iters"].get<int>();
        if (g.contains("richardson")) c.integrator.richardson = g["richardson"].get<bool>();
    }
    if (j.contains("map")) c.map = j["map"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& experiment,
                                                  const std::string& path) {
    ExperimentConfig c = defaults_for(experiment);
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config file not found: " + path);
    json j = json::parse(f);
    config_from_json(c, j);
    return c;
}

void ExperimentConfig::apply_override(const std::string& key, const std::string& value) {
    json j = config_to_json(*this);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // plain string
    }
    json* node = &j;
    std::size_t pos = 0;
    std::string k = key;
    while ((pos = k.find('.')) != std::string::npos) {
        node = &(*node)[k.substr(0, pos)];
        k = k.substr(pos + 1);
    }
    (*node)[k] = parsed;
    config_from_json(*this, j);
}

std::string ExperimentConfig::to_json() const { return config_to_json(*this).dump(2); }

// --- pipelines -------------------------------------------------------------

namespace {

struct Pipeline {
    const ExperimentConfig& cfg;
    json metrics;
    std::vector<Assertion> assertions;

    void assert_le(const std::string& name, double value, double limit) {
        assertions.push_back({name, value, limit, value <= limit});
    }
    void assert_ge(const std::string& name, double value, double limit) {
        assertions.push_back({name, value, limit, value >= limit});
    }
};

double circle_dist(double a, double b) {
    double d = std::fabs(a - b);
    return std::fmin(d, 1.0 - d);
}

finsler::FinslerModel build_model(const ExperimentConfig& cfg) {
    auto spec = suspension::SuspensionSpec::create(cfg.epsilon, cfg.band_K, cfg.integrator_tol);
    finsler::ProfileConstants pc = finsler::solve_profile_constants(spec.lagrangian_D);
    if (cfg.A) pc.A = *cfg.A;
    if (cfg.B) pc.B = *cfg.B;
    return finsler::FinslerModel::create_with(std::move(spec), pc, cfg.integrator);
}

chaos::MapSystem build_map(const ExperimentConfig& cfg, const finsler::FinslerModel* model) {
    if (cfg.map == "shear") return chaos::shear_system();
    if (cfg.map == "return") {
        if (!model) throw std::invalid_argument("return map requires a model");
        return chaos::conjugated_return_system(*model, cfg.el_tol);
    }
    if (cfg.map == "twist")
        return chaos::twist_system(cylinder::TwistMapSpec::create(
            cfg.epsilon, cfg.band_K, cfg.integrator_tol, cfg.integrator));
    throw std::invalid_argument("unknown map '" + cfg.map + "'");
}

void run_flat_check(Pipeline& p) {
    auto model = build_model(p.cfg);
    auto tw = cylinder::TwistMapSpec::from_suspension(model.spec(), p.cfg.integrator);
    Rng rng(p.cfg.seed);
    double K = p.cfg.band_K;
    double worst = 0.0;
    for (int i = 0; i < p.cfg.n_samples; ++i) {
        CylinderPoint pt{rng.uniform(), rng.uniform(-K - 1.0, K + 1.0)};
        auto s = geodesics::conjugacy_g_inverse(model, pt);
        auto img = geodesics::conjugacy_g(geodesics::return_map(model, s));
        auto ref = cylinder::twist_apply(tw, pt);
        worst = std::fmax(worst,
                          std::fmax(circle_dist(img.x, ref.x), std::fabs(img.y - ref.y)));
    }
    p.metrics["max_conjugacy_residual"] = worst;
    p.assert_le("max_conjugacy_residual", worst, p.cfg.epsilon == 0.0 ? 1e-8 : 1e-6);
}

void run_conjugacy(Pipeline& p, const std::string& out_dir) {
    auto model = build_model(p.cfg);
    auto tw = cylinder::TwistMapSpec::from_suspension(model.spec(), p.cfg.integrator);
    const GridSpec& g = p.cfg.grid;
    std::vector<double> resid(static_cast<std::size_t>(g.nx) * g.ny);
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            CylinderPoint pt{g.cx(i), g.cy(j)};
            auto img = geodesics::conjugated_return_map(model, pt, p.cfg.el_tol);
            auto ref = cylinder::twist_apply(tw, pt);
            resid[static_cast<std::size_t>(j) * g.nx + i] =
                std::fmax(circle_dist(img.x, ref.x), std::fabs(img.y - ref.y));
        }
    double worst = 0.0;
    for (double r : resid) worst = std::fmax(worst, r);
    p.metrics["max_conjugacy_residual"] = worst;
    p.assert_le("max_conjugacy_residual", worst, 1e-6);

    std::ofstream f(out_dir + "/residuals.csv");
    f.precision(17);
    f << "x,y,residual\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            f << g.cx(i) << "," << g.cy(j) << ","
              << resid[static_cast<std::size_t>(j) * g.nx + i] << "\n";
}

void run_ftle_field(Pipeline& p, const std::string& out_dir, bool island_assertions) {
    std::optional<finsler::FinslerModel> model;
    if (p.cfg.map == "return") model.emplace(build_model(p.cfg));
    auto map = build_map(p.cfg, model ? &*model : nullptr);
    auto field = chaos::ftle_field(map, p.cfg.grid, p.cfg.n_iter, p.cfg.threshold);
    double domain = (p.cfg.grid.x1 - p.cfg.grid.x0) * (p.cfg.grid.y1 - p.cfg.grid.y0);
    double area = chaos::island_area(field);
    double entropy = chaos::metric_entropy_estimate(field);
    p.metrics["island_area"] = area;
    p.metrics["island_fraction"] = area / domain;
    p.metrics["metric_entropy_estimate"] = entropy;
    p.metrics["max_ftle"] = field.max_value();
    if (island_assertions) {
        p.assert_ge("island_fraction", area / domain, 0.05);
        p.assert_ge("metric_entropy_estimate", entropy, 1e-12);
    }
    std::ofstream f(out_dir + "/field.csv");
    f << chaos::field_to_csv(field);
    chaos::field_to_binary(field, out_dir + "/field.bin");
}

void run_kam_scan(Pipeline& p) {
    auto map = build_map(p.cfg, nullptr);
    auto report = chaos::kam_circles(map, p.cfg.grid.y0, p.cfg.grid.y1, p.cfg.n_samples,
                                     p.cfg.n_iter, p.cfg.threshold, p.cfg.threshold);
    p.metrics["circle_like_fraction"] = report.circle_like_fraction;
    json rows = json::array();
    for (const auto& s : report.samples)
        rows.push_back({{"y0", s.y0},
                        {"oscillation", s.oscillation},
                        {"x_fill_gap", s.x_fill_gap},
                        {"circle_like", s.circle_like}});
    p.metrics["samples"] = rows;
    p.assert_ge("circle_like_fraction", report.circle_like_fraction, 0.9);
}

void run_portrait(Pipeline& p, const std::string& out_dir) {
    auto map = build_map(p.cfg, nullptr);
    Rng rng(p.cfg.seed);
    std::ofstream f(out_dir + "/trajectories.csv");
    f.precision(17);
    f << "seed_index,iterate,x,y\n";
    for (int s = 0; s < p.cfg.n_samples; ++s) {
        CylinderPoint pt{rng.uniform(p.cfg.grid.x0, p.cfg.grid.x1),
                         rng.uniform(p.cfg.grid.y0, p.cfg.grid.y1)};
        for (int k = 0; k < p.cfg.n_iter; ++k) {
            pt = map.step(pt).first;
            f << s << "," << k << "," << pt.x << "," << pt.y << "\n";
        }
    }
    p.metrics["orbits"] = p.cfg.n_samples;
    p.metrics["iterates_per_orbit"] = p.cfg.n_iter;
}

void run_cr_distance(Pipeline& p) {
    auto model_full = build_model(p.cfg);
    double d_full = finsler::cr_distance(model_full, 1);
    ExperimentConfig half = p.cfg;
    half.epsilon = 0.5 * p.cfg.epsilon;
    auto model_half = build_model(half);
    double d_half = finsler::cr_distance(model_half, 1);
    p.metrics["cr1_distance"] = d_full;
    p.metrics["cr1_distance_half_epsilon"] = d_half;
    p.metrics["ratio"] = d_full > 0.0 ? d_half / d_full : 0.0;
    if (p.cfg.epsilon > 0.0) p.assert_le("half_epsilon_ratio", d_half / d_full, 0.6);
}

}  // namespace

ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    if (config.n_iter < 1 || config.n_samples < 1 || config.integrator_tol <= 0.0 ||
        config.el_tol <= 0.0 || config.threshold < 0.0)
        throw std::invalid_argument("invalid configuration");
    std::filesystem::create_directories(config.out_dir);

    Pipeline p{config, json::object(), {}};
    if (name == "flat-check") {
        run_flat_check(p);
    } else if (name == "conjugacy") {
        run_conjugacy(p, config.out_dir);
    } else if (name == "ftle-field") {
        run_ftle_field(p, config.out_dir, false);
    } else if (name == "island-area") {
        run_ftle_field(p, config.out_dir, true);
    } else if (name == "kam-scan") {
        run_kam_scan(p);
    } else if (name == "portrait") {
        run_portrait(p, config.out_dir);
    } else if (name == "cr-distance") {
        run_cr_distance(p);
    } else {
        throw std::invalid_argument("unknown experiment '" + name + "'");
    }

    ExperimentResult result;
    result.experiment = name;
    result.assertions = p.assertions;
    result.pass = true;
    for (const auto& a : p.assertions) result.pass &= a.pass;

    json report;
    report["experiment"] = name;
    report["config"] = json::parse(config.to_json());
    report["metrics"] = p.metrics;
    json asserts = json::array();
    for (const auto& a : p.assertions)
        asserts.push_back({{"name", a.name}, {"value", a.value}, {"limit", a.limit},
                           {"pass", a.pass}});
    report["assertions"] = asserts;
    report["pass"] = result.pass;
    result.report_json = report.dump(2);

    std::ofstream f(config.out_dir + "/report.json");
    f << result.report_json << "\n";

    auto t1 = std::chrono::steady_clock::now();
    result.seconds = std::chrono::duration<double>(t1 - t0).count();
    return result;
}

}  // namespace twistflow::experiments
