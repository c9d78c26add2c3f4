// Benchmark: serial reference FTLE sweep vs the OpenMP lockstep kernel.
#include "twistflow/chaos.hpp"
#include "twistflow/cylinder.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace twistflow;

int main(int argc, char** argv) {
    int n = 64, iters = 200;
    double eps = 1.2;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--grid")) n = std::atoi(argv[i + 1]);
        if (!std::strcmp(argv[i], "--iters")) iters = std::atoi(argv[i + 1]);
        if (!std::strcmp(argv[i], "--eps")) eps = std::atof(argv[i + 1]);
    }
    auto spec = cylinder::TwistMapSpec::create(eps, 12.0, 1e-9,
                                               suspension::IntegratorProfile::fast());
    auto map = chaos::twist_system(spec);
    GridSpec grid{0.0, 1.0, -0.5, 0.5, n, n};

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("grid %dx%d, %d iterations, eps=%.3g\n", n, n, iters, eps);

    auto t0 = std::chrono::steady_clock::now();
    auto serial = chaos::ftle_field_serial(map, grid, iters);
    auto t1 = std::chrono::steady_clock::now();
    auto parallel = chaos::ftle_field(map, grid, iters);
    auto t2 = std::chrono::steady_clock::now();

    double ts = std::chrono::duration<double>(t1 - t0).count();
    double tp = std::chrono::duration<double>(t2 - t1).count();
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < serial.values.size(); ++i)
        mismatches += serial.values[i] != parallel.values[i] ? 1 : 0;

    std::printf("serial reference: %8.3f s  (%.1f ns/cell/iter)\n", ts,
                1e9 * ts / (double(n) * n * iters));
    std::printf("lockstep kernel : %8.3f s  (%.1f ns/cell/iter)\n", tp,
                1e9 * tp / (double(n) * n * iters));
    std::printf("speedup: %.2fx, bitwise mismatches: %zu\n", ts / tp, mismatches);
    return mismatches == 0 ? 0 : 1;
}
