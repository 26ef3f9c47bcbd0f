// Compares the OpenMP kernels against their serial reference paths:
// record reduction (summarize) and the Monte Carlo study loop.

#include <chrono>
#include <cstdio>

#include "truncens/estimator.hpp"
#include "truncens/simulator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP: disabled\n");
#endif

    const truncens::StudyWindow w{2, 10};
    const truncens::SimConfig cfg{0.3, w, 2'000'000, 42};
    const truncens::Sample sample = truncens::simulate_sample(cfg);
    std::printf("dataset: %zu records\n", sample.records.size());

    auto t0 = Clock::now();
    const auto serial = truncens::summarize_serial(sample.records, w);
    const double t_serial = seconds_since(t0);

    t0 = Clock::now();
    const auto parallel = truncens::summarize(sample.records, w);
    const double t_parallel = seconds_since(t0);

    std::printf("summarize serial   %.4f s\n", t_serial);
    std::printf("summarize parallel %.4f s  (speedup %.2fx)\n", t_parallel,
                t_serial / t_parallel);
    if (serial.mean_y != parallel.mean_y || serial.m != parallel.m) {
        std::printf("MISMATCH between serial and parallel reductions\n");
        return 1;
    }

    const truncens::SimConfig study_cfg{0.3, w, 20'000, 7};
    t0 = Clock::now();
    const auto rep_serial = truncens::mc_study_serial(study_cfg, 100, 0.95);
    const double s_serial = seconds_since(t0);

    t0 = Clock::now();
    const auto rep_parallel = truncens::mc_study(study_cfg, 100, 0.95);
    const double s_parallel = seconds_since(t0);

    std::printf("mc_study serial   %.4f s\n", s_serial);
    std::printf("mc_study parallel %.4f s  (speedup %.2fx)\n", s_parallel,
                s_serial / s_parallel);
    if (rep_serial.mean_theta != rep_parallel.mean_theta) {
        std::printf("MISMATCH between serial and parallel studies\n");
        return 1;
    }
    return 0;
}
