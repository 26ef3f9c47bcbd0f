#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "truncens/estimator.hpp"
#include "truncens/model.hpp"

namespace truncens {

// One latent pair before truncation and censoring: lifespan x and age t
// at study begin.
struct LatentUnit {
    double x = 0.0;
    double t = 0.0;
};

struct SimConfig {
    double theta0;
    StudyWindow window;
    std::size_t n;
    std::uint64_t seed;
};

// Seed-stream derivation: the generator state of unit i in the sample
// with seed z is splitmix(z, i); replication k of a study reruns with
// seed splitmix(z, k) + 1.  Both are pure functions, so units and
// replications can be produced in any order or in parallel with
// bit-identical results.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

// n latent pairs: x by inverse-CDF exponential sampling, t uniform on
// [-s, G-s].  Bit-reproducible for a fixed seed.
std::vector<LatentUnit> draw_latent(const SimConfig& cfg);

// Map a latent pair to its observable triple, or nothing when the unit
// is truncated away: (l,r) = (1,1), or (l,r) = (1,0) with y < 0.
std::optional<ObservedTriple> reduce(const LatentUnit& u, const StudyWindow& w);

struct Sample {
    std::vector<ObservedRecord> records;
    std::size_t n_latent = 0;
    std::size_t m_observed = 0;
};

// Unit-weight records for every observable unit.  Throws if no unit is
// observable.
Sample simulate_sample(const SimConfig& cfg);

// Streaming variant: reduces straight to sufficient statistics without
// materializing the record vector.
struct SampleStats {
    SufficientStats stats;
    std::size_t n_latent = 0;
    std::size_t m_observed = 0;
};
SampleStats simulate_stats(const SimConfig& cfg);

struct StudyReport {
    double theta0 = 0.0;
    double level = 0.0;
    std::size_t replications = 0;
    std::size_t failures = 0;
    double mean_theta = 0.0;
    double sd_theta = 0.0;
    double mean_se = 0.0;
    double coverage = 0.0;
    std::vector<double> standardized;  // (theta_hat - theta0) / se per replication
};

// Monte Carlo study of the estimator: per-replication fit, bias and
// spread of theta_hat, mean reported SE and empirical CI coverage.
// Replications run in parallel; failed fits are counted, not fatal.
StudyReport mc_study(const SimConfig& cfg, std::size_t replications, double level);
StudyReport mc_study_serial(const SimConfig& cfg, std::size_t replications, double level);

}  // namespace truncens
