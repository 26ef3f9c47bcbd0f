#include "truncens/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace truncens {

namespace {

std::uint64_t splitmix_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Uniform draw on the open interval (0, 1).
double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

LatentUnit draw_unit(const SimConfig& cfg, std::uint64_t index) {
    std::uint64_t state = derive_stream(cfg.seed, index);
    const double ux = to_open_unit(splitmix_next(state));
    const double ut = to_open_unit(splitmix_next(state));
    LatentUnit u;
    u.x = -std::log(ux) / cfg.theta0;           // inverse CDF of Exp(theta0)
    u.t = -cfg.window.s + cfg.window.G * ut;    // Unif([-s, G-s])
    return u;
}

void validate(const SimConfig& cfg) {
    if (!(cfg.theta0 > 0.0)) throw std::invalid_argument("SimConfig: theta0 must be positive");
    if (cfg.n < 1) throw std::invalid_argument("SimConfig: n must be at least 1");
}

}  // namespace

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ (index * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull);
    return splitmix_next(state);
}

std::vector<LatentUnit> draw_latent(const SimConfig& cfg) {
    validate(cfg);
    std::vector<LatentUnit> units(cfg.n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(cfg.n); ++i) {
        units[i] = draw_unit(cfg, static_cast<std::uint64_t>(i));
    }
    return units;
}

std::optional<ObservedTriple> reduce(const LatentUnit& u, const StudyWindow& w) {
    ObservedTriple t;
    t.l = u.t > 0.0 ? 1 : 0;
    t.r = u.t + w.s < u.x ? 1 : 0;
    if (t.l == 1 && t.r == 1) return std::nullopt;
    if (t.l == 1) {
        t.y = u.x - u.t;
        if (t.y < 0.0) return std::nullopt;
    } else if (t.r == 0) {
        t.y = u.x;
    } else {
        t.y = u.t + w.s;
    }
    return t;
}

Sample simulate_sample(const SimConfig& cfg) {
    validate(cfg);
    Sample sample;
    sample.n_latent = cfg.n;
    sample.records.reserve(cfg.n);
    for (std::uint64_t i = 0; i < cfg.n; ++i) {
        if (auto t = reduce(draw_unit(cfg, i), cfg.window)) {
            sample.records.push_back({*t, 1.0});
        }
    }
    sample.m_observed = sample.records.size();
    if (sample.m_observed == 0) {
        throw std::runtime_error("simulate_sample: no unit was observable");
    }
    return sample;
}

SampleStats simulate_stats(const SimConfig& cfg) {
    validate(cfg);
    // Plain sums suffice here: each replication is refit from scratch, so
    // the compensated path is only needed for the record-based API.
    std::array<CellSums, 3> cells{};
    std::size_t m_observed = 0;
    for (std::uint64_t i = 0; i < cfg.n; ++i) {
        if (auto t = reduce(draw_unit(cfg, i), cfg.window)) {
            CellSums& c = cells[cell_index(*t)];
            c.w += 1.0;
            c.wy += t->y;
            c.wyy += t->y * t->y;
            ++m_observed;
        }
    }
    if (m_observed == 0) {
        throw std::runtime_error("simulate_stats: no unit was observable");
    }
    SampleStats out;
    out.n_latent = cfg.n;
    out.m_observed = m_observed;
    out.stats.cells = cells;
    out.stats.m = cells[0].w + cells[1].w + cells[2].w;
    out.stats.mean_y = (cells[0].wy + cells[1].wy + cells[2].wy) / out.stats.m;
    out.stats.mean_l = cells[2].w / out.stats.m;
    out.stats.mean_unc = cells[0].w / out.stats.m;
    return out;
}

namespace {

StudyReport run_study(const SimConfig& cfg, std::size_t replications, double level,
                      bool parallel) {
    if (replications < 2) {
        throw std::invalid_argument("mc_study: need at least 2 replications");
    }
    const double z = normal_quantile_two_sided(level);

    StudyReport report;
    report.theta0 = cfg.theta0;
    report.level = level;
    report.replications = replications;

    std::vector<double> theta(replications), se(replications);
    std::vector<char> ok(replications, 0), covered(replications, 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(replications); ++k) {
        SimConfig rep_cfg = cfg;
        rep_cfg.seed = derive_stream(cfg.seed, static_cast<std::uint64_t>(k)) + 1;
        try {
            const SampleStats ss = simulate_stats(rep_cfg);
            const FitResult fit = fit_mle(ss.stats, cfg.window);
            theta[k] = fit.theta_hat;
            se[k] = fit.se;
            covered[k] = std::abs(fit.theta_hat - cfg.theta0) <= z * fit.se ? 1 : 0;
            ok[k] = 1;
        } catch (const std::exception&) {
            ok[k] = 0;
        }
    }

    // Order-independent reduction: replications are merged by index.
    std::size_t good = 0;
    double sum_t = 0.0, sum_se = 0.0, sum_cov = 0.0;
    for (std::size_t k = 0; k < replications; ++k) {
        if (!ok[k]) continue;
        ++good;
        sum_t += theta[k];
        sum_se += se[k];
        sum_cov += covered[k];
    }
    report.failures = replications - good;
    if (good < 2) {
        throw std::runtime_error("mc_study: fewer than 2 replications succeeded");
    }
    report.mean_theta = sum_t / good;
    report.mean_se = sum_se / good;
    report.coverage = sum_cov / good;

    double ssq = 0.0;
    for (std::size_t k = 0; k < replications; ++k) {
        if (!ok[k]) continue;
        const double d = theta[k] - report.mean_theta;
        ssq += d * d;
    }
    report.sd_theta = std::sqrt(ssq / (good - 1));

    report.standardized.reserve(good);
    for (std::size_t k = 0; k < replications; ++k) {
        if (ok[k]) report.standardized.push_back((theta[k] - cfg.theta0) / se[k]);
    }
    return report;
}

}  // namespace

StudyReport mc_study(const SimConfig& cfg, std::size_t replications, double level) {
    return run_study(cfg, replications, level, true);
}

StudyReport mc_study_serial(const SimConfig& cfg, std::size_t replications, double level) {
    return run_study(cfg, replications, level, false);
}

}  // namespace truncens
