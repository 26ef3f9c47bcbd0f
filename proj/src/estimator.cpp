#include "truncens/estimator.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace truncens {

namespace {

constexpr std::size_t kChunk = 8192;

// Neumaier-compensated accumulator.
struct Kahan {
    double sum = 0.0;
    double c = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + c; }
};

struct CellAccum {
    std::array<Kahan, 3> w, wy, wyy;

    void add(int cell, double weight, double y) {
        w[cell].add(weight);
        wy[cell].add(weight * y);
        wyy[cell].add(weight * y * y);
    }
};

SufficientStats finalize(const CellAccum& acc) {
    SufficientStats stats;
    Kahan m, my;
    for (int c = 0; c < 3; ++c) {
        stats.cells[c].w = acc.w[c].value();
        stats.cells[c].wy = acc.wy[c].value();
        stats.cells[c].wyy = acc.wyy[c].value();
        m.add(stats.cells[c].w);
        my.add(stats.cells[c].wy);
    }
    stats.m = m.value();
    if (!(stats.m > 0.0)) {
        throw std::invalid_argument("summarize: total weight must be positive");
    }
    stats.mean_y = my.value() / stats.m;
    stats.mean_l = stats.cells[2].w / stats.m;
    stats.mean_unc = stats.cells[0].w / stats.m;
    return stats;
}

void validate_record(const ObservedRecord& rec, const StudyWindow& w, std::size_t idx) {
    if (!(rec.weight >= 0.0)) {
        throw std::invalid_argument("summarize: negative weight at record " +
                                    std::to_string(idx));
    }
    if (rec.weight == 0.0) return;
    if (!in_support(rec.triple, w)) {
        throw std::invalid_argument(
            "summarize: record " + std::to_string(idx) + " (y=" +
            std::to_string(rec.triple.y) + ", l=" + std::to_string(rec.triple.l) +
            ", r=" + std::to_string(rec.triple.r) + ") lies outside the support");
    }
}

}  // namespace

SufficientStats summarize_serial(std::span<const ObservedRecord> records,
                                 const StudyWindow& w) {
    if (records.empty()) {
        throw std::invalid_argument("summarize: no records");
    }
    CellAccum acc;
    for (std::size_t i = 0; i < records.size(); ++i) {
        validate_record(records[i], w, i);
        if (records[i].weight == 0.0) continue;
        acc.add(cell_index(records[i].triple), records[i].weight, records[i].triple.y);
    }
    return finalize(acc);
}

SufficientStats summarize(std::span<const ObservedRecord> records, const StudyWindow& w) {
    if (records.empty()) {
        throw std::invalid_argument("summarize: no records");
    }
    const std::size_t n_chunks = (records.size() + kChunk - 1) / kChunk;
    std::vector<CellAccum> partial(n_chunks);
    std::size_t bad_index = records.size();

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(n_chunks); ++ci) {
        const std::size_t lo = static_cast<std::size_t>(ci) * kChunk;
        const std::size_t hi = std::min(lo + kChunk, records.size());
        for (std::size_t i = lo; i < hi; ++i) {
            const ObservedRecord& rec = records[i];
            if (!(rec.weight >= 0.0) ||
                (rec.weight > 0.0 && !in_support(rec.triple, w))) {
#ifdef _OPENMP
#pragma omp critical
#endif
                bad_index = std::min(bad_index, i);
                continue;
            }
            if (rec.weight == 0.0) continue;
            partial[ci].add(cell_index(rec.triple), rec.weight, rec.triple.y);
        }
    }
    if (bad_index < records.size()) {
        validate_record(records[bad_index], w, bad_index);  // throws with details
    }

    // Chunk merge is sequential in index order, so the result does not
    // depend on the thread count.
    CellAccum total;
    for (const CellAccum& p : partial) {
        for (int c = 0; c < 3; ++c) {
            total.w[c].add(p.w[c].value());
            total.wy[c].add(p.wy[c].value());
            total.wyy[c].add(p.wyy[c].value());
        }
    }
    return finalize(total);
}

double profiled_objective(const SufficientStats& stats, double theta, const StudyWindow& w) {
    double v = -std::log(alpha(theta, w)) - theta * stats.mean_y;
    if (stats.mean_l > 0.0) v += k_log(theta, w) * stats.mean_l;
    if (stats.mean_unc > 0.0) v += std::log(theta) * stats.mean_unc;
    return v;
}

namespace {

// Bounded scalar maximization by Brent's parabolic-interpolation method
// on [a, b]; returns the maximizer, writes the attained value and the
// iteration count.
double brent_max(const SufficientStats& stats, const StudyWindow& w, double a, double b,
                 double tol, double& fmax, int& iterations) {
    const double gold = 0.3819660112501051;
    double x = a + gold * (b - a);
    double v = x, u = x;
    double fx = profiled_objective(stats, x, w);
    double fv = fx, fu = fx;
    double d = 0.0, e = 0.0;
    iterations = 0;
    for (int iter = 0; iter < 200; ++iter) {
        ++iterations;
        const double mid = 0.5 * (a + b);
        const double tol1 = tol + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x);
        if (std::abs(x - mid) <= 2.0 * tol1 - 0.5 * (b - a)) break;
        bool parabolic = false;
        if (std::abs(e) > tol1) {
            const double r = (x - u) * (fx - fv);
            double q = (x - v) * (fx - fu);
            double p = (x - v) * q - (x - u) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                const double cand = x + d;
                if (cand - a < 2.0 * tol1 || b - cand < 2.0 * tol1) {
                    d = (mid > x) ? tol1 : -tol1;
                }
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < mid) ? b - x : a - x;
            d = gold * e;
        }
        const double cand =
            (std::abs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
        const double fcand = profiled_objective(stats, cand, w);
        if (fcand >= fx) {
            if (cand < x) b = x; else a = x;
            u = v; fu = fv;
            v = x; fv = fx;
            x = cand; fx = fcand;
        } else {
            if (cand < x) a = cand; else b = cand;
            if (fcand >= fv || v == x) {
                u = v; fu = fv;
                v = cand; fv = fcand;
            } else if (fcand >= fu || u == x || u == v) {
                u = cand; fu = fcand;
            }
        }
    }
    fmax = fx;
    return x;
}

}  // namespace

FitResult fit_mle(const SufficientStats& stats, const StudyWindow& w,
                  const FitOptions& opts) {
    if (!(opts.tol > 0.0)) {
        throw std::invalid_argument("fit_mle: tol must be positive");
    }
    const double lo = opts.domain.lo();
    const double hi = opts.domain.hi();

    // Coarse log-grid scan; leftmost maximum wins ties.
    constexpr int kScan = 64;
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / (kScan - 1);
    std::array<double, kScan> grid, val;
    int best = 0;
    for (int i = 0; i < kScan; ++i) {
        grid[i] = std::exp(log_lo + i * step);
        val[i] = profiled_objective(stats, grid[i], w);
        if (!std::isfinite(val[i])) {
            throw std::runtime_error("fit_mle: objective non-finite at theta=" +
                                     std::to_string(grid[i]));
        }
        if (val[i] > val[best]) best = i;
    }

    const double a = grid[std::max(best - 1, 0)];
    const double b = grid[std::min(best + 1, kScan - 1)];

    FitResult res;
    res.theta_hat = brent_max(stats, w, a, b, opts.tol, res.objective_at_max,
                              res.iterations);
    res.converged = true;
    res.at_boundary = (res.theta_hat - lo <= 2.0 * opts.tol) ||
                      (hi - res.theta_hat <= 2.0 * opts.tol);
    res.alpha_hat = alpha(res.theta_hat, w);
    res.life_expectancy = 1.0 / res.theta_hat;
    res.n_hat = population_size_estimate(stats, res.theta_hat, w);
    res.se = standard_error(stats, res.theta_hat, w);
    std::tie(res.ci_low, res.ci_high) =
        confidence_interval(res.theta_hat, res.se, opts.level);
    return res;
}

double standard_error(const SufficientStats& stats, double theta_hat,
                      const StudyWindow& w) {
    const double a = alpha(theta_hat, w);
    const double a1 = alpha_d1(theta_hat, w);
    const double a2 = alpha_d2(theta_hat, w);
    const double base1 = -a1 / a;
    const double base2 = -a2 / a + a1 * a1 / (a * a);

    // Per-cell constants of m_d1 = const_c - y and the y-free m_d2.
    const std::array<double, 3> c1 = {base1 + 1.0 / theta_hat, base1,
                                      base1 + k_d1(theta_hat, w)};
    const std::array<double, 3> c2 = {base2 - 1.0 / (theta_hat * theta_hat), base2,
                                      base2 + k_d2(theta_hat, w)};

    double num = 0.0, den = 0.0;
    for (int c = 0; c < 3; ++c) {
        const CellSums& cs = stats.cells[c];
        num += cs.w * c1[c] * c1[c] - 2.0 * c1[c] * cs.wy + cs.wyy;
        den += cs.w * c2[c];
    }
    if (den == 0.0) {
        throw std::runtime_error(
            "standard_error: criterion curvature vanished; the information "
            "function is nonzero for 0 < s < G, so the statistics are degenerate");
    }
    return std::sqrt(num) / std::abs(den);
}

double population_size_estimate(const SufficientStats& stats, double theta_hat,
                                const StudyWindow& w) {
    return stats.m / alpha(theta_hat, w);
}

double normal_quantile_two_sided(double level) {
    if (!(level > 0.0) || !(level < 1.0)) {
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(),
                                 0.5 * (1.0 + level));
}

std::pair<double, double> confidence_interval(double theta_hat, double se, double level) {
    const double z = normal_quantile_two_sided(level);
    const double lo = theta_hat - z * se;
    return {std::max(lo, 0.0), theta_hat + z * se};
}

}  // namespace truncens
