#include "truncens/oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "truncens/simulator.hpp"

namespace truncens::oracle {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr double kQuadTol = 1e-10;
constexpr unsigned kQuadDepth = 12;

double integrate(const std::function<double(double)>& f, double lo, double hi) {
    double err = 0.0;
    const double v = Quad::integrate(f, lo, hi, kQuadDepth, kQuadTol, &err);
    if (!std::isfinite(v) || err > 1e-8 * std::max(1.0, std::abs(v))) {
        throw std::runtime_error("quadrature did not converge");
    }
    return v;
}

}  // namespace

GridSpec::GridSpec(double lo_, double hi_, std::size_t points_, bool log_spaced_)
    : lo(lo_), hi(hi_), points(points_), log_spaced(log_spaced_) {
    if (!(lo > 0.0) || !(hi > lo) || points < 3) {
        throw std::invalid_argument("GridSpec requires 0 < lo < hi and points >= 3");
    }
}

double grid_argmax(const std::function<double(double)>& fn, const GridSpec& grid) {
    double best_theta = 0.0;
    double best_val = -std::numeric_limits<double>::infinity();
    const double lo = grid.log_spaced ? std::log(grid.lo) : grid.lo;
    const double hi = grid.log_spaced ? std::log(grid.hi) : grid.hi;
    const double step = (hi - lo) / static_cast<double>(grid.points - 1);
    for (std::size_t i = 0; i < grid.points; ++i) {
        double theta = lo + static_cast<double>(i) * step;
        if (grid.log_spaced) theta = std::exp(theta);
        const double v = fn(theta);
        if (v > best_val) {  // strict: ties keep the smallest theta
            best_val = v;
            best_theta = theta;
        }
    }
    return best_theta;
}

double grid_argmax(const SufficientStats& stats, const StudyWindow& w,
                   const GridSpec& grid) {
    return grid_argmax(
        [&](double theta) { return profiled_objective(stats, theta, w); }, grid);
}

double quad_density_mass(double theta, const StudyWindow& w) {
    double mass = 0.0;
    for (auto [l, r] : {std::pair{0, 0}, {0, 1}, {1, 0}}) {
        mass += integrate(
            [&, l = l, r = r](double y) {
                return obs_density({y, l, r}, theta, w);
            },
            0.0, w.s);
    }
    return mass;
}

double quad_alpha(double theta, const StudyWindow& w) {
    // P((X,T) in D0): units born before study begin are always observable,
    // later births only when death falls inside [t, t+s].
    const double p_in_study = w.s / w.G;
    const double p_before = integrate(
                                [&](double t) {
                                    return integrate(
                                        [&](double x) { return theta * std::exp(-theta * x); },
                                        t, t + w.s);
                                },
                                0.0, w.span()) /
                            w.G;
    return p_in_study + p_before;
}

double quad_M(double theta0, double theta, const StudyWindow& w) {
    // Quadrature moments of the observed density under theta0.
    double mean_y = 0.0, mean_l = 0.0, mean_unc = 0.0;
    for (auto [l, r] : {std::pair{0, 0}, {0, 1}, {1, 0}}) {
        const double w0 = integrate(
            [&, l = l, r = r](double y) { return obs_density({y, l, r}, theta0, w); },
            0.0, w.s);
        const double w1 = integrate(
            [&, l = l, r = r](double y) {
                return y * obs_density({y, l, r}, theta0, w);
            },
            0.0, w.s);
        mean_y += w1;
        if (l == 1) mean_l += w0;
        if (l == 0 && r == 0) mean_unc += w0;
    }
    const double avg = -std::log(alpha(theta, w)) - theta * mean_y +
                       k_log(theta, w) * mean_l + std::log(theta) * mean_unc;
    return alpha(theta0, w) * avg;
}

double finite_diff(const std::function<double(double)>& fn, double x, int order,
                   double step) {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("finite_diff: order must be 1 or 2");
    }
    const double h = step > 0.0 ? step : std::max(1e-5, 1e-7 * std::abs(x));
    const double fm = fn(x - h);
    const double fp = fn(x + h);
    if (order == 1) {
        if (!std::isfinite(fm) || !std::isfinite(fp)) {
            throw std::runtime_error("finite_diff: non-finite evaluation");
        }
        return (fp - fm) / (2.0 * h);
    }
    const double f0 = fn(x);
    if (!std::isfinite(fm) || !std::isfinite(f0) || !std::isfinite(fp)) {
        throw std::runtime_error("finite_diff: non-finite evaluation");
    }
    return (fp - 2.0 * f0 + fm) / (h * h);
}

MomentEstimate mc_indicator_moments(double theta, const StudyWindow& w, std::size_t n,
                                    std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("mc_indicator_moments: n must be >= 1");
    const SimConfig cfg{theta, w, n, seed};
    const std::vector<LatentUnit> units = draw_latent(cfg);

    // Indicators evaluated straight from the (x, t) definitions.
    std::size_t c_l = 0, c_unc = 0, c_cens = 0;
    for (const LatentUnit& u : units) {
        const bool l = u.t > 0.0;
        const bool r = u.t + w.s < u.x;
        const bool observable = l ? (!r && u.x >= u.t) : true;
        if (!observable) continue;
        if (l) ++c_l;
        else if (r) ++c_cens;
        else ++c_unc;
    }
    const auto est = [n](std::size_t c) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        return std::pair{p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
    };
    MomentEstimate m;
    m.n = n;
    std::tie(m.e_l, m.sigma_l) = est(c_l);
    std::tie(m.e_unc, m.sigma_unc) = est(c_unc);
    std::tie(m.e_cens, m.sigma_cens) = est(c_cens);
    return m;
}

}  // namespace truncens::oracle
