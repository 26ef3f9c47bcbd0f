#pragma once

#include <array>
#include <span>
#include <vector>

#include "truncens/model.hpp"

namespace truncens {

// One weighted observation.  Weights carry aggregated count data;
// zero-weight records are skipped.
struct ObservedRecord {
    ObservedTriple triple;
    double weight = 1.0;
};

// Per-(l,r)-cell weighted sums of 1, y and y^2.  Cell order:
// 0 = uncensored (0,0), 1 = censored (0,1), 2 = truncated (1,0).
struct CellSums {
    double w = 0.0;
    double wy = 0.0;
    double wyy = 0.0;
};

inline int cell_index(const ObservedTriple& t) { return t.l == 1 ? 2 : (t.r == 1 ? 1 : 0); }

// The data reduction that fully determines both the profiled objective
// and the observable standard error.
struct SufficientStats {
    double m = 0.0;         // total weight
    double mean_y = 0.0;    // weighted mean of y
    double mean_l = 0.0;    // weighted mean of l
    double mean_unc = 0.0;  // weighted mean of (1-l)(1-r)
    std::array<CellSums, 3> cells{};
};

// Reduce records to sufficient statistics with deterministic compensated
// summation.  Throws on empty input, zero total weight, or a record
// outside the support (the message names the offending record index).
// summarize() runs the chunked OpenMP kernel; summarize_serial() is the
// straight-line reference.  Both produce bit-identical results.
SufficientStats summarize(std::span<const ObservedRecord> records, const StudyWindow& w);
SufficientStats summarize_serial(std::span<const ObservedRecord> records, const StudyWindow& w);

// Average profiled criterion: -log(alpha) - theta*mean_y
// + K(theta)*mean_l + log(theta)*mean_unc.
double profiled_objective(const SufficientStats& stats, double theta, const StudyWindow& w);

struct FitOptions {
    ParamDomain domain{1e-6};
    double tol = 1e-10;    // absolute tolerance on theta
    double level = 0.95;   // confidence level for the reported interval
};

struct FitResult {
    double theta_hat = 0.0;
    double se = 0.0;
    double alpha_hat = 0.0;
    double n_hat = 0.0;
    double life_expectancy = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double objective_at_max = 0.0;
    bool converged = false;
    bool at_boundary = false;
    int iterations = 0;
};

// Maximize the profiled objective over [eps, 1/eps]: a 64-point log-grid
// pre-scan selects the bracket (leftmost on ties), then bounded
// Brent refinement.  Throws if the objective is non-finite anywhere on
// the pre-scan.
FitResult fit_mle(const SufficientStats& stats, const StudyWindow& w,
                  const FitOptions& opts = {});

// Observable standard error: sqrt(sum w*m_d1^2) / |sum w*m_d2|, computed
// from the per-cell sums.  Throws if the denominator vanishes.
double standard_error(const SufficientStats& stats, double theta_hat, const StudyWindow& w);

// Back-estimate of the latent population size, m / alpha(theta_hat).
double population_size_estimate(const SufficientStats& stats, double theta_hat,
                                const StudyWindow& w);

// Normal-approximation interval theta_hat +/- z*se, clipped to (0, inf).
std::pair<double, double> confidence_interval(double theta_hat, double se, double level);

// Upper-tail standard normal quantile at probability (1+level)/2.
double normal_quantile_two_sided(double level);

}  // namespace truncens
