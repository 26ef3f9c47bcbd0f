#pragma once

#include <cstdint>
#include <functional>

#include "truncens/estimator.hpp"
#include "truncens/model.hpp"

// Independent brute-force routes for validating the closed forms:
// quadrature, dense grid search, finite differences and latent-measure
// Monte Carlo.  Nothing here reuses the analytic derivative code it is
// meant to check.

namespace truncens::oracle {

struct GridSpec {
    double lo;
    double hi;
    std::size_t points;
    bool log_spaced = false;

    GridSpec(double lo_, double hi_, std::size_t points_, bool log_spaced_ = false);
};

// Grid point maximizing the profiled objective; ties go to the smallest
// theta.
double grid_argmax(const SufficientStats& stats, const StudyWindow& w,
                   const GridSpec& grid);
double grid_argmax(const std::function<double(double)>& fn, const GridSpec& grid);

// Adaptive quadrature of the observed density over the support,
// summed across the three (l, r) cells.  Equals 1 for a valid density.
double quad_density_mass(double theta, const StudyWindow& w);

// Observation probability recomputed by nested quadrature over the
// latent (x, t) plane, never touching the closed form.
double quad_alpha(double theta, const StudyWindow& w);

// Population criterion M(theta) under truth theta0, assembled from
// quadrature moments of the observed density.
double quad_M(double theta0, double theta, const StudyWindow& w);

// Central finite difference of the given order (1 or 2); step defaults
// to max(1e-5, 1e-7*|x|).  Throws on non-finite evaluations.
double finite_diff(const std::function<double(double)>& fn, double x, int order,
                   double step = 0.0);

struct MomentEstimate {
    double e_l = 0.0;        // mean of chi_D * L
    double e_unc = 0.0;      // mean of chi_D * (1-L)(1-R)
    double e_cens = 0.0;     // mean of chi_D * (1-L) R
    double sigma_l = 0.0;    // plug-in MC standard errors
    double sigma_unc = 0.0;
    double sigma_cens = 0.0;
    std::size_t n = 0;
};

// Latent-measure Monte Carlo estimates of the indicator moments.
MomentEstimate mc_indicator_moments(double theta, const StudyWindow& w, std::size_t n,
                                    std::uint64_t seed);

}  // namespace truncens::oracle
