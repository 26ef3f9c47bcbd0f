#pragma once

#include <cstddef>

// Closed-form evaluation of the observation model for exponentially
// distributed lifespans observed through a double-truncation window of
// s study years out of a G-year cohort span, with left-truncation and
// right-censoring indicators.  All functions are pure and thread-safe.

namespace truncens {

// Design constants of the panel: s years of observed study time, birth
// cohorts spanning G years ending at study end.  Requires 0 < s < G.
struct StudyWindow {
    double s;
    double G;

    StudyWindow(double s_, double G_);

    double span() const { return G - s; }
};

// Compact parameter interval [eps, 1/eps] for the rate.
struct ParamDomain {
    double eps;

    explicit ParamDomain(double eps_ = 1e-6);

    double lo() const { return eps; }
    double hi() const { return 1.0 / eps; }
    bool contains(double theta) const { return theta >= lo() && theta <= hi(); }
};

// One observable triple: reduced duration y, left-truncation indicator l,
// right-censoring indicator r.
struct ObservedTriple {
    double y = 0.0;
    int l = 0;
    int r = 0;
};

// Support membership: y in [0, s], (l, r) one of (0,0), (0,1), (1,0),
// and y strictly below s in the uncensored cell.
bool in_support(const ObservedTriple& t, const StudyWindow& w);

// Probability that a latent unit yields an observable record.
// Lies strictly between s/G and 1 for every theta > 0.
double alpha(double theta, const StudyWindow& w);
double alpha_d1(double theta, const StudyWindow& w);
double alpha_d2(double theta, const StudyWindow& w);

// K(theta) = log(1 - exp(-theta (G-s))) and its derivatives, evaluated
// through expm1/log1p so small theta*(G-s) does not cancel.
double k_log(double theta, const StudyWindow& w);
double k_d1(double theta, const StudyWindow& w);
double k_d2(double theta, const StudyWindow& w);

// Density of an observed triple with respect to the restricted population
// measure; zero off the support.
double obs_density(const ObservedTriple& t, double theta, const StudyWindow& w);

// Per-observation criterion contribution (log-density with the
// theta-free factor removed) and its first two theta-derivatives.
// All three vanish off the support.
double m_value(const ObservedTriple& t, double theta, const StudyWindow& w);
double m_d1(const ObservedTriple& t, double theta, const StudyWindow& w);
double m_d2(const ObservedTriple& t, double theta, const StudyWindow& w);

// H_k(theta) = s^k exp(-theta s) / (1 - exp(-theta s))^k - theta^{-k},
// k in {1, 2, 3}.
double h_k(double theta, double s, int k);

// Algebraically equivalent routes to the information function eta.
enum class EtaForm {
    Direct,     // second-derivative expectation assembled from indicator moments
    HSeries,    // H_2 / H_3 rearrangement
    DeltaSplit, // nonpositive first summand plus the negative remainder Delta
};

// Expected second derivative of the population criterion; strictly
// negative for all theta > 0 and 0 < s < G.
double eta(double theta, const StudyWindow& w, EtaForm form = EtaForm::Direct);

// Latent-measure expectations of the indicator products chi_D * L and
// chi_D * (1-L)(1-R).
double moment_chi_l(double theta, const StudyWindow& w);
double moment_chi_unc(double theta, const StudyWindow& w);

}  // namespace truncens
