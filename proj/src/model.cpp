#include "truncens/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace truncens {

namespace {

void require_positive_theta(double theta) {
    if (!(theta > 0.0)) {
        throw std::domain_error("theta must be positive, got " + std::to_string(theta));
    }
}

// 1 - exp(-x) without cancellation for small x.
double one_minus_exp(double x) { return -std::expm1(-x); }

// log(1 - exp(-x)) for x > 0.
double log1mexp(double x) {
    if (x > 0.6931471805599453) {
        return std::log1p(-std::exp(-x));
    }
    return std::log(-std::expm1(-x));
}

}  // namespace

StudyWindow::StudyWindow(double s_, double G_) : s(s_), G(G_) {
    if (!(s > 0.0) || !(G > s)) {
        throw std::invalid_argument("StudyWindow requires 0 < s < G, got s=" +
                                    std::to_string(s_) + " G=" + std::to_string(G_));
    }
}

ParamDomain::ParamDomain(double eps_) : eps(eps_) {
    if (!(eps > 0.0) || !(eps < 1.0)) {
        throw std::invalid_argument("ParamDomain requires eps in (0, 1)");
    }
}

bool in_support(const ObservedTriple& t, const StudyWindow& w) {
    if ((t.l != 0 && t.l != 1) || (t.r != 0 && t.r != 1)) return false;
    if (t.l == 1 && t.r == 1) return false;
    if (!(t.y >= 0.0 && t.y <= w.s)) return false;
    if (t.l == 0 && t.r == 0 && t.y >= w.s) return false;  // density factor s - y must stay positive
    return true;
}

double alpha(double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    const double a = one_minus_exp(theta * w.s);
    const double b = one_minus_exp(theta * w.span());
    return w.s / w.G + a * b / (w.G * theta);
}

double alpha_d1(double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    const double a = one_minus_exp(theta * w.s);
    const double b = one_minus_exp(theta * w.span());
    const double ad = w.s * std::exp(-theta * w.s);
    const double bd = w.span() * std::exp(-theta * w.span());
    const double u = a * b;
    const double ud = ad * b + a * bd;
    return (ud / theta - u / (theta * theta)) / w.G;
}

double alpha_d2(double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    const double a = one_minus_exp(theta * w.s);
    const double b = one_minus_exp(theta * w.span());
    const double ad = w.s * std::exp(-theta * w.s);
    const double bd = w.span() * std::exp(-theta * w.span());
    const double add = -w.s * w.s * std::exp(-theta * w.s);
    const double bdd = -w.span() * w.span() * std::exp(-theta * w.span());
    const double u = a * b;
    const double ud = ad * b + a * bd;
    const double udd = add * b + 2.0 * ad * bd + a * bdd;
    const double t2 = theta * theta;
    return (udd / theta - 2.0 * ud / t2 + 2.0 * u / (t2 * theta)) / w.G;
}

double k_log(double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    return log1mexp(theta * w.span());
}

double k_d1(double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    return w.span() / std::expm1(theta * w.span());
}

double k_d2(double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    const double d = w.span();
    const double e = std::expm1(theta * d);
    return -d * d / e - d * d / (e * e);
}

double obs_density(const ObservedTriple& t, double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    if (!in_support(t, w)) return 0.0;
    double f = std::exp(-theta * t.y) / (alpha(theta, w) * w.G);
    if (t.l == 1) f *= one_minus_exp(theta * w.span());
    if (t.l == 0 && t.r == 0) f *= theta * (w.s - t.y);
    return f;
}

double m_value(const ObservedTriple& t, double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    if (!in_support(t, w)) return 0.0;
    double v = -std::log(alpha(theta, w)) - theta * t.y;
    if (t.l == 1) v += k_log(theta, w);
    if (t.l == 0 && t.r == 0) v += std::log(theta);
    return v;
}

double m_d1(const ObservedTriple& t, double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    if (!in_support(t, w)) return 0.0;
    double v = -alpha_d1(theta, w) / alpha(theta, w) - t.y;
    if (t.l == 1) v += k_d1(theta, w);
    if (t.l == 0 && t.r == 0) v += 1.0 / theta;
    return v;
}

double m_d2(const ObservedTriple& t, double theta, const StudyWindow& w) {
    require_positive_theta(theta);
    if (!in_support(t, w)) return 0.0;
    const double a = alpha(theta, w);
    const double a1 = alpha_d1(theta, w);
    double v = -alpha_d2(theta, w) / a + a1 * a1 / (a * a);
    if (t.l == 1) v += k_d2(theta, w);
    if (t.l == 0 && t.r == 0) v -= 1.0 / (theta * theta);
    return v;
}

double h_k(double theta, double s, int k) {
    require_positive_theta(theta);
    if (!(s > 0.0)) throw std::domain_error("h_k requires s > 0");
    if (k < 1 || k > 3) throw std::domain_error("h_k order must be 1, 2 or 3");
    const double denom = one_minus_exp(theta * s);
    return std::pow(s, k) * std::exp(-theta * s) / std::pow(denom, k) -
           std::pow(theta, -k);
}

double moment_chi_l(double theta, const StudyWindow& w) {
    return alpha(theta, w) - w.s / w.G;
}

double moment_chi_unc(double theta, const StudyWindow& w) {
    return w.s / w.G - one_minus_exp(theta * w.s) / (w.G * theta);
}

double eta(double theta, const StudyWindow& w, EtaForm form) {
    require_positive_theta(theta);
    const double a = alpha(theta, w);
    const double a1 = alpha_d1(theta, w);
    switch (form) {
        case EtaForm::Direct: {
            const double a2 = alpha_d2(theta, w);
            return (-a2 + a1 * a1 / a) + k_d2(theta, w) * moment_chi_l(theta, w) -
                   moment_chi_unc(theta, w) / (theta * theta);
        }
        case EtaForm::HSeries: {
            const double first = a1 * a1 / a - a1 * a1 / (a - w.s / w.G);
            return first + a * h_k(theta, w.s, 2) -
                   one_minus_exp(theta * w.s) / w.G * h_k(theta, w.s, 3);
        }
        case EtaForm::DeltaSplit: {
            const double first = a1 * a1 / a - a1 * a1 / (a - w.s / w.G);
            const double h1 = h_k(theta, w.s, 1);
            const double egs = std::exp(-theta * w.span());
            const double delta =
                w.s / (w.G * theta) * one_minus_exp(theta * w.span()) * h1 -
                w.s / (w.G * theta * theta) * one_minus_exp(theta * w.s) * egs *
                    (h1 / w.s + 1.0);
            return first + delta;
        }
    }
    throw std::domain_error("unknown EtaForm");
}

}  // namespace truncens
