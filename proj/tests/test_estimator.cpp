#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "truncens/dataio.hpp"
#include "truncens/estimator.hpp"
#include "truncens/oracle.hpp"
#include "truncens/simulator.hpp"

using namespace truncens;

namespace {

SufficientStats enterprise_stats(double G) {
    const StudyWindow w{2, G};
    return summarize(expand_annual_counts(enterprise_table(), w), w);
}

}  // namespace

TEST_CASE("summarize reproduces the enterprise coefficients") {
    const auto stats = enterprise_stats(5);
    CHECK(stats.m == 1'028'761.0);
    CHECK(stats.mean_y == doctest::Approx(0.9952764).epsilon(1e-7));
    CHECK(stats.mean_l == doctest::Approx(0.5456311).epsilon(1e-7));
    CHECK(stats.mean_unc == doctest::Approx(0.0490221).epsilon(1e-6));
}

TEST_CASE("summarize basics") {
    const StudyWindow w{2, 10};
    const std::vector<ObservedRecord> one = {{{1.0, 0, 0}, 1.0}};
    const auto stats = summarize(one, w);
    CHECK(stats.m == 1.0);
    CHECK(stats.mean_y == 1.0);
    CHECK(stats.mean_l == 0.0);
    CHECK(stats.mean_unc == 1.0);

    // weight 2 equals two unit-weight copies, exactly
    const std::vector<ObservedRecord> weighted = {{{0.5, 1, 0}, 2.0}, {{1.0, 0, 0}, 1.0}};
    const std::vector<ObservedRecord> expanded = {
        {{0.5, 1, 0}, 1.0}, {{0.5, 1, 0}, 1.0}, {{1.0, 0, 0}, 1.0}};
    const auto a = summarize(weighted, w);
    const auto b = summarize(expanded, w);
    CHECK(a.m == b.m);
    CHECK(a.mean_y == b.mean_y);
    CHECK(a.mean_l == b.mean_l);

    // zero-weight records are ignored
    std::vector<ObservedRecord> with_zero = one;
    with_zero.push_back({{0.2, 0, 1}, 0.0});
    CHECK(summarize(with_zero, w).m == 1.0);
}

TEST_CASE("summarize error paths") {
    const StudyWindow w{2, 10};
    CHECK_THROWS_AS(summarize({}, w), std::invalid_argument);
    const std::vector<ObservedRecord> zero = {{{1.0, 0, 0}, 0.0}};
    CHECK_THROWS_AS(summarize(zero, w), std::invalid_argument);

    const std::vector<ObservedRecord> bad = {{{1.0, 0, 0}, 1.0}, {{3.5, 0, 0}, 1.0}};
    try {
        summarize(bad, w);
        FAIL("expected summarize to reject the out-of-support record");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("record 1") != std::string::npos);
    }
    const std::vector<ObservedRecord> negw = {{{1.0, 0, 0}, -1.0}};
    CHECK_THROWS_AS(summarize(negw, w), std::invalid_argument);
}

TEST_CASE("parallel and serial reductions agree bit for bit") {
    const StudyWindow w{2, 10};
    const Sample sample = simulate_sample({0.4, w, 100'000, 11});
    const auto a = summarize(sample.records, w);
    const auto b = summarize_serial(sample.records, w);
    CHECK(a.m == b.m);
    CHECK(a.mean_y == b.mean_y);
    CHECK(a.mean_l == b.mean_l);
    CHECK(a.mean_unc == b.mean_unc);
    for (int c = 0; c < 3; ++c) {
        CHECK(a.cells[c].wy == b.cells[c].wy);
        CHECK(a.cells[c].wyy == b.cells[c].wyy);
    }
}

TEST_CASE("profiled objective term dropout and expansion oracle") {
    const StudyWindow w{2, 10};
    // all right-censored, born in study: only the first two terms remain
    SufficientStats stats;
    stats.m = 3.0;
    stats.mean_y = 0.8;
    stats.mean_l = 0.0;
    stats.mean_unc = 0.0;
    CHECK(profiled_objective(stats, 0.5, w) ==
          doctest::Approx(-std::log(alpha(0.5, w)) - 0.5 * 0.8).epsilon(1e-14));

    // weighted objective equals the average of m_value over expanded
    // unit-weight records
    const std::vector<ObservedRecord> weighted = {
        {{0.4, 0, 0}, 3.0}, {{1.2, 1, 0}, 2.0}, {{0.9, 0, 1}, 4.0}};
    std::vector<ObservedRecord> expanded;
    for (const auto& rec : weighted) {
        for (int i = 0; i < static_cast<int>(rec.weight); ++i) {
            expanded.push_back({rec.triple, 1.0});
        }
    }
    const auto ws = summarize(weighted, w);
    double avg = 0.0;
    for (const auto& rec : expanded) avg += m_value(rec.triple, 0.3, w);
    avg /= static_cast<double>(expanded.size());
    CHECK(std::abs(profiled_objective(ws, 0.3, w) - avg) < 1e-10);
}

TEST_CASE("fit_mle reproduces Table 2 points") {
    {
        const auto fit = fit_mle(enterprise_stats(10), StudyWindow{2, 10});
        CHECK(fit.theta_hat == doctest::Approx(0.1849).epsilon(3e-4));
        CHECK(fit.life_expectancy == doctest::Approx(5.41).epsilon(1e-3));
        CHECK(fit.alpha_hat == doctest::Approx(0.329).epsilon(2e-3));
        CHECK(fit.converged);
        CHECK(!fit.at_boundary);
    }
    {
        const auto fit = fit_mle(enterprise_stats(200), StudyWindow{2, 200});
        CHECK(fit.theta_hat == doctest::Approx(0.0921).epsilon(6e-4));
        CHECK(fit.alpha_hat == doctest::Approx(0.019).epsilon(1e-2));
    }
}

TEST_CASE("fit_mle agrees with dense grid search on simulated data") {
    const StudyWindow w{2, 10};
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto ss = simulate_stats({0.35, w, 30'000, seed});
        const auto fit = fit_mle(ss.stats, w);
        const double g = oracle::grid_argmax(
            ss.stats, w,
            oracle::GridSpec{fit.theta_hat - 0.05, fit.theta_hat + 0.05, 100'001});
        CHECK(std::abs(fit.theta_hat - g) <= 2e-6);
    }
}

TEST_CASE("argmax invariances") {
    const StudyWindow w{2, 10};
    const auto base = enterprise_stats(10);
    const auto fit = fit_mle(base, w);

    // rescaling all weights leaves theta_hat unchanged
    auto records = expand_annual_counts(enterprise_table(), w);
    for (auto& rec : records) rec.weight *= 3.7;
    const auto scaled = summarize(records, w);
    const auto fit2 = fit_mle(scaled, w);
    CHECK(std::abs(fit.theta_hat - fit2.theta_hat) <= 1e-9);

    // increasing mean_y strictly decreases theta_hat
    SufficientStats shifted = base;
    shifted.mean_y += 0.1;
    CHECK(fit_mle(shifted, w).theta_hat < fit.theta_hat);
}

TEST_CASE("boundary maxima are flagged") {
    const StudyWindow w{2, 10};
    // objective = -log(alpha) - theta*mean_y is decreasing, so the
    // maximum sits at the lower domain end
    SufficientStats stats;
    stats.m = 10.0;
    stats.mean_y = 1.0;
    stats.mean_l = 0.0;
    stats.mean_unc = 0.0;
    stats.cells[1] = {10.0, 10.0, 10.0};  // all censored, y = 1
    FitOptions opts;
    opts.domain = ParamDomain{1e-3};
    const auto fit = fit_mle(stats, w, opts);
    CHECK(fit.converged);
    CHECK(fit.at_boundary);
    CHECK(fit.theta_hat == doctest::Approx(1e-3).epsilon(1e-2));
}

TEST_CASE("non-finite objective on the pre-scan is an error") {
    const StudyWindow w{2, 10};
    SufficientStats stats;
    stats.m = 1.0;
    stats.mean_y = std::nan("");
    stats.cells[1] = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(fit_mle(stats, w), std::runtime_error);
}

TEST_CASE("standard error reproduces Table 2") {
    {
        const auto stats = enterprise_stats(10);
        const auto fit = fit_mle(stats, StudyWindow{2, 10});
        CHECK(standard_error(stats, fit.theta_hat, StudyWindow{2, 10}) * 1e4 ==
              doctest::Approx(2.48).epsilon(2e-3));
    }
    {
        const auto stats = enterprise_stats(50);
        const auto fit = fit_mle(stats, StudyWindow{2, 50});
        CHECK(standard_error(stats, fit.theta_hat, StudyWindow{2, 50}) * 1e4 ==
              doctest::Approx(3.13).epsilon(2e-3));
    }
}

TEST_CASE("population size estimate") {
    const auto stats = enterprise_stats(5);
    const auto fit = fit_mle(stats, StudyWindow{2, 5});
    CHECK(population_size_estimate(stats, fit.theta_hat, StudyWindow{2, 5}) ==
          doctest::Approx(stats.m / fit.alpha_hat).epsilon(1e-12));
    CHECK(fit.n_hat >= stats.m);
    CHECK(fit.n_hat == doctest::Approx(1'792'266.0).epsilon(2e-3));

    // alpha near 1: the back-estimate collapses onto m
    const StudyWindow tight{2, 2.0000001};
    SufficientStats s1;
    s1.m = 100.0;
    CHECK(population_size_estimate(s1, 5.0, tight) ==
          doctest::Approx(100.0).epsilon(1e-4));
}

TEST_CASE("confidence intervals") {
    const auto [lo, hi] = confidence_interval(0.1849, 2.48e-4, 0.95);
    CHECK(lo == doctest::Approx(0.18441).epsilon(3e-5));
    CHECK(hi == doctest::Approx(0.18539).epsilon(3e-5));

    // width is exactly 2*z*se
    const double z = normal_quantile_two_sided(0.95);
    CHECK(hi - lo == doctest::Approx(2.0 * z * 2.48e-4).epsilon(1e-12));

    // level -> 0 collapses the interval onto the point estimate
    const auto [l0, h0] = confidence_interval(0.1849, 2.48e-4, 1e-12);
    CHECK(h0 - l0 < 1e-12);

    CHECK_THROWS_AS(confidence_interval(0.1, 0.01, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(confidence_interval(0.1, 0.01, 1.0), std::invalid_argument);
}
