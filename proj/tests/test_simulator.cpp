#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "truncens/dataio.hpp"
#include "truncens/oracle.hpp"
#include "truncens/simulator.hpp"

using namespace truncens;

TEST_CASE("latent draws are deterministic and correctly distributed") {
    const SimConfig cfg{0.5, StudyWindow{2, 10}, 1'000'000, 123};
    const auto a = draw_latent(cfg);
    const auto b = draw_latent(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < 1000; ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].t == b[i].t);
    }

    double sum_x = 0.0;
    double t_min = 1e300, t_max = -1e300;
    for (const auto& u : a) {
        sum_x += u.x;
        t_min = std::min(t_min, u.t);
        t_max = std::max(t_max, u.t);
        CHECK(u.x > 0.0);
    }
    // CLT band for the exponential mean, 4 sigma
    CHECK(std::abs(sum_x / 1e6 - 2.0) <= 4.0 * 2.0 / 1000.0);
    CHECK(t_min >= -cfg.window.s);
    CHECK(t_max <= cfg.window.span());
}

TEST_CASE("reduce implements the case definitions") {
    const StudyWindow w{2, 10};
    {
        const auto t = reduce({0.5, -1.0}, w);  // born in study, dies in study
        REQUIRE(t.has_value());
        CHECK(t->y == doctest::Approx(0.5));
        CHECK(t->l == 0);
        CHECK(t->r == 0);
    }
    {
        const auto t = reduce({3.0, -1.0}, w);  // born in study, survives it
        REQUIRE(t.has_value());
        CHECK(t->y == doctest::Approx(1.0));   // y = t + s
        CHECK(t->l == 0);
        CHECK(t->r == 1);
    }
    CHECK(!reduce({0.5, 1.0}, w).has_value());  // died before study begin
    {
        const auto t = reduce({1.5, 1.0}, w);
        REQUIRE(t.has_value());
        CHECK(t->y == doctest::Approx(0.5));
        CHECK(t->l == 1);
        CHECK(t->r == 0);
    }
    CHECK(!reduce({10.0, 1.0}, w).has_value());  // survives the study, born before
}

TEST_CASE("reduce output is always in the support, never (1,1)") {
    const StudyWindow w{2, 10};
    const SimConfig cfg{0.4, w, 200'000, 77};
    for (const LatentUnit& u : draw_latent(cfg)) {
        const auto t = reduce(u, w);
        // observability is equivalent to t <= 0 or 0 < t <= x <= t + s
        const bool observable =
            u.t <= 0.0 || (u.t <= u.x && u.x <= u.t + w.s);
        CHECK(t.has_value() == observable);
        if (t) {
            CHECK(!(t->l == 1 && t->r == 1));
            CHECK(in_support(*t, w));
        }
    }
}

TEST_CASE("observed fraction matches alpha") {
    const StudyWindow w{2, 10};
    const SimConfig cfg{0.3, w, 1'000'000, 2024};
    const auto ss = simulate_stats(cfg);
    const double a = alpha(0.3, w);
    const double frac =
        static_cast<double>(ss.m_observed) / static_cast<double>(ss.n_latent);
    CHECK(std::abs(frac - a) <= 4.0 * std::sqrt(a * (1.0 - a) / 1e6));

    // conditional means of L and (1-L)(1-R) follow the indicator moments
    CHECK(std::abs(ss.stats.mean_l - moment_chi_l(0.3, w) / a) <=
          4.0 * std::sqrt(0.25 / static_cast<double>(ss.m_observed)));
    CHECK(std::abs(ss.stats.mean_unc - moment_chi_unc(0.3, w) / a) <=
          4.0 * std::sqrt(0.25 / static_cast<double>(ss.m_observed)));
}

TEST_CASE("degenerate sample raises") {
    // a single unit in a nearly-invisible window: find a seed whose unit
    // is truncated away, then the sample is empty
    const StudyWindow w{1, 1000};
    bool exercised = false;
    for (std::uint64_t seed = 0; seed < 64 && !exercised; ++seed) {
        const SimConfig cfg{0.05, w, 1, seed};
        if (!reduce(draw_latent(cfg)[0], w).has_value()) {
            CHECK_THROWS_AS(simulate_sample(cfg), std::runtime_error);
            CHECK_THROWS_AS(simulate_stats(cfg), std::runtime_error);
            exercised = true;
        }
    }
    CHECK(exercised);
}

TEST_CASE("simulate_sample and simulate_stats agree") {
    const StudyWindow w{2, 10};
    const SimConfig cfg{0.6, w, 50'000, 31};
    const Sample sample = simulate_sample(cfg);
    const SampleStats ss = simulate_stats(cfg);
    CHECK(sample.m_observed == ss.m_observed);
    const auto direct = summarize(sample.records, w);
    CHECK(direct.m == ss.stats.m);
    CHECK(direct.mean_y == doctest::Approx(ss.stats.mean_y).epsilon(1e-12));
}

TEST_CASE("empirical distribution matches the observed density") {
    // chi-square goodness of fit on a 3-cell x 20-bin grid; the 0.001
    // critical value for 59 degrees of freedom is 98.324
    const StudyWindow w{2, 10};
    const double theta = 0.7;
    const SimConfig cfg{theta, w, 1'000'000, 314159};
    const Sample sample = simulate_sample(cfg);

    constexpr int kBins = 20;
    double counts[3][kBins] = {};
    for (const auto& rec : sample.records) {
        int bin = static_cast<int>(rec.triple.y / w.s * kBins);
        bin = std::min(bin, kBins - 1);
        counts[cell_index(rec.triple)][bin] += 1.0;
    }

    double stat = 0.0;
    const double m = static_cast<double>(sample.m_observed);
    const std::pair<int, int> cells[3] = {{0, 0}, {0, 1}, {1, 0}};
    for (int c = 0; c < 3; ++c) {
        for (int b = 0; b < kBins; ++b) {
            const double lo = w.s * b / kBins;
            const double hi = w.s * (b + 1) / kBins;
            double p = 0.0;  // midpoint rule, 64 panels per bin
            const double h = (hi - lo) / 64.0;
            for (int k = 0; k < 64; ++k) {
                p += obs_density({lo + (k + 0.5) * h, cells[c].first, cells[c].second},
                                 theta, w) *
                     h;
            }
            const double expected = m * p;
            const double observed = counts[c][b];
            stat += (observed - expected) * (observed - expected) / expected;
        }
    }
    CHECK(stat < 98.324);
}

TEST_CASE("mc study sanity and determinism") {
    const SimConfig cfg{0.3, StudyWindow{2, 10}, 4'000, 555};
    const StudyReport a = mc_study(cfg, 60, 0.95);
    const StudyReport b = mc_study_serial(cfg, 60, 0.95);
    CHECK(a.mean_theta == b.mean_theta);
    CHECK(a.sd_theta == b.sd_theta);
    CHECK(a.coverage == b.coverage);
    CHECK(a.failures == 0);
    CHECK(a.replications == 60);
    CHECK(a.standardized.size() == 60);

    CHECK(std::abs(a.mean_theta - 0.3) <
          4.0 * a.sd_theta / std::sqrt(60.0));
    CHECK(a.coverage > 0.8);
    CHECK(a.coverage <= 1.0);

    CHECK_THROWS_AS(mc_study(cfg, 1, 0.95), std::invalid_argument);
}
