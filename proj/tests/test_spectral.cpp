#include <catch2/catch_amalgamated.hpp>

#include <crisk/spectral.hpp>

#include "helpers.hpp"

using namespace crisk;

TEST_CASE("spectral risk, frozen small cases") {
    const auto two_point = uniform_sample({-1.0, 1.0});
    CHECK(spectral_risk(two_point, make_tail(0.5)) == Catch::Approx(1.0).margin(1e-14));
    // all Psi mass lands on the worst outcome
    CHECK(spectral_risk(two_point, make_tail(1.0)) == Catch::Approx(0.0).margin(1e-14));
    CHECK(spectral_risk(two_point, make_alpha(1)) == Catch::Approx(0.0).margin(1e-14));
    // -E min(X1, X2) over four equally likely draws = 0.5
    CHECK(spectral_risk(two_point, make_beta(2, 1)) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("constant samples price to minus the constant") {
    for (const auto& mu : testutil::measure_zoo()) {
        CAPTURE(describe(mu));
        const auto s = make_sample({3.25, 3.25, 3.25}, {0.2, 0.5, 0.3});
        CHECK(spectral_risk(s, mu) == Catch::Approx(-3.25).margin(1e-12));
    }
}

TEST_CASE("tail of order one is minus the mean") {
    Rng rng(101);
    for (int rep = 0; rep < 20; ++rep) {
        const auto s = testutil::random_sample(rng, 1 + rng.index(32));
        double mean = 0.0;
        for (std::size_t t = 0; t < s.size(); ++t) mean += s.weights[t] * s.values[t];
        CHECK(spectral_risk(s, make_tail(1.0)) == Catch::Approx(-mean).margin(1e-12));
    }
}

TEST_CASE("coherence axioms hold on random samples") {
    Rng rng(2024);
    const auto zoo = testutil::measure_zoo();
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 2 + rng.index(30);
        const auto weights = testutil::random_weights(rng, n);
        const auto x = testutil::random_values(rng, n);
        const auto y = testutil::random_values(rng, n);
        const auto& mu = zoo[rep % zoo.size()];
        CAPTURE(describe(mu), n);

        const Sample sx{x, weights};
        const Sample sy{y, weights};
        const double rx = spectral_risk(sx, mu);
        const double ry = spectral_risk(sy, mu);

        // subadditivity
        std::vector<double> sum(n);
        for (std::size_t t = 0; t < n; ++t) sum[t] = x[t] + y[t];
        CHECK(spectral_risk(Sample{sum, weights}, mu) <= rx + ry + 1e-9);

        // monotonicity: y + |shift| dominates y
        std::vector<double> dominated(n);
        const double lift = 0.5 + rng.uniform();
        for (std::size_t t = 0; t < n; ++t) dominated[t] = y[t] + lift * rng.uniform();
        CHECK(spectral_risk(Sample{dominated, weights}, mu) <= ry + 1e-12);

        // positive homogeneity
        const double c = 2.0 * rng.uniform();
        std::vector<double> scaled(n);
        for (std::size_t t = 0; t < n; ++t) scaled[t] = c * x[t];
        CHECK(spectral_risk(Sample{scaled, weights}, mu) ==
              Catch::Approx(c * rx).margin(1e-9 * (1.0 + std::abs(rx))));

        // translation invariance
        const double m = 4.0 * rng.uniform() - 2.0;
        std::vector<double> shifted(n);
        for (std::size_t t = 0; t < n; ++t) shifted[t] = x[t] + m;
        CHECK(spectral_risk(Sample{shifted, weights}, mu) == Catch::Approx(rx - m).margin(1e-10));
    }
}

TEST_CASE("integer beta family equals the order-statistic law") {
    Rng rng(77);
    for (int rep = 0; rep < 12; ++rep) {
        const std::size_t t = 2 + rng.index(4); // T <= 5
        const auto s = testutil::random_sample(rng, t, rep % 2 == 0);
        for (int alpha = 1; alpha <= 3; ++alpha) {
            for (int beta = 1; beta <= alpha; ++beta) {
                const double oracle = testutil::beta_var_oracle(s.values, s.weights, alpha, beta);
                const auto mu = (alpha == 1) ? make_alpha(1)
                                : (beta == alpha) ? make_tail(1.0) // mean of all draws
                                                  : make_beta(alpha, beta);
                if (beta == alpha) {
                    // mean of all alpha draws is just -E X
                    CHECK(spectral_risk(s, make_tail(1.0)) == Catch::Approx(oracle).margin(1e-9));
                    continue;
                }
                CAPTURE(t, alpha, beta);
                CHECK(spectral_risk(s, mu) == Catch::Approx(oracle).margin(1e-9));
            }
        }
    }
}

TEST_CASE("tail risk decreases in lambda") {
    Rng rng(31);
    for (int rep = 0; rep < 25; ++rep) {
        const auto s = testutil::random_sample(rng, 2 + rng.index(40));
        double prev = std::numeric_limits<double>::infinity();
        for (double lambda : {0.05, 0.2, 0.5, 0.8, 1.0}) {
            const double r = spectral_risk(s, make_tail(lambda));
            CHECK(r <= prev + 1e-12);
            prev = r;
        }
    }
}

TEST_CASE("risk is invariant to how tied values are split across scenarios") {
    for (const auto& mu : testutil::measure_zoo()) {
        // {v, v} with weights (0.3, 0.7) carries the same law as {v} alone
        const auto split = make_sample({1.5, -0.25, 1.5}, {0.3, 0.5, 0.2});
        const auto merged = make_sample({1.5, -0.25}, {0.5, 0.5});
        CAPTURE(describe(mu));
        CHECK(spectral_risk(split, mu) == Catch::Approx(spectral_risk(merged, mu)).margin(1e-12));
    }
}

TEST_CASE("risk is invariant under scenario permutations") {
    Rng rng(55);
    const auto s = testutil::random_sample(rng, 17);
    Sample permuted = s;
    for (std::size_t i = s.size(); i > 1; --i) {
        const std::size_t j = rng.index(i);
        std::swap(permuted.values[i - 1], permuted.values[j]);
        std::swap(permuted.weights[i - 1], permuted.weights[j]);
    }
    for (const auto& mu : testutil::measure_zoo())
        CHECK(spectral_risk(s, mu) == Catch::Approx(spectral_risk(permuted, mu)).margin(1e-12));
}

TEST_CASE("sample validation") {
    CHECK_THROWS_AS(make_sample({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(make_sample({1.0}, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(make_sample({1.0, 2.0}, {0.7, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(make_sample({1.0, 2.0}, {-0.1, 1.1}), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(make_sample({inf, 0.0}, {0.5, 0.5}), std::invalid_argument);
}
