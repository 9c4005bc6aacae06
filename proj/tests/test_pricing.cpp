#include <catch2/catch_amalgamated.hpp>

#include <crisk/pricing.hpp>

#include "helpers.hpp"

using namespace crisk;

namespace {

// Three-scenario market with an asset and an index column.
struct Fixture {
    ScenarioSet scenarios;
    ContactKernel kernel;
    WeightingMeasure mu = make_tail(1.0 / 3.0);

    explicit Fixture(double r_star = 0.05) {
        scenarios.outcomes = Matrix(3, 2);
        const double asset[3] = {-0.08, 0.03, 0.12};
        const double index[3] = {-0.05, 0.02, 0.07};
        for (int t = 0; t < 3; ++t) {
            scenarios.outcomes(t, 0) = asset[t];
            scenarios.outcomes(t, 1) = index[t];
        }
        scenarios.weights = {0.2, 0.5, 0.3};
        scenarios.labels = {"AST", "IDX"};
        scenarios.index_col = 1;
        const auto q = extreme_measure(column_sample(scenarios, 1), mu);
        kernel = contact_measure(scenarios.weights, q.q, r_star);
    }
};

double direct_price(const ClaimSpec& claim, const ContactKernel& ck, const ScenarioSet& s) {
    // single pass over the contact weights, the alternative computation order
    double v = 0.0;
    for (std::size_t t = 0; t < s.scenario_count(); ++t)
        v += ck.r[t] * claim_payoff(claim, claim.s0 * (1.0 + s.outcomes(t, 0)));
    return v;
}

} // namespace

TEST_CASE("nbc price") {
    Fixture fx;
    SECTION("constant payoffs price to the constant") {
        const auto claim = make_custom(0, 100.0, [](double) { return 4.2; });
        CHECK(nbc_price(claim, fx.kernel, fx.scenarios) == Catch::Approx(4.2).margin(1e-12));
    }
    SECTION("r_star zero degenerates to the P-expectation") {
        Fixture fz(0.0);
        const auto claim = make_call(0, 100.0, 95.0);
        double ep = 0.0;
        for (int t = 0; t < 3; ++t)
            ep += fz.scenarios.weights[t] *
                  std::max(100.0 * (1.0 + fz.scenarios.outcomes(t, 0)) - 95.0, 0.0);
        CHECK(nbc_price(claim, fz.kernel, fz.scenarios) == Catch::Approx(ep).margin(1e-14));
    }
    SECTION("hand-computed weighted sum for a call") {
        const auto claim = make_call(0, 100.0, 100.0);
        double oracle = 0.0;
        for (int t = 0; t < 3; ++t)
            oracle += fx.kernel.r[t] *
                      std::max(100.0 * (1.0 + fx.scenarios.outcomes(t, 0)) - 100.0, 0.0);
        CHECK(nbc_price(claim, fx.kernel, fx.scenarios) == Catch::Approx(oracle).margin(1e-12));
    }
    SECTION("two computation orders agree") {
        const auto claim = make_put(0, 100.0, 102.0);
        CHECK(nbc_price(claim, fx.kernel, fx.scenarios) ==
              Catch::Approx(direct_price(claim, fx.kernel, fx.scenarios)).margin(1e-12));
    }
    SECTION("pricing is linear in the payoff") {
        Rng rng(4);
        for (int rep = 0; rep < 10; ++rep) {
            const double a = 2.0 * rng.uniform() - 1.0, b = 2.0 * rng.uniform() - 1.0;
            const double k1 = 90.0 + 20.0 * rng.uniform(), k2 = 90.0 + 20.0 * rng.uniform();
            const auto c1 = make_call(0, 100.0, k1);
            const auto c2 = make_put(0, 100.0, k2);
            const auto combo = make_custom(0, 100.0, [=](double s1) {
                return a * std::max(s1 - k1, 0.0) + b * std::max(k2 - s1, 0.0);
            });
            const double lhs = nbc_price(combo, fx.kernel, fx.scenarios);
            const double rhs = a * nbc_price(c1, fx.kernel, fx.scenarios) +
                               b * nbc_price(c2, fx.kernel, fx.scenarios);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-10));
        }
    }
    SECTION("monotonicity in the payoff") {
        const auto lo = make_call(0, 100.0, 105.0);
        const auto hi = make_call(0, 100.0, 95.0); // dominates on every scenario
        CHECK(nbc_price(lo, fx.kernel, fx.scenarios) <=
              nbc_price(hi, fx.kernel, fx.scenarios) + 1e-12);
    }
    SECTION("non-finite payoffs are rejected") {
        const auto bad = make_custom(0, 100.0,
                                     [](double) { return std::numeric_limits<double>::infinity(); });
        CHECK_THROWS_AS(nbc_price(bad, fx.kernel, fx.scenarios), data_error);
    }
}

TEST_CASE("nbc sensitivity") {
    Fixture fx;
    SECTION("constants have zero sensitivity") {
        const auto claim = make_custom(0, 100.0, [](double) { return 3.0; },
                                       [](double) { return 0.0; });
        CHECK(nbc_sensitivity(claim, fx.kernel, fx.scenarios).value == 0.0);
    }
    SECTION("linear payoff reduces to the mixture mean of the gross return") {
        const auto claim =
            make_custom(0, 100.0, [](double s1) { return s1; }, [](double) { return 1.0; });
        double ep = 0.0, eq = 0.0;
        for (int t = 0; t < 3; ++t) {
            ep += fx.scenarios.weights[t] * (1.0 + fx.scenarios.outcomes(t, 0));
            eq += fx.kernel.q[t] * (1.0 + fx.scenarios.outcomes(t, 0));
        }
        const double a = 1.0 / (1.0 + fx.kernel.r_star);
        CHECK(nbc_sensitivity(claim, fx.kernel, fx.scenarios).value ==
              Catch::Approx(a * ep + (1.0 - a) * eq).margin(1e-14));
    }
    SECTION("deep in-the-money call equals the linear sensitivity") {
        const auto call = make_call(0, 100.0, 10.0); // strike below all outcomes
        const auto linear =
            make_custom(0, 100.0, [](double s1) { return s1; }, [](double) { return 1.0; });
        CHECK(nbc_sensitivity(call, fx.kernel, fx.scenarios).value ==
              Catch::Approx(nbc_sensitivity(linear, fx.kernel, fx.scenarios).value)
                  .margin(1e-14));
    }
    SECTION("central finite differences of the price match for smooth payoffs") {
        const auto smooth = make_custom(
            0, 100.0, [](double s1) { return std::log(1.0 + s1 * s1 / 1e4); },
            [](double s1) { return (2.0 * s1 / 1e4) / (1.0 + s1 * s1 / 1e4); });
        const double bump = 1e-4 * 100.0;
        auto up = smooth, dn = smooth;
        up.s0 = 100.0 + bump;
        dn.s0 = 100.0 - bump;
        const double fd = (nbc_price(up, fx.kernel, fx.scenarios) -
                           nbc_price(dn, fx.kernel, fx.scenarios)) /
                          (2.0 * bump);
        const double sens = nbc_sensitivity(smooth, fx.kernel, fx.scenarios).value;
        CHECK(std::abs(fd - sens) <= 1e-4 * std::abs(sens));
    }
    SECTION("scenarios on the kink are flagged and use the right derivative") {
        // strike exactly at the middle scenario's terminal value
        const double strike = 100.0 * (1.0 + fx.scenarios.outcomes(1, 0));
        const auto call = make_call(0, 100.0, strike);
        const auto r = nbc_sensitivity(call, fx.kernel, fx.scenarios);
        CHECK(r.kink_hits == 1);
        // right derivative counts the kink scenario at slope one
        double ep = 0.0, eq = 0.0;
        for (int t = 1; t < 3; ++t) { // scenarios at or above the strike
            ep += fx.scenarios.weights[t] * (1.0 + fx.scenarios.outcomes(t, 0));
            eq += fx.kernel.q[t] * (1.0 + fx.scenarios.outcomes(t, 0));
        }
        const double a = 1.0 / (1.0 + fx.kernel.r_star);
        CHECK(r.value == Catch::Approx(a * ep + (1.0 - a) * eq).margin(1e-14));
    }
    SECTION("custom payoff without derivative is rejected") {
        const auto no_deriv = make_custom(0, 100.0, [](double s1) { return s1; });
        CHECK_THROWS_AS(nbc_sensitivity(no_deriv, fx.kernel, fx.scenarios),
                        std::invalid_argument);
    }
}

TEST_CASE("empirical price") {
    Fixture fx;
    const PairData pairs{fx.scenarios.outcomes.col(0), fx.scenarios.outcomes.col(1),
                         fx.scenarios.weights};
    SECTION("the exact path reproduces nbc_price on identical data") {
        const auto claim = make_call(0, 100.0, 98.0);
        const auto est = empirical_price(claim, fx.mu, fx.kernel.r_star, pairs, 0);
        CHECK_FALSE(est.std_err.has_value());
        CHECK(est.value ==
              Catch::Approx(nbc_price(claim, fx.kernel, fx.scenarios)).margin(1e-12));
        // atomic mixtures run the same path
        const auto mix = make_atomic({{1.0 / 3.0, 0.5}, {1.0, 0.5}});
        const auto qm = extreme_measure(column_sample(fx.scenarios, 1), mix);
        const auto ckm = contact_measure(fx.scenarios.weights, qm.q, fx.kernel.r_star);
        const auto estm = empirical_price(claim, mix, ckm.r_star, pairs, 0);
        CHECK(estm.value == Catch::Approx(nbc_price(claim, ckm, fx.scenarios)).margin(1e-12));
    }
    SECTION("constant payoffs are exact for every variant") {
        const auto claim = make_custom(0, 100.0, [](double) { return 1.75; });
        CHECK(empirical_price(claim, fx.mu, 0.08, pairs, 0).value ==
              Catch::Approx(1.75).margin(1e-12));
        const auto beta_est = empirical_price(claim, make_beta(3, 2), 0.08, pairs, 1, 200);
        CHECK(beta_est.value == Catch::Approx(1.75).margin(1e-12));
        const auto alpha_est = empirical_price(claim, make_alpha(2), 0.08, pairs, 1, 200);
        CHECK(alpha_est.value == Catch::Approx(1.75).margin(1e-12));
    }
    SECTION("r_star zero reduces to the nu-weighted mean of the payoff") {
        const auto claim = make_put(0, 100.0, 101.0);
        double mean = 0.0;
        for (int t = 0; t < 3; ++t)
            mean += pairs.nu[t] *
                    std::max(101.0 - 100.0 * (1.0 + pairs.x[t]), 0.0);
        CHECK(empirical_price(claim, fx.mu, 0.0, pairs, 0).value ==
              Catch::Approx(mean).margin(1e-14));
    }
    SECTION("monte carlo paths agree with the kernel price within three standard errors") {
        const auto mu_beta = make_beta(4, 2);
        const auto q = extreme_measure(column_sample(fx.scenarios, 1), mu_beta);
        const auto ck = contact_measure(fx.scenarios.weights, q.q, 0.06);
        const auto claim = make_call(0, 100.0, 99.0);
        const double exact = nbc_price(claim, ck, fx.scenarios);
        const auto est = empirical_price(claim, mu_beta, 0.06, pairs, 7, 50000);
        REQUIRE(est.std_err.has_value());
        CHECK(std::abs(est.value - exact) <= 3.0 * *est.std_err);
        // argmin form
        const auto mu_a = make_alpha(3);
        const auto qa = extreme_measure(column_sample(fx.scenarios, 1), mu_a);
        const auto cka = contact_measure(fx.scenarios.weights, qa.q, 0.06);
        const double exact_a = nbc_price(claim, cka, fx.scenarios);
        const auto est_a = empirical_price(claim, mu_a, 0.06, pairs, 8, 50000);
        CHECK(std::abs(est_a.value - exact_a) <= 3.0 * *est_a.std_err);
    }
    SECTION("sampler overload is deterministic given the seed") {
        const auto claim = make_call(0, 100.0, 99.0);
        const auto sampler = make_pair_sampler(pairs.x, pairs.y, pairs.nu);
        const auto a = empirical_price(claim, make_beta(3, 1), 0.06, sampler, 21, 2000);
        const auto b = empirical_price(claim, make_beta(3, 1), 0.06, sampler, 21, 2000);
        CHECK(a.value == b.value);
        REQUIRE(a.std_err.has_value());
        CHECK(*a.std_err == *b.std_err);
    }
    SECTION("parameter and source mismatches are rejected") {
        const auto claim = make_call(0, 100.0, 99.0);
        CHECK_THROWS_AS(empirical_price(claim, make_beta_family(2.5, 1.2), 0.05, pairs, 0, 100),
                        std::invalid_argument);
        CHECK_THROWS_AS(empirical_price(claim, make_beta(3, 2), 0.05, pairs, 0, 0),
                        std::invalid_argument);
        const auto sampler = make_pair_sampler(pairs.x, pairs.y, pairs.nu);
        CHECK_THROWS_AS(empirical_price(claim, fx.mu, 0.05, sampler, 0, 100),
                        std::invalid_argument);
    }
}

TEST_CASE("risk adjustment") {
    Fixture fx;
    SECTION("r_star zero gives a zero adjustment") {
        Fixture fz(0.0);
        const auto claim = make_call(0, 100.0, 100.0);
        const auto adj = risk_adjustment(claim, fz.kernel, fz.scenarios);
        CHECK(adj.exact == 0.0);
        CHECK(adj.first_order == 0.0);
    }
    SECTION("constant payoffs have zero adjustment") {
        const auto claim = make_custom(0, 100.0, [](double) { return 9.0; });
        const auto adj = risk_adjustment(claim, fx.kernel, fx.scenarios);
        CHECK(adj.exact == Catch::Approx(0.0).margin(1e-13));
        CHECK(adj.first_order == Catch::Approx(0.0).margin(1e-13));
    }
    SECTION("exact equals the price gap and first order is within O(r_star^2)") {
        const auto claim = make_put(0, 100.0, 103.0);
        const auto adj = risk_adjustment(claim, fx.kernel, fx.scenarios);
        double ep = 0.0;
        for (int t = 0; t < 3; ++t)
            ep += fx.scenarios.weights[t] *
                  std::max(103.0 - 100.0 * (1.0 + fx.scenarios.outcomes(t, 0)), 0.0);
        CHECK(adj.exact ==
              Catch::Approx(nbc_price(claim, fx.kernel, fx.scenarios) - ep).margin(1e-13));
    }
    SECTION("gap between exact and first order scales like r_star squared") {
        const auto claim = make_call(0, 100.0, 100.0);
        std::vector<double> gaps;
        for (double r_star : {0.01, 0.02, 0.04}) {
            Fixture f(r_star);
            const auto adj = risk_adjustment(claim, f.kernel, f.scenarios);
            gaps.push_back(std::abs(adj.exact - adj.first_order));
        }
        CHECK(gaps[1] / gaps[0] == Catch::Approx(4.0).epsilon(0.2));
        CHECK(gaps[2] / gaps[1] == Catch::Approx(4.0).epsilon(0.2));
    }
    SECTION("absolute continuity violations are rejected") {
        Fixture fz;
        ScenarioSet s = fz.scenarios;
        s.weights = {0.0, 0.6, 0.4}; // kernel q puts mass on the zero-weight scenario
        ContactKernel ck = fz.kernel;
        const auto claim = make_call(0, 100.0, 100.0);
        CHECK_THROWS_AS(risk_adjustment(claim, ck, s), std::invalid_argument);
    }
}
