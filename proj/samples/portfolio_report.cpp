// Minimal library walkthrough: load a return history, solve the frontier
// problem, and price a call on one of the assets under the contact measure.
//
//   ./portfolio_report samples/data/returns_small.csv

#include <cstdio>

#include <crisk/crisk.hpp>

int main(int argc, char** argv) {
    using namespace crisk;
    const std::string path = argc > 1 ? argv[1] : "samples/data/returns_small.csv";

    MarketModel market;
    market.scenarios = load_returns(path, CsvOptions{std::string("IDX")});
    market.risk_free = 0.001;
    market.spot.assign(market.scenarios.asset_count(), 1.0);

    const auto mu = make_tail(0.1);
    std::printf("loaded %zu scenarios x %zu assets, measure %s\n",
                market.scenarios.scenario_count(), market.scenarios.asset_count(),
                describe(mu).c_str());

    const Matrix pnl = market_pnl(market);
    for (std::size_t i = 0; i < pnl.cols; ++i) {
        const double rho = spectral_risk(Sample{pnl.col(i), market.scenarios.weights}, mu);
        std::printf("  rho[%s] = %.6f\n", market.scenarios.labels[i].c_str(), rho);
    }

    const auto res = optimize(market, mu);
    std::printf("frontier slope R* = %.6f after %ld iterations\n", res.r_star, res.iterations);
    for (std::size_t i = 0; i < res.h_star.h.size(); ++i)
        std::printf("  h*[%s] = %.6f\n", market.scenarios.labels[i].c_str(), res.h_star.h[i]);

    const auto ck =
        contact_measure(market.scenarios.weights, res.extreme_weights, res.r_star);
    const auto claim = make_call(0, 1.0, 1.0); // at-the-money call on the first asset
    std::printf("NBC price of an ATM call on %s: %.6f (sensitivity %.6f)\n",
                market.scenarios.labels[0].c_str(), nbc_price(claim, ck, market.scenarios),
                nbc_sensitivity(claim, ck, market.scenarios).value);
    return 0;
}
