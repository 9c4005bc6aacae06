// crisk: batch CLI over discrete scenario data. Wires ingestion, scenario
// generation, spectral risk, contributions, frontier optimization, SML,
// equilibrium, and NBC pricing into reproducible runs.
//
// Exit status: 0 success, 2 usage/config error, 3 numerical non-convergence,
// 4 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <crisk/crisk.hpp>

namespace {

using namespace crisk;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(long v) { return std::to_string(v); }

// Plain-text reports are aligned tables; --csv switches to comma-separated
// rows with key/value notes as '#' comment lines.
class Report {
public:
    explicit Report(bool csv) : csv_(csv) {}

    void note(const std::string& key, const std::string& value) {
        if (csv_)
            out_ << "# " << key << "=" << value << "\n";
        else
            out_ << key << ": " << value << "\n";
    }

    void caption(const std::string& text) {
        if (csv_)
            out_ << "# " << text << "\n";
        else
            out_ << "\n" << text << "\n";
    }

    void table(const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
        if (csv_) {
            out_ << join(header, ",") << "\n";
            for (const auto& r : rows) out_ << join(r, ",") << "\n";
            return;
        }
        std::vector<std::size_t> width(header.size(), 0);
        for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
        for (const auto& r : rows)
            for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
        auto emit = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (c) out_ << "  ";
                out_ << cells[c];
                if (c + 1 < cells.size())
                    out_ << std::string(width[c] - cells[c].size(), ' ');
            }
            out_ << "\n";
        };
        emit(header);
        for (const auto& r : rows) emit(r);
    }

    void blank() { out_ << "\n"; }

    void write(const std::string& out_path) const {
        if (out_path.empty()) {
            std::cout << out_.str();
            return;
        }
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw data_error("cannot open output file '" + out_path + "'");
        f << out_.str();
    }

private:
    static std::string join(const std::vector<std::string>& v, const char* sep) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += sep;
            s += v[i];
        }
        return s;
    }

    bool csv_;
    std::ostringstream out_;
};

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw CLI::ValidationError(std::string(what) + ": bad number '" + tok + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError(std::string(what) + ": empty list");
    return out;
}

WeightingMeasure parse_measure(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    try {
        if (family == "tail") return make_tail(std::stod(args));
        if (family == "alpha") return make_alpha(std::stoi(args));
        if (family == "beta") {
            const auto comma = args.find(',');
            if (comma == std::string::npos) throw std::invalid_argument(args);
            const double a = std::stod(args.substr(0, comma));
            const double b = std::stod(args.substr(comma + 1));
            if (a == std::round(a) && b == std::round(b))
                return make_beta(static_cast<int>(a), static_cast<int>(b));
            return make_beta_family(a, b);
        }
        if (family == "atomic") {
            std::vector<WeightAtom> atoms;
            std::stringstream ss(args);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) throw std::invalid_argument(tok);
                atoms.push_back(WeightAtom{std::stod(tok.substr(0, eq)),
                                           std::stod(tok.substr(eq + 1))});
            }
            return make_atomic(std::move(atoms));
        }
    } catch (const CLI::Error&) {
        throw;
    } catch (const std::exception& e) {
        throw CLI::ValidationError("--measure " + spec + ": " + e.what());
    }
    throw CLI::ValidationError("--measure: unknown family '" + family +
                               "' (want tail:<l>, alpha:<a>, beta:<a>,<b>, atomic:<l>=<w>,...)");
}

struct CommonOpts {
    std::string data_path;
    std::string index_label;
    double rf = 0.0;
    std::string spots_text;
    std::string measure_text = "tail:0.05";
    std::string gen_text = "hist";
    double boot_recency = 0.0; // 0 = off
    std::uint64_t seed = 0;
    bool csv = false;
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_data = true) {
    auto* data = cmd->add_option("--data", o.data_path, "return history CSV (date,<label>,...)");
    if (need_data) data->required();
    cmd->add_option("--index", o.index_label, "label of the market index asset");
    cmd->add_option("--rf", o.rf, "risk-free rate per unit period (default 0)");
    cmd->add_option("--spots", o.spots_text,
                    "comma-separated spot prices, one per asset (default 1 each)");
    cmd->add_option("--measure", o.measure_text,
                    "risk measure: tail:<l> | alpha:<a> | beta:<a>,<b> | atomic:<l>=<w>,... "
                    "(default tail:0.05)");
    cmd->add_option("--gen", o.gen_text,
                    "scenario generation: hist | whist:<lambda> | boot:<n>,<T> | mc | mc:<T> "
                    "(default hist)");
    cmd->add_option("--boot-recency", o.boot_recency,
                    "geometric draw bias toward recent rows for --gen boot");
    cmd->add_option("--seed", o.seed, "random seed for generation and estimators (default 0)");
    cmd->add_flag("--csv", o.csv, "machine-readable comma-separated output");
    cmd->add_option("--out", o.out_path, "write the report to this file instead of stdout");
}

ScenarioSet apply_generation(ScenarioSet s, const CommonOpts& o) {
    const std::string& g = o.gen_text;
    const auto colon = g.find(':');
    const std::string kind = g.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : g.substr(colon + 1);
    if (kind == "hist") {
        if (!args.empty()) throw CLI::ValidationError("--gen hist takes no arguments");
        return s;
    }
    try {
        if (kind == "whist") return weight_geometric(s, std::stod(args));
        if (kind == "boot") {
            const auto comma = args.find(',');
            if (comma == std::string::npos) throw std::invalid_argument(args);
            const int n = std::stoi(args.substr(0, comma));
            const int t_out = std::stoi(args.substr(comma + 1));
            std::optional<double> recency;
            if (o.boot_recency > 0.0) recency = o.boot_recency;
            return bootstrap(s, n, t_out, o.seed, recency);
        }
        if (kind == "mc") {
            const int t_out =
                args.empty() ? static_cast<int>(s.scenario_count()) : std::stoi(args);
            auto hook = fit_gaussian_hook(s);
            ScenarioSet out = monte_carlo(hook, s.labels, t_out, o.seed);
            out.index_col = s.index_col;
            out.units = s.units;
            out.period = s.period;
            return out;
        }
    } catch (const CLI::Error&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("--gen " + g + ": " + e.what());
    }
    throw CLI::ValidationError("--gen: unknown method '" + kind + "'");
}

MarketModel build_model(const CommonOpts& o) {
    CsvOptions copts;
    if (!o.index_label.empty()) copts.index_label = o.index_label;
    ScenarioSet s = load_returns(o.data_path, copts);
    s = apply_generation(std::move(s), o);
    MarketModel m;
    m.risk_free = o.rf;
    if (o.spots_text.empty()) {
        m.spot.assign(s.asset_count(), 1.0);
    } else {
        m.spot = parse_number_list(o.spots_text, "--spots");
        if (m.spot.size() != s.asset_count())
            throw CLI::ValidationError("--spots: expected " + std::to_string(s.asset_count()) +
                                       " entries");
    }
    m.scenarios = std::move(s);
    validate_market(m);
    return m;
}

std::vector<double> parse_portfolio(const std::string& text, std::size_t d) {
    auto h = parse_number_list(text, "--portfolio");
    if (h.size() != d)
        throw CLI::ValidationError("--portfolio: expected " + std::to_string(d) + " holdings");
    return h;
}

int cmd_risk(const CommonOpts& o, const std::string& portfolio_text) {
    const MarketModel m = build_model(o);
    const auto mu = parse_measure(o.measure_text);
    const Matrix pnl = market_pnl(m);

    Report rep(o.csv);
    rep.note("measure", describe(mu));
    rep.note("scenarios", fmt(m.scenarios.scenario_count()));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < pnl.cols; ++i) {
        const double rho = spectral_risk(Sample{pnl.col(i), m.scenarios.weights}, mu);
        rows.push_back({m.scenarios.labels[i], fmt(rho)});
    }
    if (!portfolio_text.empty()) {
        const auto h = parse_portfolio(portfolio_text, pnl.cols);
        std::vector<double> w(pnl.rows, 0.0);
        for (std::size_t t = 0; t < pnl.rows; ++t)
            for (std::size_t i = 0; i < pnl.cols; ++i) w[t] += h[i] * pnl(t, i);
        rows.push_back(
            {"portfolio", fmt(spectral_risk(Sample{std::move(w), m.scenarios.weights}, mu))});
    }
    rep.table({"asset", "rho"}, rows);
    rep.write(o.out_path);
    return 0;
}

int cmd_contrib(const CommonOpts& o, long mc_k) {
    const MarketModel m = build_model(o);
    if (!m.scenarios.index_col)
        throw CLI::ValidationError("contrib: --index is required");
    const auto mu = parse_measure(o.measure_text);

    const auto* bf = std::get_if<BetaFamilyWeighting>(&mu);
    const bool mc_ok = bf != nullptr && bf->alpha == std::round(bf->alpha) &&
                       bf->beta == std::round(bf->beta) && bf->beta >= 1.0;
    if (mc_k > 0 && !mc_ok)
        throw CLI::ValidationError(
            "--mc-k: Monte Carlo estimators need an integer beta:<a>,<b> or alpha:<a> measure");

    const Sample index = column_sample(m.scenarios, *m.scenarios.index_col);

    Report rep(o.csv);
    rep.note("measure", describe(mu));
    rep.note("index", m.scenarios.labels[*m.scenarios.index_col]);
    std::vector<std::string> header = {"asset", "rho_c", "eq_dpnl"};
    if (mc_k > 0) {
        header.push_back("mc_rho_c");
        header.push_back("mc_std_err");
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < m.scenarios.asset_count(); ++i) {
        const auto asset_returns = m.scenarios.outcomes.col(i);
        const double rc = risk_contribution(asset_returns, index, mu);
        const double reward = reward_estimate(m, mu, i);
        std::vector<std::string> row = {m.scenarios.labels[i], fmt(rc), fmt(reward)};
        if (mc_k > 0) {
            const auto sampler =
                make_pair_sampler(asset_returns, index.values, m.scenarios.weights);
            const int alpha = static_cast<int>(bf->alpha);
            const int beta = static_cast<int>(bf->beta);
            const McEstimate est =
                beta == 1 ? mc_contribution_alpha(sampler, alpha, mc_k, o.seed + i)
                          : mc_contribution_beta(sampler, alpha, beta, mc_k, o.seed + i);
            row.push_back(fmt(est.value));
            row.push_back(fmt(est.std_err));
        }
        rows.push_back(std::move(row));
    }
    rep.table(header, rows);
    rep.write(o.out_path);
    return 0;
}

SolverOptions solver_options(const CommonOpts& o, double tol, long max_iter) {
    SolverOptions sopts;
    sopts.objective_tol = tol;
    sopts.max_iterations = max_iter;
    sopts.seed = o.seed;
    return sopts;
}

int cmd_optimize(const CommonOpts& o, double tol, long max_iter, const std::string& frontier_text) {
    const MarketModel m = build_model(o);
    const auto mu = parse_measure(o.measure_text);
    const FrontierResult res = optimize(m, mu, solver_options(o, tol, max_iter));
    const auto residuals = sml_residuals(m, mu, res);

    Report rep(o.csv);
    rep.note("measure", describe(mu));
    rep.note("r_star", fmt(res.r_star));
    rep.note("risk_at_opt", fmt(res.risk_at_opt));
    rep.note("iterations", fmt(res.iterations));
    double max_res = 0.0;
    for (double r : residuals) max_res = std::max(max_res, std::abs(r));
    rep.note("max_sml_residual", fmt(max_res));
    rep.note("certificate_gap", fmt(res.certificate_gap));

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < m.scenarios.asset_count(); ++i)
        rows.push_back({m.scenarios.labels[i], fmt(res.h_star.h[i]),
                        fmt(res.generator_point[i]), fmt(residuals[i])});
    rep.caption("optimal portfolio (rho = 1)");
    rep.table({"asset", "h_star", "eq_dpnl", "sml_residual"}, rows);

    std::vector<double> cs = {0.0, 0.5, 1.0, 2.0};
    if (!frontier_text.empty()) cs = parse_number_list(frontier_text, "--frontier");
    const auto line = frontier(res, cs);
    std::vector<std::vector<std::string>> frows;
    for (const auto& [risk, reward] : line) frows.push_back({fmt(risk), fmt(reward)});
    rep.caption("efficient frontier");
    rep.table({"risk", "reward"}, frows);
    rep.write(o.out_path);
    return 0;
}

int cmd_sml(const CommonOpts& o, double tol, long max_iter) {
    const MarketModel m = build_model(o);
    const auto mu = parse_measure(o.measure_text);
    const FrontierResult res = optimize(m, mu, solver_options(o, tol, max_iter));
    const auto betas = sml_betas(m, mu, res);
    const auto residuals = sml_residuals(m, mu, res);

    // E_P excess returns for the fitted-vs-actual reward view
    Report rep(o.csv);
    rep.note("measure", describe(mu));
    rep.note("r_star", fmt(res.r_star));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < m.scenarios.asset_count(); ++i) {
        double excess = 0.0;
        for (std::size_t t = 0; t < m.scenarios.scenario_count(); ++t)
            excess += m.scenarios.weights[t] * (m.scenarios.outcomes(t, i) - m.risk_free);
        rows.push_back({m.scenarios.labels[i], fmt(betas[i]), fmt(excess), fmt(residuals[i])});
    }
    rep.table({"asset", "beta", "mean_excess_return", "sml_residual"}, rows);
    rep.write(o.out_path);
    return 0;
}

int cmd_equilibrium(const CommonOpts& o, const std::string& economy_path,
                    const std::string& portfolio_text, double market_value, double market_risk,
                    bool have_values) {
    const Economy economy = load_economy(economy_path);
    const double k = risk_tolerance_sum(economy);

    Report rep(o.csv);
    double r_star = 0.0;
    std::optional<Strategy> h_star;
    if (have_values) {
        r_star = equilibrium_rstar(economy, market_value, market_risk);
        rep.note("market_value", fmt(market_value));
        rep.note("market_risk", fmt(market_risk));
    } else {
        if (o.data_path.empty() || portfolio_text.empty())
            throw CLI::ValidationError(
                "equilibrium: need either --market-value and --market-risk, or --data and "
                "--portfolio");
        const MarketModel m = build_model(o);
        const auto mu = parse_measure(o.measure_text);
        h_star = Strategy{parse_portfolio(portfolio_text, m.scenarios.asset_count())};
        r_star = equilibrium_rstar(economy, m, mu, *h_star);
        rep.note("measure", describe(mu));
    }
    rep.note("r_star", fmt(r_star));
    rep.note("risk_tolerance_sum", fmt(k));
    rep.note("market_risk_budget", fmt(r_star * k));

    std::vector<std::string> header = {"agent", "endowment", "aversion", "risk_budget"};
    std::vector<Strategy> allocations;
    if (h_star) {
        allocations = agent_allocations(economy, *h_star);
        for (std::size_t i = 0; i < h_star->h.size(); ++i)
            header.push_back("h_" + std::to_string(i + 1));
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t n = 0; n < economy.agent_count(); ++n) {
        std::vector<std::string> row = {fmt(n + 1), fmt(economy.endowments[n]),
                                        fmt(economy.aversions[n]),
                                        fmt(r_star * economy.endowments[n] / economy.aversions[n])};
        if (h_star)
            for (double hv : allocations[n].h) row.push_back(fmt(hv));
        rows.push_back(std::move(row));
    }
    rep.table(header, rows);
    rep.write(o.out_path);
    return 0;
}

int cmd_price(const CommonOpts& o, const std::string& payoff_kind, double strike,
              const std::string& underlier_label, double spot, const std::string& payoff_file,
              double r_star, long mc_k) {
    const MarketModel m = build_model(o);
    if (!m.scenarios.index_col)
        throw CLI::ValidationError("price: --index is required");
    if (underlier_label.empty())
        throw CLI::ValidationError("price: --underlier is required");
    if (!(spot > 0.0)) throw CLI::ValidationError("price: --spot must be positive");
    if (!(r_star >= 0.0)) throw CLI::ValidationError("price: --rstar must be nonnegative");
    const auto mu = parse_measure(o.measure_text);
    const std::size_t underlier = find_label(m.scenarios, underlier_label);

    ClaimSpec claim;
    if (payoff_kind == "call") {
        claim = make_call(underlier, spot, strike);
    } else if (payoff_kind == "put") {
        claim = make_put(underlier, spot, strike);
    } else if (payoff_kind == "table") {
        if (payoff_file.empty())
            throw CLI::ValidationError("price: --payoff table needs --payoff-file");
        claim = make_tabulated(underlier, spot, load_payoff_table(payoff_file));
    } else {
        throw CLI::ValidationError("price: --payoff must be call, put, or table");
    }

    const Sample index = column_sample(m.scenarios, *m.scenarios.index_col);
    const auto q = extreme_measure(index, mu);
    const ContactKernel ck = contact_measure(m.scenarios.weights, q.q, r_star);

    const double v = nbc_price(claim, ck, m.scenarios);
    const SensitivityResult sens = nbc_sensitivity(claim, ck, m.scenarios);
    const RiskAdjustment adj = risk_adjustment(claim, ck, m.scenarios);

    const PairData pairs{m.scenarios.outcomes.col(underlier), index.values,
                         m.scenarios.weights};
    const bool mc_path = std::holds_alternative<BetaFamilyWeighting>(mu);
    const PriceEstimate emp = empirical_price(claim, mu, r_star, pairs, o.seed,
                                              mc_path ? (mc_k > 0 ? mc_k : 20000) : 0);

    Report rep(o.csv);
    rep.note("measure", describe(mu));
    rep.note("underlier", underlier_label);
    rep.note("spot", fmt(spot));
    rep.note("r_star", fmt(r_star));
    rep.note("payoff", payoff_kind + (payoff_kind == "table" ? "" : " strike=" + fmt(strike)));
    rep.note("nbc_price", fmt(v));
    rep.note("sensitivity", fmt(sens.value));
    if (sens.kink_hits > 0) rep.note("kink_scenarios", fmt(sens.kink_hits));
    rep.note("risk_adjustment_exact", fmt(adj.exact));
    rep.note("risk_adjustment_first_order", fmt(adj.first_order));
    rep.note("empirical_price", fmt(emp.value));
    if (emp.std_err) rep.note("empirical_std_err", fmt(*emp.std_err));
    rep.write(o.out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherent-risk portfolio analytics over discrete scenario data"};
    app.require_subcommand(1);

    CommonOpts risk_o, contrib_o, opt_o, sml_o, eq_o, price_o;
    std::string risk_portfolio;
    long contrib_mc_k = 0;
    double opt_tol = 1e-8, sml_tol = 1e-8;
    long opt_max_iter = 50000, sml_max_iter = 50000;
    std::string opt_frontier;
    std::string eq_economy, eq_portfolio;
    double eq_market_value = 0.0, eq_market_risk = 0.0;
    std::string price_payoff = "call", price_underlier, price_payoff_file;
    double price_strike = 0.0, price_spot = 1.0, price_rstar = 0.0;
    long price_mc_k = 0;

    auto* risk_cmd = app.add_subcommand("risk", "spectral risk per asset and portfolio");
    add_common(risk_cmd, risk_o);
    risk_cmd->add_option("--portfolio", risk_portfolio, "holdings, one per asset");

    auto* contrib_cmd =
        app.add_subcommand("contrib", "risk contributions to the index and Q-expected P&L");
    add_common(contrib_cmd, contrib_o);
    contrib_cmd->add_option("--mc-k", contrib_mc_k,
                            "add Monte Carlo estimator columns with this many groups");

    auto* opt_cmd = app.add_subcommand("optimize", "reward/risk frontier portfolio");
    add_common(opt_cmd, opt_o);
    opt_cmd->add_option("--tol", opt_tol, "relative objective tolerance (default 1e-8)");
    opt_cmd->add_option("--max-iter", opt_max_iter, "iteration budget (default 50000)");
    opt_cmd->add_option("--frontier", opt_frontier, "risk levels for the frontier table");

    auto* sml_cmd = app.add_subcommand("sml", "security market line betas and residuals");
    add_common(sml_cmd, sml_o);
    sml_cmd->add_option("--tol", sml_tol, "relative objective tolerance (default 1e-8)");
    sml_cmd->add_option("--max-iter", sml_max_iter, "iteration budget (default 50000)");

    auto* eq_cmd = app.add_subcommand("equilibrium", "equilibrium premium and agent allocations");
    add_common(eq_cmd, eq_o, /*need_data=*/false);
    eq_cmd->add_option("--economy", eq_economy, "agents CSV (endowment,aversion)")->required();
    eq_cmd->add_option("--portfolio", eq_portfolio, "market portfolio holdings");
    auto* mv = eq_cmd->add_option("--market-value", eq_market_value, "E_P<H*,S1>");
    auto* mr = eq_cmd->add_option("--market-risk", eq_market_risk, "rho(<H*,S1>)");
    mv->needs(mr);
    mr->needs(mv);

    auto* price_cmd = app.add_subcommand("price", "NBC price and sensitivity of a claim");
    add_common(price_cmd, price_o);
    price_cmd->add_option("--payoff", price_payoff, "call | put | table (default call)");
    price_cmd->add_option("--strike", price_strike, "strike for call/put payoffs");
    price_cmd->add_option("--underlier", price_underlier, "underlier asset label")->required();
    price_cmd->add_option("--spot", price_spot, "spot of the underlier (default 1)");
    price_cmd->add_option("--payoff-file", price_payoff_file,
                          "tabulated payoff CSV (S1,F), piecewise linear; the payoff column "
                          "must already be discounted");
    price_cmd->add_option("--rstar", price_rstar, "market reward/risk ratio (default 0)");
    price_cmd->add_option("--mc-k", price_mc_k,
                          "groups for the Beta/Alpha Monte Carlo estimator (default 20000)");

    try {
        app.parse(argc, argv);
        if (risk_cmd->parsed()) return cmd_risk(risk_o, risk_portfolio);
        if (contrib_cmd->parsed()) return cmd_contrib(contrib_o, contrib_mc_k);
        if (opt_cmd->parsed())
            return cmd_optimize(opt_o, opt_tol, opt_max_iter, opt_frontier);
        if (sml_cmd->parsed()) return cmd_sml(sml_o, sml_tol, sml_max_iter);
        if (eq_cmd->parsed())
            return cmd_equilibrium(eq_o, eq_economy, eq_portfolio, eq_market_value,
                                   eq_market_risk,
                                   mv->count() > 0 && mr->count() > 0);
        if (price_cmd->parsed())
            return cmd_price(price_o, price_payoff, price_strike, price_underlier, price_spot,
                             price_payoff_file, price_rstar, price_mc_k);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crisk::non_convergence_error& e) {
        std::cerr << "error: " << e.what() << " (iterations=" << e.iterations
                  << ", best_objective=" << e.best_objective << ", grad_norm=" << e.grad_norm
                  << ")\n";
        return 3;
    } catch (const crisk::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
