// Command-line front end: ingest a portfolio, run the exact enumerator, the
// Monte Carlo baseline, the register-level tail pipeline, or the closed-form
// budget calculators, and emit deterministic text reports (scalars as
// "key value" lines, tables as CSV blocks).
//
// Exit codes: 0 success, 2 validation error, 3 state-space/schedule guard
// exceeded, 4 statistical acceptance failure.

#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qrc/amplify.hpp"
#include "qrc/budget.hpp"
#include "qrc/estimator.hpp"
#include "qrc/io.hpp"
#include "qrc/mc.hpp"
#include "qrc/model.hpp"
#include "qrc/numerics.hpp"
#include "qrc/oracles.hpp"
#include "qrc/qsim.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 20240615;

std::string fmt(double v) { return qrc::format_double_sci(v, 12); }

// Options shared by every portfolio-consuming subcommand.
struct InstanceOptions {
    std::string portfolio_path;
    std::size_t grid_points = 16;
    double half_width = 4.0;
    std::optional<double> alpha;
    std::optional<double> threshold;

    void attach(CLI::App* cmd, bool need_tail_selector) {
        cmd->add_option("--portfolio", portfolio_path, "portfolio JSON file")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--grid-points", grid_points, "systemic-factor grid size (>= 2)")
            ->capture_default_str();
        cmd->add_option("--half-width", half_width, "grid half width D (> 0)")
            ->capture_default_str();
        auto* a = cmd->add_option("--alpha", alpha, "tail level for value-at-risk");
        auto* v = cmd->add_option("--threshold", threshold, "loss threshold v");
        if (need_tail_selector) {
            a->check(CLI::Range(1e-12, 1.0 - 1e-12));
            (void)v;
        }
    }
};

struct EstimatorOptions {
    std::string mode = "exact";  // exact | surrogate | ae
    double eps = 0.1;
    double delta = 0.01;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int format_bits = 32;
    int fraction_bits = 24;
    int shots = 100;
    std::optional<double> p_lower;

    void attach(CLI::App* cmd, bool with_seed = true) {
        cmd->add_option("--estimator", mode, "estimator mode")
            ->check(CLI::IsMember({"exact", "surrogate", "ae"}))
            ->capture_default_str();
        cmd->add_option("--eps", eps, "target absolute accuracy")->capture_default_str();
        cmd->add_option("--delta", delta, "failure-probability budget")->capture_default_str();
        if (with_seed)
            cmd->add_option("--seed", seed, "RNG seed (default: QRC_SEED or built-in)")
                ->each([this](const std::string&) { seed_given = true; });
        cmd->add_option("--format-bits", format_bits, "fixed-point register width")
            ->capture_default_str();
        cmd->add_option("--fraction-bits", fraction_bits, "fixed-point fraction bits")
            ->capture_default_str();
        cmd->add_option("--shots", shots, "shots per amplitude-estimation level")
            ->capture_default_str();
        cmd->add_option("--p-lower", p_lower,
                        "known lower bound on the tail probability (default: the oracle's "
                        "own tail mass)");
    }

    std::uint64_t resolved_seed() const {
        return seed_given ? seed : qrc::seed_from_env_or(kDefaultSeed);
    }
};

struct McOptions {
    std::size_t samples = 100000;
    std::string x0_mode = "polar";  // polar | approx | grid
    std::uint64_t seed = 0;
    bool seed_given = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--samples", samples,
                        "scenario count (VaR) or requested tail hits (contributions)")
            ->capture_default_str();
        cmd->add_option("--x0-mode", x0_mode, "systemic-factor sampling mode")
            ->check(CLI::IsMember({"polar", "approx", "grid"}))
            ->capture_default_str();
        cmd->add_option("--seed", seed, "RNG seed (default: QRC_SEED or built-in)")
            ->each([this](const std::string&) { seed_given = true; });
    }

    qrc::X0Mode mode() const {
        if (x0_mode == "polar") return qrc::X0Mode::ExactPolar;
        if (x0_mode == "approx") return qrc::X0Mode::ApproxInverseCdf;
        return qrc::X0Mode::Grid;
    }

    std::uint64_t resolved_seed() const {
        return seed_given ? seed : qrc::seed_from_env_or(kDefaultSeed);
    }
};

std::string optional_str(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string("-");
}

// Canonical config block: echoed verbatim into the report and hashed so a
// report names the exact inputs (portfolio by content, not by path) that
// produced it.
std::string config_block(const std::string& subcommand, const std::string& portfolio_text,
                         const std::vector<std::pair<std::string, std::string>>& fields) {
    std::string block = "subcommand " + subcommand + "\n";
    if (!portfolio_text.empty())
        block += "portfolio_blob " + qrc::git_blob_sha1(portfolio_text) + "\n";
    for (const auto& [k, v] : fields) block += k + " " + v + "\n";
    return block;
}

void print_config(std::ostream& out, const std::string& block) {
    out << "# config\n" << block << "config_hash " << qrc::git_blob_sha1(block) << "\n";
}

qrc::ExactQuery make_query(const InstanceOptions& inst) {
    if (!inst.alpha && !inst.threshold)
        throw std::invalid_argument("need --alpha and/or --threshold");
    qrc::ExactQuery q;
    q.alpha = inst.alpha;
    q.threshold = inst.threshold;
    return q;
}

void print_risk_report(std::ostream& out, const qrc::RiskReport& report) {
    out << "# risk\n";
    if (report.var_level) out << "alpha " << fmt(*report.var_level) << "\n";
    if (report.var) out << "var " << fmt(*report.var) << "\n";
    out << "cvar_threshold " << fmt(report.cvar_threshold) << "\n";
    out << "tail_prob " << fmt(report.tail_prob) << "\n";
    out << "cvar " << fmt(report.cvar) << "\n";
    out << "# contributions\n";
    const bool with_var = !report.var_contribs.empty();
    out << (with_var ? "group,cvar_contrib,var_contrib\n" : "group,cvar_contrib\n");
    for (std::size_t g = 0; g < report.cvar_contribs.size(); ++g) {
        out << (g + 1) << ',' << fmt(report.cvar_contribs[g]);
        if (with_var) out << ',' << fmt(report.var_contribs[g]);
        out << '\n';
    }
}

int run_exact(const InstanceOptions& inst, std::ostream& out) {
    const std::string text = qrc::read_file(inst.portfolio_path);
    const qrc::PortfolioInput input = qrc::parse_portfolio_json(text);
    const qrc::DiscreteSN grid = qrc::discretize_std_normal(inst.grid_points, inst.half_width);
    const qrc::ExactQuery query = make_query(inst);

    const std::string block =
        config_block("exact", text,
                     {{"grid_points", std::to_string(inst.grid_points)},
                      {"half_width", fmt(inst.half_width)},
                      {"alpha", optional_str(inst.alpha)},
                      {"threshold", optional_str(inst.threshold)}});
    print_config(out, block);

    const qrc::RiskReport report = qrc::enumerate_exact(input.portfolio, grid, input.groups, query);
    print_risk_report(out, report);
    return 0;
}

int run_mc(const InstanceOptions& inst, const McOptions& mc, std::ostream& out) {
    const std::string text = qrc::read_file(inst.portfolio_path);
    const qrc::PortfolioInput input = qrc::parse_portfolio_json(text);
    if (!inst.alpha && !inst.threshold)
        throw std::invalid_argument("need --alpha and/or --threshold");
    const qrc::DiscreteSN grid = qrc::discretize_std_normal(inst.grid_points, inst.half_width);
    const qrc::DiscreteSN* grid_ptr = mc.mode() == qrc::X0Mode::Grid ? &grid : nullptr;

    const std::uint64_t seed = mc.resolved_seed();
    const std::string block =
        config_block("mc", text,
                     {{"grid_points", std::to_string(inst.grid_points)},
                      {"half_width", fmt(inst.half_width)},
                      {"alpha", optional_str(inst.alpha)},
                      {"threshold", optional_str(inst.threshold)},
                      {"samples", std::to_string(mc.samples)},
                      {"x0_mode", mc.x0_mode},
                      {"seed", std::to_string(seed)}});
    print_config(out, block);

    qrc::McConfig config;
    config.seed = seed;
    config.samples = mc.samples;
    config.x0_mode = mc.mode();

    std::optional<double> threshold = inst.threshold;
    if (inst.alpha) {
        const qrc::McValueEstimate var =
            qrc::estimate_var(input.portfolio, *inst.alpha, config, grid_ptr);
        out << "# value_at_risk\n";
        out << "alpha " << fmt(*inst.alpha) << "\n";
        out << "var " << fmt(var.value) << "\n";
        out << "var_std_error " << fmt(var.std_error) << "\n";
        out << "scenarios " << var.ledger.scenarios << "\n";
        if (!threshold) threshold = var.value;
    }
    if (threshold) {
        qrc::McConfig contrib_config = config;
        contrib_config.seed = seed + 1;  // independent stream from the VaR pass
        const qrc::McContribEstimate est = qrc::estimate_cvar_contribs(
            input.portfolio, input.groups, *threshold, contrib_config, grid_ptr);
        out << "# tail_contributions\n";
        out << "threshold " << fmt(*threshold) << "\n";
        out << "tail_prob_hat " << fmt(est.tail_prob_hat) << "\n";
        out << "tail_hits " << est.tail_hits << "\n";
        out << "scenarios " << est.ledger.scenarios << "\n";
        out << "normal_draws " << est.ledger.normal_draws << "\n";
        out << "bernoulli_draws " << est.ledger.bernoulli_draws << "\n";
        out << "group,estimate,std_error\n";
        for (std::size_t g = 0; g < est.values.size(); ++g)
            out << (g + 1) << ',' << fmt(est.values[g]) << ',' << fmt(est.std_errors[g]) << '\n';
    }
    return 0;
}

// The full register-level pipeline on one instance. Returns the estimate so
// `report` can juxtapose it with the other paths.
qrc::ContributionEstimate run_qsim_pipeline(const qrc::PortfolioInput& input,
                                            const qrc::DiscreteSN& grid, double threshold,
                                            const EstimatorOptions& est_opts, std::ostream& out) {
    const qrc::FixedPointFormat format(est_opts.format_bits, est_opts.fraction_bits);

    // Ground truth and regime constants from the exact enumerator.
    qrc::ExactQuery query;
    query.threshold = threshold;
    const qrc::RiskReport truth =
        qrc::enumerate_exact(input.portfolio, grid, input.groups, query);
    const qrc::TailMoments moments =
        qrc::exact_tail_moments(input.portfolio, grid, input.groups, threshold);

    double sigma_max_sq = 0.0, c_max = 0.0, e_max = 0.0;
    for (std::size_t g = 0; g < input.groups.n_groups(); ++g) {
        sigma_max_sq = std::max(sigma_max_sq, moments.sigma_sq[g]);
        c_max = std::max(c_max, std::abs(moments.m1[g]));
        e_max = std::max(e_max, moments.group_exposure[g]);
    }
    const double sigma_max = std::sqrt(sigma_max_sq);

    // Build the tail oracle and its amplified version under the residual cap.
    qrc::TailOracleSpec spec{input.portfolio, grid, threshold, format};
    qrc::TailOracle oracle = qrc::TailOracle::build(spec);
    const qrc::EpsPrimeBudget budget(est_opts.eps, c_max, sigma_max, e_max);
    const double p_lower = est_opts.p_lower.value_or(oracle.tail_prob());
    qrc::AmplifiedOracle amplified =
        qrc::AmplifiedOracle::build(std::move(oracle), p_lower, budget);

    qrc::QueryLedger sim_ledger;
    qrc::StateVector state = qrc::StateVector::zero_state(amplified.base().basis());
    amplified.apply(state, sim_ledger);
    const qrc::GroupPayload payload =
        qrc::GroupPayload::build(input.portfolio, input.groups, format);

    // Cost of one amplified preparation plus one payload read: the unit the
    // sample-based estimators are charged in.
    qrc::QueryLedger per_call = sim_ledger;
    qrc::ContributionEstimate exact_est = qrc::estimate_exact(state, payload, per_call);

    const std::uint64_t n =
        qrc::derive_n(sigma_max, input.groups.n_groups(), est_opts.delta, est_opts.eps);

    qrc::ContributionEstimate est;
    if (est_opts.mode == "exact") {
        est = exact_est;
        est.charged = per_call;
    } else if (est_opts.mode == "surrogate") {
        const qrc::VarianceStats vs = qrc::variance_stats(state, payload, moments);
        qrc::SurrogateParams params;
        params.n = n;
        params.delta = est_opts.delta;
        params.seed = est_opts.resolved_seed();
        est = qrc::estimate_surrogate(exact_est, vs.sigma_tilde_sq, vs.sigma_max_sq, params,
                                      per_call);
    } else {
        qrc::PerGroupAEParams params;
        params.eps = est_opts.eps;
        params.shots_per_level = est_opts.shots;
        params.seed = est_opts.resolved_seed();
        est = qrc::estimate_per_group_ae(amplified, payload, params);
    }

    out << "# pipeline\n";
    out << "threshold " << fmt(threshold) << "\n";
    out << "tail_prob_model " << fmt(amplified.base().tail_prob()) << "\n";
    out << "tail_prob_exact " << fmt(truth.tail_prob) << "\n";
    out << "sigma_max " << fmt(sigma_max) << "\n";
    out << "c_max " << fmt(c_max) << "\n";
    out << "e_max " << fmt(e_max) << "\n";
    out << "eps_prime_cap " << fmt(budget.cap()) << "\n";
    out << "eps_prime_realized " << fmt(est.eps_prime) << "\n";
    out << "schedule_length " << amplified.schedule().length << "\n";
    out << "schedule_delta " << fmt(amplified.schedule().delta) << "\n";
    out << "derived_n " << n << "\n";
    out << "estimator " << est_opts.mode << "\n";

    out << "# estimates\n";
    out << "group,estimate,truth,abs_error,eps\n";
    for (std::size_t g = 0; g < est.corrected.size(); ++g) {
        const double err = std::abs(est.corrected[g] - truth.cvar_contribs[g]);
        out << (g + 1) << ',' << fmt(est.corrected[g]) << ',' << fmt(truth.cvar_contribs[g])
            << ',' << fmt(err) << ',' << fmt(est_opts.eps) << '\n';
    }
    out << "# ledger simulated\n" << qrc::ledger_lines(sim_ledger);
    out << "# ledger charged\n" << qrc::ledger_lines(est.charged);
    return est;
}

int run_qsim(const InstanceOptions& inst, const EstimatorOptions& est_opts, std::ostream& out) {
    const std::string text = qrc::read_file(inst.portfolio_path);
    const qrc::PortfolioInput input = qrc::parse_portfolio_json(text);
    if (!inst.threshold)
        throw std::invalid_argument("qsim needs an explicit --threshold (the pipeline "
                                    "estimates tail contributions at a fixed v)");
    const qrc::DiscreteSN grid = qrc::discretize_std_normal(inst.grid_points, inst.half_width);

    const std::string block = config_block(
        "qsim", text,
        {{"grid_points", std::to_string(inst.grid_points)},
         {"half_width", fmt(inst.half_width)},
         {"threshold", optional_str(inst.threshold)},
         {"estimator", est_opts.mode},
         {"eps", fmt(est_opts.eps)},
         {"delta", fmt(est_opts.delta)},
         {"seed", std::to_string(est_opts.resolved_seed())},
         {"format_bits", std::to_string(est_opts.format_bits)},
         {"fraction_bits", std::to_string(est_opts.fraction_bits)},
         {"shots", std::to_string(est_opts.shots)}});
    print_config(out, block);
    run_qsim_pipeline(input, grid, *inst.threshold, est_opts, out);
    return 0;
}

struct BudgetOptions {
    qrc::RegimeParams params;
    double ratio_threshold = 10.0;
    std::vector<double> sweep_eps{0.2, 0.1, 0.05};
    std::vector<std::size_t> sweep_groups{1, 2, 4};

    void attach(CLI::App* cmd) {
        cmd->add_option("--sigma-max", params.sigma_max, "largest tail-conditional group sd")
            ->required();
        cmd->add_option("--eps", params.eps, "target accuracy")->required();
        cmd->add_option("--p", params.p, "tail probability")->required();
        cmd->add_option("--delta", params.delta, "failure budget")->required();
        cmd->add_option("--c-max", params.c_max, "largest contribution bound")->required();
        cmd->add_option("--e-max", params.e_max, "largest group exposure")->required();
        cmd->add_option("--n-groups", params.n_groups, "group count")->required();
        cmd->add_option("--n-obligors", params.n_obligors, "obligor count")->required();
        cmd->add_option("--pbar", params.pbar_def,
                        "typical conditional default probability (regime analysis)");
        cmd->add_option("--ebar", params.ebar, "typical exposure (regime analysis)");
        cmd->add_option("--ratio-threshold", ratio_threshold,
                        "dominance factor for the advantage verdict")
            ->capture_default_str();
        cmd->add_option("--sweep-eps", sweep_eps, "accuracies for the sweep table")
            ->capture_default_str();
        cmd->add_option("--sweep-groups", sweep_groups, "group counts for the sweep table")
            ->capture_default_str();
    }
};

int run_budget(const BudgetOptions& opts, std::ostream& out) {
    const std::string block = config_block(
        "budget", "",
        {{"sigma_max", fmt(opts.params.sigma_max)},
         {"eps", fmt(opts.params.eps)},
         {"p", fmt(opts.params.p)},
         {"delta", fmt(opts.params.delta)},
         {"c_max", fmt(opts.params.c_max)},
         {"e_max", fmt(opts.params.e_max)},
         {"n_groups", std::to_string(opts.params.n_groups)},
         {"n_obligors", std::to_string(opts.params.n_obligors)},
         {"pbar", fmt(opts.params.pbar_def)},
         {"ebar", fmt(opts.params.ebar)},
         {"ratio_threshold", fmt(opts.ratio_threshold)}});
    print_config(out, block);

    const qrc::BudgetPair q = qrc::quantum_budget(opts.params);
    const qrc::BudgetPair c = qrc::classical_budget(opts.params);
    out << "# budgets (leading order, constants 1)\n";
    out << "quantum_scenario_calls " << fmt(q.scenario_calls) << "\n";
    out << "quantum_arithmetic_calls " << fmt(q.arithmetic_calls) << "\n";
    out << "classical_scenario_calls " << fmt(c.scenario_calls) << "\n";
    out << "classical_arithmetic_calls " << fmt(c.arithmetic_calls) << "\n";

    const qrc::AdvantageVerdict basic =
        qrc::advantage_condition(opts.params, opts.ratio_threshold);
    out << "# advantage (direct)\n";
    out << "lhs " << fmt(basic.lhs) << "\n";
    out << "rhs " << fmt(basic.rhs) << "\n";
    out << "quantum_favored " << (basic.quantum_favored ? 1 : 0) << "\n";

    if (opts.params.pbar_def > 0.0 && opts.params.ebar > 0.0) {
        const qrc::AdvantageVerdict regime =
            qrc::advantage_condition_regime(opts.params, opts.ratio_threshold);
        out << "# advantage (regime substitutions)\n";
        out << "lhs " << fmt(regime.lhs) << "\n";
        out << "rhs " << fmt(regime.rhs) << "\n";
        out << "quantum_favored " << (regime.quantum_favored ? 1 : 0) << "\n";
        out << "note " << regime.note << "\n";
    }

    out << "# sweep\n";
    out << "eps,n_groups,quantum_scenario,quantum_arithmetic,classical_scenario,"
           "classical_arithmetic\n";
    for (const auto& row : qrc::budget_sweep(opts.params, opts.sweep_eps, opts.sweep_groups)) {
        out << fmt(row.eps) << ',' << row.n_groups << ',' << fmt(row.quantum_scenario_calls)
            << ',' << fmt(row.quantum_arithmetic_calls) << ','
            << fmt(row.classical_scenario_calls) << ',' << fmt(row.classical_arithmetic_calls)
            << '\n';
    }
    return 0;
}

int run_report(const InstanceOptions& inst, const McOptions& mc, const EstimatorOptions& est_opts,
               std::ostream& out) {
    const std::string text = qrc::read_file(inst.portfolio_path);
    const qrc::PortfolioInput input = qrc::parse_portfolio_json(text);
    if (!inst.threshold)
        throw std::invalid_argument("report needs an explicit --threshold");
    const qrc::DiscreteSN grid = qrc::discretize_std_normal(inst.grid_points, inst.half_width);

    const std::string block = config_block(
        "report", text,
        {{"grid_points", std::to_string(inst.grid_points)},
         {"half_width", fmt(inst.half_width)},
         {"alpha", optional_str(inst.alpha)},
         {"threshold", optional_str(inst.threshold)},
         {"samples", std::to_string(mc.samples)},
         {"x0_mode", mc.x0_mode},
         {"estimator", est_opts.mode},
         {"eps", fmt(est_opts.eps)},
         {"delta", fmt(est_opts.delta)},
         {"seed", std::to_string(est_opts.resolved_seed())},
         {"format_bits", std::to_string(est_opts.format_bits)},
         {"fraction_bits", std::to_string(est_opts.fraction_bits)}});
    print_config(out, block);

    // Exact baseline.
    qrc::ExactQuery query;
    query.alpha = inst.alpha;
    query.threshold = inst.threshold;
    const qrc::RiskReport truth = qrc::enumerate_exact(input.portfolio, grid, input.groups, query);
    print_risk_report(out, truth);

    // Monte Carlo baseline at the same threshold, grid-matched by default so
    // the two classical paths estimate the same discretized quantity.
    qrc::McConfig config;
    config.seed = mc.resolved_seed();
    config.samples = mc.samples;
    config.x0_mode = mc.mode();
    const qrc::DiscreteSN* grid_ptr = config.x0_mode == qrc::X0Mode::Grid ? &grid : nullptr;
    const qrc::McContribEstimate mc_est = qrc::estimate_cvar_contribs(
        input.portfolio, input.groups, *inst.threshold, config, grid_ptr);
    out << "# monte_carlo\n";
    out << "tail_prob_hat " << fmt(mc_est.tail_prob_hat) << "\n";
    out << "tail_hits " << mc_est.tail_hits << "\n";
    out << "scenarios " << mc_est.ledger.scenarios << "\n";
    out << "group,estimate,std_error,abs_error_vs_exact\n";
    for (std::size_t g = 0; g < mc_est.values.size(); ++g)
        out << (g + 1) << ',' << fmt(mc_est.values[g]) << ',' << fmt(mc_est.std_errors[g]) << ','
            << fmt(std::abs(mc_est.values[g] - truth.cvar_contribs[g])) << '\n';

    // Register-level pipeline.
    run_qsim_pipeline(input, grid, *inst.threshold, est_opts, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"credit-portfolio tail-risk toolkit: exact enumeration, Monte Carlo, "
                 "register-level simulation, and query budgets"};
    app.require_subcommand(1);

    InstanceOptions exact_inst;
    auto* cmd_exact = app.add_subcommand("exact", "exhaustive enumeration ground truth");
    exact_inst.attach(cmd_exact, true);

    InstanceOptions mc_inst;
    McOptions mc_opts;
    auto* cmd_mc = app.add_subcommand("mc", "classical Monte Carlo baseline");
    mc_inst.attach(cmd_mc, true);
    mc_opts.attach(cmd_mc);

    InstanceOptions qsim_inst;
    EstimatorOptions qsim_est;
    auto* cmd_qsim = app.add_subcommand("qsim", "register-level tail pipeline");
    qsim_inst.attach(cmd_qsim, false);
    qsim_est.attach(cmd_qsim);

    BudgetOptions budget_opts;
    auto* cmd_budget = app.add_subcommand("budget", "closed-form query budgets");
    budget_opts.attach(cmd_budget);

    InstanceOptions report_inst;
    McOptions report_mc;
    EstimatorOptions report_est;
    auto* cmd_report = app.add_subcommand("report", "end-to-end comparison report");
    report_inst.attach(cmd_report, false);
    report_mc.attach(cmd_report);
    report_est.attach(cmd_report, /*with_seed=*/false);  // one --seed drives both paths

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_exact->parsed()) return run_exact(exact_inst, std::cout);
        if (cmd_mc->parsed()) return run_mc(mc_inst, mc_opts, std::cout);
        if (cmd_qsim->parsed()) return run_qsim(qsim_inst, qsim_est, std::cout);
        if (cmd_budget->parsed()) return run_budget(budget_opts, std::cout);
        if (cmd_report->parsed()) {
            report_est.seed = report_mc.resolved_seed();
            report_est.seed_given = true;
            return run_report(report_inst, report_mc, report_est, std::cout);
        }
    } catch (const qrc::guard_error& e) {
        std::cerr << "guard: " << e.what() << "\n";
        return 3;
    } catch (const qrc::stat_error& e) {
        std::cerr << "statistics: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
