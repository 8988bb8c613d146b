// smpr: stationary Markov processes with polynomial regressions.
// Subcommands cover moment tables, orthonormal coefficients, continuity
// analysis, kernel evaluation and verification, Monte Carlo simulation,
// scaling-conjecture experiments, and a combined model report.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "smpr/continuity.hpp"
#include "smpr/kernels.hpp"
#include "smpr/marginals.hpp"
#include "smpr/model_file.hpp"
#include "smpr/orthopoly.hpp"
#include "smpr/quadrature.hpp"
#include "smpr/simulate.hpp"

namespace {

using nlohmann::json;
using namespace smpr;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw validation_error("cannot open output file: " + out_path);
    out << content;
}

json json_vector(const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1.0);
    return xs;
}

int run_moments(const std::string& spec_path, int order, const std::string& out_path) {
    const MarginalSpec spec = load_spec_file(spec_path);
    const auto raw = raw_moments(spec, order);
    const auto central = exact_central_moments(spec, order);
    std::ostringstream csv;
    csv << "order,raw,central\n";
    for (int j = 0; j <= order; ++j)
        csv << j << "," << fmt(raw[static_cast<size_t>(j)]) << ","
            << fmt(to_double(central[static_cast<size_t>(j)])) << "\n";
    write_output(out_path, csv.str());
    return 0;
}

int run_coeffs(const std::string& spec_path, int degree, const std::string& route,
               const std::string& out_path) {
    const MarginalSpec spec = load_spec_file(spec_path);
    CoeffMatrix c;
    if (route == "cholesky")
        c = basis_from_moments(spec, degree);
    else if (route == "closed")
        c = coeffs_from_expansion(spec, degree);
    else
        throw validation_error("route must be cholesky or closed");
    std::ostringstream csv;
    csv << "j,n,c\n";
    for (int j = 0; j <= degree; ++j)
        for (int n = 0; n <= j; ++n) csv << j << "," << n << "," << fmt(c.at(j, n)) << "\n";
    write_output(out_path, csv.str());
    return 0;
}

json admissibility_to_json(const AdmissibilityReport& adm) {
    json j;
    j["terms"] = adm.terms;
    j["concave"] = adm.concave;
    if (adm.concavity_violation_at) j["concavity_violation_at"] = *adm.concavity_violation_at;
    j["hankel_required"] = adm.hankel_required;
    j["hankel_even_ok"] = adm.hankel_even_ok;
    j["hankel_shifted_ok"] = adm.hankel_shifted_ok;
    j["hankel_min_eig"] = adm.hankel_min_eig;
    j["bimom_ok"] = adm.bimom_ok;
    j["bimom_min_eig"] = adm.bimom_min_eig;
    j["summable"] = adm.summable;
    j["tail_ratio"] = adm.tail_ratio;
    j["admissible"] = adm.admissible();
    j["note"] = "finite Hankel checks are necessary, not sufficient";
    return j;
}

int run_continuity(const std::string& spec_path, int k, const std::string& out_path) {
    const MarginalSpec spec = load_spec_file(spec_path);
    const CoeffMatrix c = basis_from_moments(spec, 2 * k);
    const ContinuityReport report = solve_alpha(c, k);

    json j;
    j["schema"] = 1;
    j["spec"] = spec_to_json(spec);
    j["continuity_coefficient"] = report.continuity_coefficient;
    j["k"] = report.k;
    j["ratios"] = json_vector(report.ratios);
    j["positive"] = report.positive;
    j["order_r"] = report.order_r;
    j["hoelder_bound"] = report.hoelder_bound;
    j["max_relative_residual"] = report.max_relative_residual;
    if (!report.other_roots.empty()) {
        json others = json::array();
        for (const auto& r : report.other_roots) others.push_back(json_vector(r));
        j["other_positive_roots"] = others;
    }
    j["harness"] = harness_detect(report, spec);
    const AlphaSequence alpha = AlphaSequence::from_ratios(report.ratios);
    j["admissibility"] =
        admissibility_to_json(alpha_admissibility(alpha, spec, {0.25, 1.0, 4.0}, k));
    write_output(out_path, j.dump(2) + "\n");
    return report.positive ? 0 : 1;
}

int run_kernel(const std::string& spec_path, const std::string& alpha_path, double t, int grid_n,
               bool closed_form, const std::string& out_path) {
    const MarginalSpec spec = load_spec_file(spec_path);
    const AlphaSequence alpha = load_alpha_file(alpha_path, spec);
    TransitionKernel kernel(spec, alpha, {},
                            closed_form ? KernelMode::ClosedForm : KernelMode::Series);
    const Support range = scan_range(spec);
    const std::vector<double> grid = linspace(range.lo, range.hi, grid_n);
    std::ostringstream csv;
    csv << "x,y,eta\n";
    const Eigen::MatrixXd ratios = kernel.ratio_grid(grid, grid, t);
    for (int i = 0; i < grid_n; ++i) {
        const double fx = density(spec, grid[static_cast<size_t>(i)]);
        for (int j = 0; j < grid_n; ++j)
            csv << fmt(grid[static_cast<size_t>(i)]) << "," << fmt(grid[static_cast<size_t>(j)])
                << "," << fmt(fx * ratios(i, j)) << "\n";
    }
    write_output(out_path, csv.str());
    return 0;
}

struct KernelSuiteResult {
    json report;
    bool pass = true;
};

KernelSuiteResult kernel_suite(const MarginalSpec& spec, const AlphaSequence& alpha,
                               int duality_grid, int max_martingale_n) {
    KernelSuiteResult result;
    TransitionKernel series(spec, alpha, {512, 1e-12}, KernelMode::Series);
    const Support range = scan_range(spec);
    const std::vector<double> grid = linspace(range.lo, range.hi, duality_grid);
    const std::vector<double> t_list = {0.1, 0.5, 2.0};

    if (series.closed_form_available()) {
        TransitionKernel closed(spec, alpha, {}, KernelMode::ClosedForm);
        double max_dev = 0.0;
        for (double t : t_list) {
            const Eigen::MatrixXd rs = series.ratio_grid(grid, grid, t);
            const Eigen::MatrixXd rc = closed.ratio_grid(grid, grid, t);
            for (int i = 0; i < rs.rows(); ++i) {
                const double fx = density(spec, grid[static_cast<size_t>(i)]);
                for (int j = 0; j < rs.cols(); ++j) {
                    const double w =
                        fx * (spec.family() == Family::Gaussian || spec.family() == Family::Gamma
                                  ? density(spec, grid[static_cast<size_t>(j)])
                                  : 1.0);
                    max_dev = std::max(max_dev, std::abs(rs(i, j) - rc(i, j)) * w);
                }
            }
        }
        result.report["duality_max_dev"] = max_dev;
        result.pass = result.pass && max_dev < 1e-7;
    }

    // pick interior probe points
    const double y0 = range.lo + 0.37 * (range.hi - range.lo);
    const double y1 = range.lo + 0.71 * (range.hi - range.lo);

    double row_dev = 0.0;
    const GaussRule rule = gauss_rule(spec, spec.family() == Family::Laplace ? 11 : 64);
    for (double t : {0.3, 1.0})
        for (double y : {y0, y1}) {
            double integral = 0.0;
            for (size_t i = 0; i < rule.nodes.size(); ++i)
                integral += rule.weights[i] * series.ratio(rule.nodes[i], y, t);
            row_dev = std::max(row_dev, std::abs(integral - 1.0));
        }
    result.report["row_integral_dev"] = row_dev;
    result.pass = result.pass && row_dev < 1e-6;

    double sym_dev = 0.0;
    for (double t : {0.3, 1.0})
        sym_dev = std::max(sym_dev,
                           std::abs(series.ratio(y0, y1, t) - series.ratio(y1, y0, t)));
    result.report["symmetry_dev"] = sym_dev;
    result.pass = result.pass && sym_dev < 1e-9;

    double ck = 0.0;
    for (auto [s, t] : {std::pair{0.3, 0.4}, std::pair{0.5, 0.5}})
        ck = std::max(ck, chapman_kolmogorov_check(series, s, t, y0, y1));
    result.report["chapman_kolmogorov_residual"] = ck;
    result.pass = result.pass && ck < 1e-6;

    double mart = 0.0;
    const int n_cap = std::min(max_martingale_n, series.basis().degree());
    for (int n = 0; n <= n_cap; ++n)
        mart = std::max(mart, martingale_check(series, n, y0, 0.4));
    result.report["martingale_residual"] = mart;
    result.report["martingale_max_n"] = n_cap;
    result.pass = result.pass && mart < 1e-7;

    result.report["pass"] = result.pass;
    return result;
}

int run_verify_kernel(const std::string& spec_path, const std::string& alpha_path,
                      const std::string& out_path) {
    const MarginalSpec spec = load_spec_file(spec_path);
    const AlphaSequence alpha = load_alpha_file(alpha_path, spec);
    KernelSuiteResult suite = kernel_suite(spec, alpha, 21, 8);
    json j;
    j["schema"] = 1;
    j["spec"] = spec_to_json(spec);
    j.update(suite.report);
    write_output(out_path, j.dump(2) + "\n");
    return suite.pass ? 0 : 2;
}

int run_simulate(const std::string& spec_path, const std::string& alpha_path, int paths,
                 double dt, double horizon, uint64_t seed, int grid, bool closed_form,
                 const std::string& out_path) {
    const MarginalSpec spec = load_spec_file(spec_path);
    const AlphaSequence alpha = load_alpha_file(alpha_path, spec);
    TransitionKernel kernel(spec, alpha, {},
                            closed_form ? KernelMode::ClosedForm : KernelMode::Series);
    SimConfig config{kernel, horizon, dt, paths, seed, grid};
    const PathEnsemble ens = simulate_paths(config);
    std::ostringstream csv;
    csv << "path,step,t,x\n";
    for (int p = 0; p < ens.paths; ++p)
        for (int i = 0; i <= ens.steps; ++i)
            csv << p << "," << i << "," << fmt(i * ens.dt) << "," << fmt(ens.at(p, i)) << "\n";
    write_output(out_path, csv.str());
    return 0;
}

json slope_section(const SlopeReport& report, const std::vector<int>& k_list) {
    json j;
    j["lags"] = json_vector(report.lags);
    json per_k = json::array();
    for (int k : k_list) {
        json entry;
        entry["k"] = k;
        json ests = json::array();
        for (const auto& e : report.for_k(k)) {
            json je;
            je["t"] = e.lag;
            je["moment"] = e.value;
            je["std_error"] = e.std_error;
            je["samples"] = e.samples;
            ests.push_back(je);
        }
        entry["estimates"] = ests;
        const SlopeFit fit = scaling_slope(report, k);
        entry["slope"] = fit.slope;
        entry["slope_ci"] = fit.ci_halfwidth;
        entry["lags_used"] = fit.lags_used;
        per_k.push_back(entry);
    }
    j["per_k"] = per_k;
    return j;
}

std::vector<double> conjecture_lags(double dt, double alpha1) {
    // small-t window [dt, 0.1/alpha1], geometric spacing
    const double lo = dt;
    const double hi = std::max(0.1 / alpha1, 10.0 * dt);
    std::vector<double> lags;
    for (int i = 0; i < 8; ++i) {
        const double t = lo * std::pow(hi / lo, i / 7.0);
        lags.push_back(std::max(dt, std::round(t / dt) * dt));
    }
    lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
    return lags;
}

int run_conjecture(const std::string& model_path, std::vector<int> k_list,
                   const std::string& route, int paths, double dt, double horizon, uint64_t seed,
                   const std::string& out_prefix) {
    const ResolvedModel model = load_model_file(model_path);
    if (k_list.empty()) k_list = {2, 3};

    json j;
    j["schema"] = 1;
    j["spec"] = spec_to_json(model.spec);
    j["route"] = route;

    SlopeReport report;
    if (route == "exact") {
        const int k_max = *std::max_element(k_list.begin(), k_list.end());
        const CoeffMatrix c = basis_from_moments(model.spec, 2 * k_max);
        report.k_list = k_list;
        report.lags = conjecture_lags(dt, model.alpha.scale());
        for (int k : k_list) {
            const IncrementExpansion exp = increment_expansion(c, k);
            std::vector<MomentEstimate> ests;
            for (double t : report.lags) {
                MomentEstimate e;
                e.lag = t;
                e.value = exp.value(t, model.alpha);
                ests.push_back(e);
            }
            report.estimates.push_back(std::move(ests));
        }
    } else if (route == "mc") {
        TransitionKernel kernel = model.make_kernel();
        SimConfig config{kernel, horizon, dt, paths, seed, 512};
        const PathEnsemble ens = simulate_paths(config);
        report = empirical_increment_moments(ens, k_list, conjecture_lags(dt, model.alpha.scale()));
    } else {
        throw validation_error("route must be exact or mc");
    }

    j.update(slope_section(report, k_list));
    write_output(out_prefix.empty() ? "" : out_prefix + ".json", j.dump(2) + "\n");

    std::ostringstream csv;
    csv << "k,t,moment,se\n";
    for (size_t ki = 0; ki < report.k_list.size(); ++ki)
        for (const auto& e : report.estimates[ki])
            csv << report.k_list[ki] << "," << fmt(e.lag) << "," << fmt(e.value) << ","
                << fmt(e.std_error) << "\n";
    if (!out_prefix.empty()) write_output(out_prefix + ".csv", csv.str());
    return 0;
}

int run_report(const std::string& model_path, bool with_simulation,
               const std::string& out_path) {
    const ResolvedModel model = load_model_file(model_path);
    const MomentSummary summary = moment_summary(model.spec);

    json j;
    j["schema"] = 1;
    j["spec"] = spec_to_json(model.spec);
    j["moment_summary"] = {{"mean", summary.mean},
                           {"m2", summary.m(2)},
                           {"m3", summary.m(3)},
                           {"m4", summary.m(4)},
                           {"skewness", summary.skewness},
                           {"excess_kurtosis", summary.excess_kurtosis}};
    const double C = continuity_coefficient(summary);
    j["continuity_coefficient"] = C;

    switch (model.alpha_source) {
        case AlphaSource::NamedLaw: j["alpha"]["source"] = "law"; break;
        case AlphaSource::ExplicitRatios: j["alpha"]["source"] = "ratios"; break;
        case AlphaSource::Solved: j["alpha"]["source"] = "solved"; break;
    }
    if (model.solved_k) j["alpha"]["k"] = *model.solved_k;
    const int shown = std::min(model.alpha.max_index(), 8);
    j["alpha"]["scale"] = model.alpha.scale();
    j["alpha"]["ratios"] = json_vector(model.alpha.ratios(shown));

    ContinuityReport creport;
    creport.continuity_coefficient = C;
    j["harness"] = harness_detect(creport, model.spec);

    if (model.alpha.max_index() >= 3)
        j["admissibility"] = admissibility_to_json(
            alpha_admissibility(model.alpha, model.spec, {0.25, 1.0, 4.0},
                                std::min(model.alpha.max_index(), 8)));
    else
        j["admissibility"] = {{"skipped", "needs at least 3 rate terms"}};

    KernelSuiteResult suite = kernel_suite(model.spec, model.alpha, 11, 4);
    j["kernel_checks"] = suite.report;

    if (with_simulation) {
        TransitionKernel kernel = model.make_kernel();
        SimConfig config{kernel, 0.32, 0.01, 2000, 20260810u, 512};
        const PathEnsemble ens = simulate_paths(config);
        const std::vector<int> ks = {1, 2};
        const SlopeReport sreport =
            empirical_increment_moments(ens, ks, {0.01, 0.02, 0.03, 0.05, 0.07, 0.1});
        j["simulation"] = slope_section(sreport, ks);
        const HolderEstimate holder = holder_estimate(ens);
        j["simulation"]["holder_estimate"] = holder.exponent;
        j["simulation"]["holder_ci"] = holder.ci_halfwidth;
        j["simulation"]["holder_note"] = "grid-skeleton diagnostic, not a path-modification bound";
    }

    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary Markov processes with polynomial conditional moments"};
    app.require_subcommand(1);

    std::string spec_path, alpha_path, model_path, out_path;
    std::string coeffs_route = "cholesky", conj_route = "mc";
    int order = 4, degree = 4, k = 3, kernel_grid = 64, sim_grid = 512, paths = 1000;
    double t = 0.5, dt = 0.01, horizon = 1.0;
    uint64_t seed = 1;
    bool closed_form = false, with_simulation = false;
    std::vector<int> k_list;

    auto* moments = app.add_subcommand("moments", "raw and central moment table (CSV)");
    moments->add_option("--spec", spec_path, "marginal spec JSON")->required();
    moments->add_option("--order", order, "maximum moment order")->required();
    moments->add_option("--out", out_path, "output file (default stdout)");

    auto* coeffs = app.add_subcommand("coeffs", "orthonormal coefficient matrix c_{j,n} (CSV)");
    coeffs->add_option("--spec", spec_path)->required();
    coeffs->add_option("--degree", degree)->required();
    coeffs->add_option("--route", coeffs_route, "cholesky | closed");
    coeffs->add_option("--out", out_path);

    auto* continuity = app.add_subcommand("continuity", "continuity coefficient and rate ratios (JSON)");
    continuity->add_option("--spec", spec_path)->required();
    continuity->add_option("--k", k, "half-order of the highest increment moment")->required();
    continuity->add_option("--out", out_path);

    auto* kernel_cmd = app.add_subcommand("kernel", "transition density on a grid (CSV)");
    kernel_cmd->add_option("--spec", spec_path)->required();
    kernel_cmd->add_option("--alpha", alpha_path, "rate sequence JSON")->required();
    kernel_cmd->add_option("--t", t, "time lag")->required();
    kernel_cmd->add_option("--grid", kernel_grid, "grid resolution");
    kernel_cmd->add_flag("--closed-form", closed_form, "evaluate through the closed form");
    kernel_cmd->add_option("--out", out_path);

    auto* verify = app.add_subcommand("verify-kernel", "duality/semigroup/martingale residuals (JSON)");
    verify->add_option("--spec", spec_path)->required();
    verify->add_option("--alpha", alpha_path)->required();
    verify->add_option("--out", out_path);

    auto* simulate = app.add_subcommand("simulate", "sample paths (CSV)");
    simulate->add_option("--spec", spec_path)->required();
    simulate->add_option("--alpha", alpha_path)->required();
    simulate->add_option("--paths", paths)->required();
    simulate->add_option("--dt", dt)->required();
    simulate->add_option("--horizon", horizon)->required();
    simulate->add_option("--seed", seed)->required();
    simulate->add_option("--grid", sim_grid, "CDF tabulation resolution");
    simulate->add_flag("--closed-form", closed_form);
    simulate->add_option("--out", out_path)->required();

    auto* conjecture = app.add_subcommand("conjecture", "increment-moment scaling slopes");
    conjecture->add_option("--model", model_path, "model JSON")->required();
    conjecture->add_option("--k", k_list, "half-orders to test");
    conjecture->add_option("--route", conj_route, "exact | mc");
    conjecture->add_option("--paths", paths);
    conjecture->add_option("--dt", dt);
    conjecture->add_option("--horizon", horizon);
    conjecture->add_option("--seed", seed);
    conjecture->add_option("--out", out_path, "output prefix (.json/.csv)");

    auto* report = app.add_subcommand("report", "full model dossier (JSON)");
    report->add_option("--model", model_path)->required();
    report->add_flag("--with-simulation", with_simulation);
    report->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*moments) return run_moments(spec_path, order, out_path);
        if (*coeffs) return run_coeffs(spec_path, degree, coeffs_route, out_path);
        if (*continuity) return run_continuity(spec_path, k, out_path);
        if (*kernel_cmd)
            return run_kernel(spec_path, alpha_path, t, kernel_grid, closed_form, out_path);
        if (*verify) return run_verify_kernel(spec_path, alpha_path, out_path);
        if (*simulate)
            return run_simulate(spec_path, alpha_path, paths, dt, horizon, seed, sim_grid,
                                closed_form, out_path);
        if (*conjecture)
            return run_conjecture(model_path, k_list, conj_route, paths, dt, horizon, seed,
                                  out_path);
        if (*report) return run_report(model_path, with_simulation, out_path);
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
