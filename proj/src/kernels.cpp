#include "smpr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "smpr/quadrature.hpp"

namespace smpr {

namespace {

constexpr double kPi = 3.14159265358979323846;

int resolve_threads(int work_items) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SMPR_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(std::max(1, work_items))));
}

}  // namespace

TransitionKernel::TransitionKernel(MarginalSpec spec, AlphaSequence alpha, TruncationPolicy trunc,
                                   KernelMode mode)
    : spec_(spec), alpha_(alpha), trunc_(trunc), mode_(mode) {
    spec_.validate();
    if (trunc_.max_terms < 1 || trunc_.max_terms > kMaxBasisDegree)
        throw validation_error("truncation cap must lie in [1, " +
                               std::to_string(kMaxBasisDegree) + "]");
    if (!(trunc_.tail_tol > 0.0)) throw validation_error("tail tolerance must be > 0");
    int degree = std::min(trunc_.max_terms, alpha_.max_index());
    if (spec_.family() == Family::Laplace) degree = std::min(degree, kMaxCoeffOrder - 1);
    basis_ = basis_from_recurrence(spec_, degree);
    if (mode_ == KernelMode::ClosedForm && !closed_form_available())
        throw validation_error("no closed form for " + spec_.describe() +
                               " with the given rate sequence");
}

bool TransitionKernel::closed_form_available() const {
    if (!alpha_.has_law()) return false;
    switch (spec_.family()) {
        case Family::Gaussian: return *alpha_.law() == RatioLaw::Linear;
        case Family::Gamma: return *alpha_.law() == RatioLaw::Linear;
        case Family::Arcsine: return *alpha_.law() == RatioLaw::Quadratic;
        case Family::Semicircle: return *alpha_.law() == RatioLaw::SemicircleLaw;
        default: return false;
    }
}

SeriesPlan TransitionKernel::plan(double t, const std::vector<double>& xs,
                                  const std::vector<double>& ys) const {
    if (!(t > 0.0)) throw validation_error("kernel evaluation requires t > 0");
    const int cap = basis_.degree();
    std::vector<double> h;
    std::vector<double> max_hx(static_cast<size_t>(cap) + 1, 0.0);
    std::vector<double> max_hy(static_cast<size_t>(cap) + 1, 0.0);
    for (double x : xs) {
        basis_.eval_all(cap, x, h);
        for (int n = 0; n <= cap; ++n)
            max_hx[static_cast<size_t>(n)] = std::max(max_hx[static_cast<size_t>(n)],
                                                      std::abs(h[static_cast<size_t>(n)]));
    }
    for (double y : ys) {
        basis_.eval_all(cap, y, h);
        for (int n = 0; n <= cap; ++n)
            max_hy[static_cast<size_t>(n)] = std::max(max_hy[static_cast<size_t>(n)],
                                                      std::abs(h[static_cast<size_t>(n)]));
    }
    // The reported bound is the running minimum of e^{-alpha_n t} |h_n|_x |h_n|_y,
    // so enlarging N never worsens it. Two consecutive sub-tolerance terms are
    // required before stopping, in case a single |h_n| sits near a root.
    SeriesPlan plan;
    plan.bound = std::numeric_limits<double>::infinity();
    int below = 0;
    for (int n = 1; n <= cap; ++n) {
        const double term = std::exp(-alpha_.alpha(n) * t) * max_hx[static_cast<size_t>(n)] *
                            max_hy[static_cast<size_t>(n)];
        plan.terms = n;
        plan.bound = std::min(plan.bound, term);
        below = term < trunc_.tail_tol ? below + 1 : 0;
        if (below >= 2 || (below >= 1 && n == cap)) {
            plan.ok = true;
            return plan;
        }
    }
    // An explicit ratio list exhausts the model's modes: the sum over all of
    // them is exact, not truncated.
    plan.ok = !alpha_.has_law() && cap == alpha_.max_index();
    return plan;
}

double TransitionKernel::ratio_series(double x, double y, double t,
                                      const SeriesPlan& plan) const {
    std::vector<double> hx, hy;
    basis_.eval_all(plan.terms, x, hx);
    basis_.eval_all(plan.terms, y, hy);
    double sum = 0.0;
    for (int n = plan.terms; n >= 1; --n)
        sum += std::exp(-alpha_.alpha(n) * t) * hx[static_cast<size_t>(n)] *
               hy[static_cast<size_t>(n)];
    return 1.0 + sum;
}

double TransitionKernel::ratio_closed(double x, double y, double t) const {
    const double a1 = alpha_.scale();
    switch (spec_.family()) {
        case Family::Gaussian:
            return mehler_closed(x, y, t, a1) / (density(spec_, x) * density(spec_, y));
        case Family::Gamma:
            return hardy_hille(x, y, t, a1, spec_.shape()) /
                   (density(spec_, x) * density(spec_, y));
        case Family::Arcsine:
            return arcsine_kernel(x, y, t, a1) / density(spec_, x);
        case Family::Semicircle: {
            // basis is U_n(x/r); rates alpha1 n(n+2)/3 mean nome e^{-alpha1 t/3}
            const double r = spec_.radius();
            return semicircle_kernel(x / r, y / r, t, a1 / 3.0) / (r * density(spec_, x));
        }
        default:
            throw validation_error("no closed form for " + spec_.describe());
    }
}

double TransitionKernel::ratio(double x, double y, double t) const {
    if (mode_ == KernelMode::ClosedForm) return ratio_closed(x, y, t);
    const SeriesPlan p = plan(t, {x}, {y});
    if (!p.ok)
        throw numeric_error("series tail bound " + std::to_string(p.bound) +
                                " above tolerance at t = " + std::to_string(t),
                            p.bound);
    return ratio_series(x, y, t, p);
}

double TransitionKernel::transition_density(double x, double y, double t) const {
    return density(spec_, x) * ratio(x, y, t);
}

Eigen::MatrixXd TransitionKernel::ratio_grid(const std::vector<double>& xs,
                                             const std::vector<double>& ys, double t) const {
    Eigen::MatrixXd out(xs.size(), ys.size());
    if (mode_ == KernelMode::ClosedForm) {
        for (size_t i = 0; i < xs.size(); ++i)
            for (size_t j = 0; j < ys.size(); ++j) out(i, j) = ratio_closed(xs[i], ys[j], t);
        return out;
    }
    const SeriesPlan p = plan(t, xs, ys);
    if (!p.ok)
        throw numeric_error("series tail bound " + std::to_string(p.bound) +
                                " above tolerance at t = " + std::to_string(t),
                            p.bound);
    const int n_terms = p.terms;
    Eigen::MatrixXd hx(xs.size(), n_terms + 1), hy(ys.size(), n_terms + 1);
    std::vector<double> h;
    for (size_t i = 0; i < xs.size(); ++i) {
        basis_.eval_all(n_terms, xs[i], h);
        for (int n = 0; n <= n_terms; ++n) hx(i, n) = h[static_cast<size_t>(n)];
    }
    for (size_t j = 0; j < ys.size(); ++j) {
        basis_.eval_all(n_terms, ys[j], h);
        for (int n = 0; n <= n_terms; ++n) hy(j, n) = h[static_cast<size_t>(n)];
    }
    Eigen::VectorXd w(n_terms + 1);
    for (int n = 0; n <= n_terms; ++n) w(n) = std::exp(-alpha_.alpha(n) * t);
    out = hx * w.asDiagonal() * hy.transpose();
    return out;
}

double mehler_closed(double x, double y, double t, double alpha1) {
    if (!(t > 0.0)) throw validation_error("mehler kernel requires t > 0");
    const double rho = std::exp(-alpha1 * t);
    if (rho >= 1.0) throw validation_error("mehler kernel correlation must stay below 1");
    const double om = 1.0 - rho * rho;
    return std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * om)) /
           (2.0 * kPi * std::sqrt(om));
}

double hardy_hille(double x, double y, double t, double alpha1, double beta) {
    if (!(x > 0.0) || !(y > 0.0)) throw validation_error("hardy-hille requires x, y > 0");
    if (!(t > 0.0)) throw validation_error("hardy-hille requires t > 0");
    if (!(beta > 0.0)) throw validation_error("hardy-hille requires beta > 0");
    const double rho = std::exp(-alpha1 * t);
    const double om = 1.0 - rho;
    const double bessel_arg = 2.0 * std::sqrt(rho * x * y) / om;
    const double log_value = 0.5 * (beta - 1.0) * (std::log(x) + std::log(y) - std::log(rho)) -
                             (x + y) / om + log_bessel_i(beta - 1.0, bessel_arg) -
                             std::lgamma(beta) - std::log(om);
    return std::exp(log_value);
}

double arcsine_kernel(double x, double y, double t, double alpha1) {
    if (std::abs(x) >= 1.0 || std::abs(y) >= 1.0)
        throw validation_error("arcsine kernel requires |x|, |y| < 1");
    if (!(t > 0.0)) throw validation_error("arcsine kernel requires t > 0");
    const double rho = std::exp(-alpha1 * t);
    const double phi = std::acos(x), psi = std::acos(y);
    const double theta_minus = jacobi_theta({rho, 0.5 * (phi - psi)});
    const double theta_plus = jacobi_theta({rho, 0.5 * (phi + psi)});
    return density(MarginalSpec::arcsine(), x) * 0.5 * (theta_minus + theta_plus);
}

double semicircle_kernel(double x, double y, double t, double alpha) {
    if (std::abs(x) >= 1.0 || std::abs(y) >= 1.0)
        throw validation_error("semicircle kernel requires |x|, |y| < 1");
    if (!(t > 0.0)) throw validation_error("semicircle kernel requires t > 0");
    const double rho = std::exp(-alpha * t);
    const double phi = std::acos(x), psi = std::acos(y);
    const double theta_minus = jacobi_theta({rho, 0.5 * (phi - psi)});
    const double theta_plus = jacobi_theta({rho, 0.5 * (phi + psi)});
    return (theta_minus - theta_plus) / (2.0 * kPi * rho * std::sqrt(1.0 - y * y));
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1.0);
    return xs;
}

}  // namespace

Support scan_range(const MarginalSpec& spec) {
    const Support s = spec.support();
    if (s.bounded()) {
        const double margin = 1e-3 * (s.hi - s.lo);
        return {s.lo + margin, s.hi - margin};
    }
    switch (spec.family()) {
        case Family::Gaussian: return {-4.0, 4.0};
        case Family::Laplace: return {-8.5, 8.5};
        case Family::Gamma: {
            const double hi = gamma_quantile(spec.shape(), 1.0 - 1e-4);
            const double lo = gamma_quantile(spec.shape(), 1e-4);
            return {lo, hi};
        }
        case Family::QNormal: return {-4.0, 4.0};  // q = 1 only
        default: return s;
    }
}

PositivityReport positivity_scan(const TransitionKernel& kernel, int grid_n,
                                 const std::vector<double>& t_list) {
    if (grid_n < 2) throw validation_error("positivity scan needs at least a 2x2 grid");
    const Support range = scan_range(kernel.spec());
    const std::vector<double> grid = linspace(range.lo, range.hi, grid_n);

    PositivityReport report;
    report.min_value = std::numeric_limits<double>::infinity();
    for (double t : t_list) {
        const Eigen::MatrixXd values = kernel.ratio_grid(grid, grid, t);
        // per-row minima computed in parallel, merged in fixed row order so
        // the located minimum never depends on the worker count
        const int rows = static_cast<int>(values.rows());
        std::vector<std::pair<double, int>> row_min(static_cast<size_t>(rows));
        const int n_threads = resolve_threads(rows);
        std::vector<std::thread> workers;
        workers.reserve(static_cast<size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w]() {
                for (int i = w; i < rows; i += n_threads) {
                    double best = values(i, 0);
                    int best_j = 0;
                    for (int j = 1; j < values.cols(); ++j)
                        if (values(i, j) < best) {
                            best = values(i, j);
                            best_j = j;
                        }
                    row_min[static_cast<size_t>(i)] = {best, best_j};
                }
            });
        }
        for (auto& th : workers) th.join();
        for (int i = 0; i < rows; ++i)
            if (row_min[static_cast<size_t>(i)].first < report.min_value) {
                report.min_value = row_min[static_cast<size_t>(i)].first;
                report.at_x = grid[static_cast<size_t>(i)];
                report.at_y = grid[static_cast<size_t>(row_min[static_cast<size_t>(i)].second)];
                report.at_t = t;
            }
    }
    report.admissible_at_resolution = report.min_value >= -kernel.truncation().tail_tol;
    return report;
}

namespace {

// Laplace has no closed recurrence, so its quadrature order is capped by the
// exact moment route.
int clamp_nodes(const MarginalSpec& spec, int nodes) {
    if (spec.family() == Family::Laplace) return std::min(nodes, kMaxCoeffOrder - 1);
    return nodes;
}

}  // namespace

double chapman_kolmogorov_check(const TransitionKernel& kernel, double s, double t, double x,
                                double y, int nodes) {
    if (!(s > 0.0) || !(t > 0.0)) throw validation_error("chapman-kolmogorov requires s, t > 0");
    const GaussRule rule = gauss_rule(kernel.spec(), clamp_nodes(kernel.spec(), nodes));
    double composed = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        const double z = rule.nodes[i];
        composed += rule.weights[i] * kernel.ratio(x, z, s) * kernel.ratio(z, y, t);
    }
    const double direct = kernel.ratio(x, y, s + t);
    return density(kernel.spec(), x) * std::abs(composed - direct);
}

double martingale_check(const TransitionKernel& kernel, int n, double y, double t, int nodes) {
    if (n < 0 || n > kernel.basis().degree())
        throw validation_error("martingale index beyond basis degree");
    const GaussRule rule = gauss_rule(kernel.spec(), clamp_nodes(kernel.spec(), nodes));
    double integral = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        const double z = rule.nodes[i];
        integral += rule.weights[i] * kernel.basis().eval(n, z) * kernel.ratio(z, y, t);
    }
    const double expected = std::exp(-kernel.alpha().alpha(n) * t) * kernel.basis().eval(n, y);
    return std::abs(integral - expected);
}

}  // namespace smpr
