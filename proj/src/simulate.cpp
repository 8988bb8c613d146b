#include "smpr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "smpr/rng.hpp"

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

double pairwise_sum(const double* data, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

/// Monotone cubic (Fritsch-Carlson) interpolant through strictly increasing
/// abscissae; used to invert tabulated CDFs.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
        : xs_(std::move(xs)), ys_(std::move(ys)) {
        const size_t n = xs_.size();
        slopes_.assign(n, 0.0);
        if (n < 2) return;
        std::vector<double> secant(n - 1);
        for (size_t i = 0; i + 1 < n; ++i)
            secant[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
        slopes_[0] = secant.front();
        slopes_[n - 1] = secant.back();
        for (size_t i = 1; i + 1 < n; ++i) {
            if (secant[i - 1] * secant[i] <= 0.0)
                slopes_[i] = 0.0;
            else
                slopes_[i] = 2.0 * secant[i - 1] * secant[i] / (secant[i - 1] + secant[i]);
        }
    }

    double operator()(double x) const {
        if (x <= xs_.front()) return ys_.front();
        if (x >= xs_.back()) return ys_.back();
        const size_t hi = static_cast<size_t>(
            std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
        const size_t lo = hi - 1;
        const double h = xs_[hi] - xs_[lo];
        const double s = (x - xs_[lo]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        return h00 * ys_[lo] + h10 * h * slopes_[lo] + h01 * ys_[hi] + h11 * h * slopes_[hi];
    }

private:
    std::vector<double> xs_, ys_;
    std::vector<double> slopes_;
};

/// Coordinate in which the conditional density is tabulated. The arcsine
/// density blows up at the edges in x but is flat in circle angle, and the
/// Gamma density spikes at the origin for beta < 1 but not in sqrt scale.
enum class SampleCoord { Identity, Angle, Sqrt };

struct SamplerTables {
    SampleCoord coord = SampleCoord::Identity;
    std::vector<double> u;         // tabulation coordinate grid
    std::vector<double> x;         // state values at the grid
    std::vector<double> jacobian;  // |dx/du| at the grid
    // series machinery (empty for closed-form kernels)
    std::vector<double> weights;          // e^{-alpha_n t}, n = 0..N
    std::vector<std::vector<double>> hx;  // hx[i][n] = h_n(x_i)
    int terms = 0;
};

class TransitionSampler {
public:
    TransitionSampler(const TransitionKernel& kernel, double t, int grid_n)
        : kernel_(kernel), t_(t) {
        if (grid_n < 256) throw validation_error("cdf grid resolution must be >= 256");
        const Support range = sampling_range(kernel.spec());
        tables_.coord = pick_coord(kernel.spec());
        tables_.u.resize(static_cast<size_t>(grid_n));
        tables_.x.resize(static_cast<size_t>(grid_n));
        tables_.jacobian.resize(static_cast<size_t>(grid_n));
        double ulo = range.lo, uhi = range.hi;
        if (tables_.coord == SampleCoord::Angle) {
            ulo = 0.0;
            uhi = kPi;
        } else if (tables_.coord == SampleCoord::Sqrt) {
            ulo = std::sqrt(range.lo);
            uhi = std::sqrt(range.hi);
        }
        for (int i = 0; i < grid_n; ++i) {
            const double u = ulo + (uhi - ulo) * i / (grid_n - 1.0);
            tables_.u[static_cast<size_t>(i)] = u;
            switch (tables_.coord) {
                case SampleCoord::Identity:
                    tables_.x[static_cast<size_t>(i)] = u;
                    tables_.jacobian[static_cast<size_t>(i)] = 1.0;
                    break;
                case SampleCoord::Angle:
                    tables_.x[static_cast<size_t>(i)] = -std::cos(u);
                    tables_.jacobian[static_cast<size_t>(i)] = std::sin(u);
                    break;
                case SampleCoord::Sqrt:
                    tables_.x[static_cast<size_t>(i)] = u * u;
                    tables_.jacobian[static_cast<size_t>(i)] = 2.0 * u;
                    break;
            }
        }
        if (t_ > 0.0 && kernel_.mode() == KernelMode::Series) {
            const SeriesPlan plan = kernel_.plan(t_, tables_.x, tables_.x);
            if (!plan.ok)
                throw numeric_error("transition sampler: series tail bound " +
                                        std::to_string(plan.bound) + " above tolerance",
                                    plan.bound);
            tables_.terms = plan.terms;
            tables_.weights.resize(static_cast<size_t>(plan.terms) + 1);
            for (int n = 0; n <= plan.terms; ++n)
                tables_.weights[static_cast<size_t>(n)] =
                    std::exp(-kernel_.alpha().alpha(n) * t_);
            tables_.hx.resize(tables_.x.size());
            std::vector<double> h;
            for (size_t i = 0; i < tables_.x.size(); ++i) {
                kernel_.basis().eval_all(plan.terms, tables_.x[i], h);
                tables_.hx[i] = h;
            }
        }
        marginal_density_.resize(tables_.x.size());
        for (size_t i = 0; i < tables_.x.size(); ++i)
            marginal_density_[i] = density(kernel_.spec(), tables_.x[i]) * tables_.jacobian[i];
    }

    /// Draw from eta(. | y, t); t = 0 means the stationary marginal itself.
    double sample(double y, double u, std::vector<double>& scratch) const {
        fill_density(y, scratch);
        return invert_cdf(scratch, u);
    }

    double sample_marginal(double u, std::vector<double>& scratch) const {
        scratch = marginal_density_;
        return invert_cdf(scratch, u);
    }

private:
    static SampleCoord pick_coord(const MarginalSpec& spec) {
        if (spec.family() == Family::Arcsine) return SampleCoord::Angle;
        if (spec.family() == Family::Gamma && spec.shape() < 1.0) {
            if (spec.shape() < 0.5)
                throw validation_error(
                    "tabulated sampler does not support gamma shape below 0.5");
            return SampleCoord::Sqrt;
        }
        return SampleCoord::Identity;
    }

    void fill_density(double y, std::vector<double>& out) const {
        const size_t n = tables_.x.size();
        out.resize(n);
        if (t_ <= 0.0) {
            out = marginal_density_;
            return;
        }
        if (kernel_.mode() == KernelMode::Series) {
            std::vector<double> hy;
            kernel_.basis().eval_all(tables_.terms, y, hy);
            for (int m = 0; m <= tables_.terms; ++m) hy[static_cast<size_t>(m)] *=
                tables_.weights[static_cast<size_t>(m)];
            for (size_t i = 0; i < n; ++i) {
                const auto& hrow = tables_.hx[i];
                double s = 0.0;
                for (size_t m = 0; m < hy.size(); ++m) s += hrow[m] * hy[m];
                out[i] = marginal_density_[i] * s;
            }
            return;
        }
        // closed forms, conditional density directly
        const MarginalSpec& spec = kernel_.spec();
        const double a1 = kernel_.alpha().scale();
        switch (spec.family()) {
            case Family::Gaussian: {
                const double rho = std::exp(-a1 * t_);
                const double var = 1.0 - rho * rho;
                for (size_t i = 0; i < n; ++i) {
                    const double d = tables_.x[i] - rho * y;
                    out[i] = std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
                }
                break;
            }
            case Family::Gamma: {
                const double log_fy = std::log(density(spec, y));
                for (size_t i = 0; i < n; ++i) {
                    const double x = tables_.x[i];
                    out[i] = x <= 0.0 ? 0.0
                                      : std::exp(std::log(hardy_hille(x, y, t_, a1, spec.shape())) -
                                                 log_fy) *
                                            tables_.jacobian[i];
                }
                break;
            }
            case Family::Arcsine:
                for (size_t i = 0; i < n; ++i) {
                    const double x = tables_.x[i];
                    out[i] = std::abs(x) >= 1.0 ? 0.0
                                                : arcsine_kernel(x, y, t_, a1) * tables_.jacobian[i];
                }
                break;
            case Family::Semicircle: {
                const double r = spec.radius();
                for (size_t i = 0; i < n; ++i) {
                    const double x = tables_.x[i];
                    out[i] = std::abs(x) >= r
                                 ? 0.0
                                 : semicircle_kernel(x / r, y / r, t_, a1 / 3.0) / r;
                }
                break;
            }
            default:
                throw validation_error("no closed-form sampler for " + spec.describe());
        }
    }

    double invert_cdf(std::vector<double>& dens, double u) const {
        const size_t n = dens.size();
        // clip truncation artifacts, keep track of the removed mass
        double clipped = 0.0, kept = 0.0;
        for (double& d : dens) {
            if (d < 0.0) {
                clipped -= d;
                d = 0.0;
            } else {
                kept += d;
            }
        }
        if (clipped > 1e-4 * std::max(kept, 1e-300))
            throw numeric_error("clipped negative density mass fraction " +
                                    std::to_string(clipped / std::max(kept, 1e-300)) +
                                    " exceeds 1e-4; tighten the series tolerance",
                                clipped / std::max(kept, 1e-300));
        std::vector<double> cdf(n, 0.0);
        for (size_t i = 1; i < n; ++i)
            cdf[i] = cdf[i - 1] +
                     0.5 * (dens[i] + dens[i - 1]) * (tables_.u[i] - tables_.u[i - 1]);
        const double total = cdf.back();
        if (!(total > 0.0)) throw numeric_error("conditional density integrated to zero");
        // strictly increasing knots only (flat stretches carry no mass)
        std::vector<double> fk, uk;
        fk.reserve(n);
        uk.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            const double f = cdf[i] / total;
            if (fk.empty() || f > fk.back() + 1e-15) {
                fk.push_back(f);
                uk.push_back(tables_.u[i]);
            }
        }
        if (fk.size() < 2) return tables_.x[n / 2];
        MonotoneCubic inverse(std::move(fk), std::move(uk));
        const double uu = inverse(u);
        switch (tables_.coord) {
            case SampleCoord::Identity: return uu;
            case SampleCoord::Angle: return -std::cos(uu);
            case SampleCoord::Sqrt: return uu * uu;
        }
        return uu;
    }

    const TransitionKernel& kernel_;
    double t_;
    SamplerTables tables_;
    std::vector<double> marginal_density_;
};

}  // namespace

Support sampling_range(const MarginalSpec& spec) {
    const Support s = spec.support();
    if (s.bounded()) return s;
    switch (spec.family()) {
        case Family::Gaussian: return {-10.0, 10.0};
        case Family::Gamma: return {0.0, gamma_quantile(spec.shape(), 1.0 - 1e-12)};
        case Family::Laplace: {
            const double hi = std::log(0.5e12);  // two-sided 1e-12 tail
            return {-hi, hi};
        }
        case Family::QNormal: return {-10.0, 10.0};  // q = 1 only
        default: return s;
    }
}

int SimConfig::steps() const { return static_cast<int>(std::llround(horizon / dt)); }

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw validation_error("simulation step dt must be > 0");
    if (paths < 1) throw validation_error("simulation needs at least one path");
    if (cdf_grid < 256) throw validation_error("cdf grid resolution must be >= 256");
    if (horizon < 0.0) throw validation_error("horizon must be >= 0");
    if (std::abs(steps() * dt - horizon) > 1e-9 * std::max(1.0, horizon))
        throw validation_error("horizon must be an integer multiple of dt");
}

double transition_sample(const TransitionKernel& kernel, double y, double t, double u,
                         int grid_n) {
    if (!(u > 0.0 && u < 1.0)) throw validation_error("uniform draw must lie in (0, 1)");
    if (!(t > 0.0)) throw validation_error("transition sampling requires t > 0");
    TransitionSampler sampler(kernel, t, grid_n);
    std::vector<double> scratch;
    return sampler.sample(y, u, scratch);
}

double marginal_sample(const TransitionKernel& kernel, double u, int grid_n) {
    if (!(u > 0.0 && u < 1.0)) throw validation_error("uniform draw must lie in (0, 1)");
    TransitionSampler sampler(kernel, 0.0, grid_n);
    std::vector<double> scratch;
    return sampler.sample_marginal(u, scratch);
}

PathEnsemble simulate_paths(const SimConfig& config) {
    config.validate();
    const int steps = config.steps();
    TransitionSampler sampler(config.kernel, config.dt, config.cdf_grid);
    TransitionSampler initial(config.kernel, 0.0, config.cdf_grid);

    PathEnsemble ens;
    ens.paths = config.paths;
    ens.steps = steps;
    ens.dt = config.dt;
    ens.seed = config.seed;
    ens.states.resize(static_cast<size_t>(config.paths) * (static_cast<size_t>(steps) + 1));

    const int n_threads = resolve_threads(config.paths);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(n_threads));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < n_threads; ++w) {
        workers.emplace_back([&, w]() {
            std::vector<double> scratch;
            try {
                for (int p = w; p < config.paths; p += n_threads) {
                    double* row = ens.states.data() +
                                  static_cast<size_t>(p) * (static_cast<size_t>(steps) + 1);
                    double state = initial.sample_marginal(
                        philox::uniform(config.seed, static_cast<uint64_t>(p), 0), scratch);
                    row[0] = state;
                    for (int i = 1; i <= steps; ++i) {
                        const double u = philox::uniform(config.seed, static_cast<uint64_t>(p),
                                                         static_cast<uint64_t>(i));
                        state = sampler.sample(state, u, scratch);
                        row[i] = state;
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : workers) th.join();
    if (failure) std::rethrow_exception(failure);
    return ens;
}

const std::vector<MomentEstimate>& SlopeReport::for_k(int k) const {
    for (size_t i = 0; i < k_list.size(); ++i)
        if (k_list[i] == k) return estimates[i];
    throw validation_error("k = " + std::to_string(k) + " not present in slope report");
}

SlopeReport empirical_increment_moments(const PathEnsemble& ens, const std::vector<int>& k_list,
                                        const std::vector<double>& lag_list) {
    SlopeReport report;
    report.k_list = k_list;
    report.lags = lag_list;
    report.estimates.resize(k_list.size());

    for (double lag : lag_list) {
        const int lag_steps = static_cast<int>(std::llround(lag / ens.dt));
        if (std::abs(lag_steps * ens.dt - lag) > 1e-9 * std::max(lag, ens.dt))
            throw validation_error("lag must be an integer multiple of dt");
        if (lag_steps > ens.steps) throw validation_error("lag exceeds ensemble horizon");
    }

    for (size_t ki = 0; ki < k_list.size(); ++ki) {
        const int k = k_list[ki];
        if (k < 1) throw validation_error("moment half-order k must be >= 1");
        for (double lag : lag_list) {
            const int lag_steps = static_cast<int>(std::llround(lag / ens.dt));
            MomentEstimate est;
            est.lag = lag;
            if (lag_steps == 0) {
                est.samples = static_cast<long>(ens.paths) * (ens.steps + 1);
                report.estimates[ki].push_back(est);  // identically zero
                continue;
            }
            const int per_path = ens.steps + 1 - lag_steps;
            std::vector<double> path_sums(static_cast<size_t>(ens.paths), 0.0);
            for (int p = 0; p < ens.paths; ++p) {
                double s = 0.0;
                for (int i = 0; i < per_path; ++i) {
                    const double d = ens.at(p, i + lag_steps) - ens.at(p, i);
                    double dk = d * d;
                    for (int j = 1; j < k; ++j) dk *= d * d;
                    s += dk;
                }
                path_sums[static_cast<size_t>(p)] = s;
            }
            const double total = pairwise_sum(path_sums);
            const long n_total = static_cast<long>(ens.paths) * per_path;
            est.value = total / static_cast<double>(n_total);
            est.samples = n_total;
            if (ens.paths >= 2) {
                // jackknife over paths
                std::vector<double> loo(static_cast<size_t>(ens.paths));
                for (int p = 0; p < ens.paths; ++p)
                    loo[static_cast<size_t>(p)] = (total - path_sums[static_cast<size_t>(p)]) /
                                                  static_cast<double>(n_total - per_path);
                const double mean_loo = pairwise_sum(loo) / ens.paths;
                double ss = 0.0;
                for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
                est.std_error = std::sqrt(ss * (ens.paths - 1) / static_cast<double>(ens.paths));
            }
            report.estimates[ki].push_back(est);
        }
        // variance blow-up heuristic: all estimates drowned by noise
        bool any_usable = false;
        for (const auto& est : report.estimates[ki])
            if (est.lag > 0.0 && est.value > 0.0 &&
                (ens.paths < 2 || est.std_error < est.value))
                any_usable = true;
        if (!any_usable)
            throw numeric_error("insufficient samples for increment moment 2k = " +
                                std::to_string(2 * k));
    }
    return report;
}

SlopeFit scaling_slope(const SlopeReport& report, int k) {
    const auto& ests = report.for_k(k);
    std::vector<double> lx, ly;
    for (const auto& e : ests) {
        if (e.lag > 0.0 && e.value > 0.0) {
            lx.push_back(std::log(e.lag));
            ly.push_back(std::log(e.value));
        }
    }
    if (lx.size() < 4)
        throw numeric_error("fewer than 4 usable lags for the slope fit");
    const size_t n = lx.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.lags_used = static_cast<int>(n);
    double ss_res = 0.0;
    const double intercept = my - fit.slope * mx;
    for (size_t i = 0; i < n; ++i) {
        const double r = ly[i] - intercept - fit.slope * lx[i];
        ss_res += r * r;
    }
    if (n > 2) fit.ci_halfwidth = 2.0 * std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx);
    return fit;
}

StationarityReport stationarity_check(const PathEnsemble& ens, const MarginalSpec& spec,
                                      int order) {
    if (order < 1 || order > 8) throw validation_error("stationarity order must lie in [1, 8]");
    if (ens.paths < 2) throw validation_error("stationarity check needs at least 2 paths");
    const auto exact_m = raw_moments(spec, order);
    StationarityReport report;
    report.order = order;
    for (int step = 0; step <= ens.steps; ++step) {
        for (int j = 1; j <= order; ++j) {
            double mean = 0.0, sq = 0.0;
            for (int p = 0; p < ens.paths; ++p) {
                double v = 1.0;
                const double x = ens.at(p, step);
                for (int e = 0; e < j; ++e) v *= x;
                mean += v;
                sq += v * v;
            }
            mean /= ens.paths;
            const double var = std::max(0.0, sq / ens.paths - mean * mean);
            const double se = std::sqrt(var / ens.paths);
            if (se <= 0.0) continue;
            const double z = (mean - exact_m[static_cast<size_t>(j)]) / se;
            if (std::abs(z) > std::abs(report.worst_z)) {
                report.worst_z = z;
                report.worst_order = j;
                report.worst_step = step;
            }
        }
    }
    report.ok = std::abs(report.worst_z) <= 4.0;
    return report;
}

HolderEstimate holder_estimate(const PathEnsemble& ens) {
    int levels = 0;
    while ((1 << (levels + 1)) <= ens.steps) ++levels;
    // lags 2^0 .. 2^{levels} with at least two refinement levels
    if (levels < 1) throw validation_error("need at least 2 dyadic lag levels");
    HolderEstimate out;
    out.levels = levels + 1;
    std::vector<double> slopes;
    slopes.reserve(static_cast<size_t>(ens.paths));
    for (int p = 0; p < ens.paths; ++p) {
        std::vector<double> lx, ly;
        bool degenerate = false;
        for (int lev = 0; lev <= levels; ++lev) {
            const int lag = 1 << lev;
            double mx = 0.0;
            for (int i = 0; i + lag <= ens.steps; ++i)
                mx = std::max(mx, std::abs(ens.at(p, i + lag) - ens.at(p, i)));
            if (mx <= 0.0) {
                degenerate = true;
                break;
            }
            lx.push_back(std::log(lag * ens.dt));
            ly.push_back(std::log(mx));
        }
        if (degenerate) {
            out.degenerate = true;
            slopes.push_back(0.0);
            continue;
        }
        double mx = 0.0, my = 0.0;
        for (size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(lx.size());
        double sxx = 0.0, sxy = 0.0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        slopes.push_back(sxy / sxx);
    }
    const double mean = pairwise_sum(slopes) / static_cast<double>(slopes.size());
    out.exponent = mean;
    if (slopes.size() >= 2) {
        double ss = 0.0;
        for (double s : slopes) ss += (s - mean) * (s - mean);
        const double sd = std::sqrt(ss / (static_cast<double>(slopes.size()) - 1.0));
        out.ci_halfwidth = 2.0 * sd / std::sqrt(static_cast<double>(slopes.size()));
    }
    return out;
}

}  // namespace smpr
