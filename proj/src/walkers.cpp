#include "revdiff/walkers.hpp"

#include "revdiff/hydro.hpp"
#include "revdiff/rng.hpp"
#include "revdiff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace revdiff {

namespace {

// Linear interpolation of node samples at an in-domain point.
inline double interp(const Grid& g, const std::vector<double>& v, double x) {
    const double s = (x - g.x_min()) / g.dx();
    if (s <= 0.0) return v.front();
    const std::size_t j = std::min(std::size_t(s), g.size() - 2);
    const double w = s - double(j);
    return (1.0 - w) * v[j] + w * v[j + 1];
}

// Run fn(first, last) on roughly even walker ranges across the workers. An
// exception thrown by any worker is re-thrown on the calling thread.
void parallel_over_walkers(std::size_t n, unsigned threads,
                           const std::function<void(std::size_t, std::size_t)>& fn) {
    std::size_t workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
    if (workers == 0) workers = 1;
    workers = std::min(workers, n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto guarded = [&](std::size_t first, std::size_t last) {
        try {
            fn(first, last);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t) {
        const std::size_t first = t * chunk;
        const std::size_t last = std::min(n, first + chunk);
        if (first >= last) break;
        pool.emplace_back(guarded, first, last);
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<std::vector<double>> drift_tables(const FieldHistory& h, double mass) {
    // Frame k is held on [k dt, (k+1) dt), so the final frame never drives a
    // step and is skipped.
    const std::size_t n_steps = h.frames.size() - 1;
    std::vector<std::vector<double>> tables(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        tables[k] = drift_field(h.frames[k], mass).values;
    }
    return tables;
}

} // namespace

std::size_t TrajectorySet::index_at_physical_step(std::size_t k_c) const {
    if (k_c > window.n_steps) {
        throw std::out_of_range("TrajectorySet: physical step beyond the window");
    }
    return direction == TimeDirection::forward ? k_c : window.n_steps - k_c;
}

RealField drift_field(const ComplexField& f, double mass) {
    const HydroFields hf = hydro_decompose(f, mass);
    RealField b{f.grid};
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        b.values[i] = hf.valid[i] ? hf.eta.values[i] + hf.u.values[i] : 0.0;
    }
    return b;
}

WalkerEnsemble sample_initial(const RealField& rho, std::size_t n_walkers, std::uint64_t seed) {
    if (n_walkers == 0) {
        throw std::invalid_argument("sample_initial: need at least one walker");
    }
    require_finite(rho, "sample_initial density");
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
        if (rho.values[i] < -1e-12) {
            throw std::invalid_argument("sample_initial: density is negative at node " +
                                        std::to_string(i));
        }
    }
    const double total = integrate(rho, Interval::whole_line());
    if (std::abs(total - 1.0) > 1e-6) {
        throw std::invalid_argument("sample_initial: density is not normalized (mass " +
                                    std::to_string(total) + ")");
    }

    const Grid& g = rho.grid;
    std::vector<double> cdf = cumulative_integral(rho);
    // Trapezoid prefix sums are monotone once negatives are clipped; enforce
    // it so the inversion below cannot step backwards over roundoff.
    for (std::size_t i = 1; i < cdf.size(); ++i) {
        cdf[i] = std::max(cdf[i], cdf[i - 1]);
    }

    const CounterRng rng(seed);
    WalkerEnsemble e{g, std::vector<double>(n_walkers)};
    for (std::size_t w = 0; w < n_walkers; ++w) {
        const double target = rng.uniform(w, CounterRng::Purpose::init, 0) * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        std::size_t j = it == cdf.begin() ? 0 : std::size_t(it - cdf.begin()) - 1;
        j = std::min(j, g.size() - 2);
        const double span = cdf[j + 1] - cdf[j];
        const double frac = span > 0.0 ? (target - cdf[j]) / span : 0.0;
        e.positions[w] = g.x(j) + frac * g.dx();
    }
    return e;
}

TrajectorySet propagate(const WalkerEnsemble& start, const FieldHistory& h,
                        const WalkerOptions& opt) {
    if (h.frames.empty()) {
        throw std::invalid_argument("propagate: history has no frames");
    }
    if (!(start.grid == h.frames.front().grid)) {
        throw std::invalid_argument("propagate: ensemble and history grids differ");
    }
    if (start.positions.empty()) {
        throw std::invalid_argument("propagate: empty ensemble");
    }
    if (opt.mass <= 0.0) {
        throw std::invalid_argument("propagate: mass must be positive");
    }

    const Grid& g = start.grid;
    const std::size_t n_steps = h.frames.size() - 1;
    const std::size_t n_walkers = start.positions.size();
    const double dt = h.window.dt();
    const double sigma_step = std::sqrt(dt / opt.mass); // sqrt(2 beta^2 dt)

    TrajectorySet ts{g,        h.window,  h.direction, n_walkers,
                     opt.mass, opt.seed,  {}};
    ts.positions.resize(n_walkers * (n_steps + 1));

    const auto tables = drift_tables(h, opt.mass);
    const CounterRng rng(opt.seed);

    std::vector<std::string> errors(1);
    parallel_over_walkers(n_walkers, opt.threads, [&](std::size_t first, std::size_t last) {
        for (std::size_t w = first; w < last; ++w) {
            double x = start.positions[w];
            ts.at(0, w) = x;
            for (std::size_t k = 0; k < n_steps; ++k) {
                const double b = interp(g, tables[k], x);
                const double xi =
                    rng.gaussian_pair(w, CounterRng::Purpose::step_noise, std::uint32_t(k >> 1))
                        [k & 1];
                double y = x + b * dt + sigma_step * xi;
                if (y < g.x_min()) y = 2.0 * g.x_min() - y;
                if (y > g.x_max()) y = 2.0 * g.x_max() - y;
                if (y < g.x_min() || y > g.x_max()) {
                    throw std::runtime_error(
                        "propagate: walker " + std::to_string(w) + " at step " +
                        std::to_string(k) +
                        " needs more than one wall reflection; reduce the step size");
                }
                x = y;
                ts.at(k + 1, w) = x;
            }
        }
    });
    return ts;
}

EnsembleStats ensemble_stats(const TrajectorySet& ts, std::size_t step, std::size_t n_bins) {
    if (step > ts.window.n_steps) {
        throw std::out_of_range("ensemble_stats: step beyond the window");
    }
    if (ts.window.n_steps == 0) {
        throw std::invalid_argument("ensemble_stats: zero-step trajectories have no velocities");
    }
    if (n_bins == 0) {
        n_bins = ts.grid.size() - 1;
    }
    const double lo = ts.grid.x_min();
    const double width = (ts.grid.x_max() - lo) / double(n_bins);
    const double dt = ts.window.dt();
    // Forward difference where one exists; at the last step fall back to the
    // backward one (both estimate the drift at the binned position).
    const std::size_t kv = step < ts.window.n_steps ? step : step - 1;

    EnsembleStats s;
    s.lo = lo;
    s.bin_width = width;
    s.centers.resize(n_bins);
    for (std::size_t j = 0; j < n_bins; ++j) {
        s.centers[j] = lo + (double(j) + 0.5) * width;
    }
    s.count.assign(n_bins, 0);
    s.density.assign(n_bins, 0.0);
    s.mean_velocity.assign(n_bins, 0.0);
    s.velocity_se.assign(n_bins, 0.0);

    std::vector<double> sum(n_bins, 0.0), sum_sq(n_bins, 0.0);
    for (std::size_t w = 0; w < ts.n_walkers; ++w) {
        const double x = ts.at(kv, w);
        const double v = (ts.at(kv + 1, w) - x) / dt;
        std::size_t j = std::size_t(std::max(0.0, (x - lo) / width));
        j = std::min(j, n_bins - 1);
        s.count[j] += 1;
        sum[j] += v;
        sum_sq[j] += v * v;
    }
    const double n = double(ts.n_walkers);
    for (std::size_t j = 0; j < n_bins; ++j) {
        s.density[j] = double(s.count[j]) / (n * width);
        if (s.count[j] == 0) continue;
        const double m = sum[j] / double(s.count[j]);
        s.mean_velocity[j] = m;
        if (s.count[j] > 1) {
            const double var =
                std::max(0.0, (sum_sq[j] - sum[j] * m) / double(s.count[j] - 1));
            s.velocity_se[j] = std::sqrt(var / double(s.count[j]));
        }
    }
    return s;
}

ReversalComparison reversal_compare(const TrajectorySet& fwd, const TrajectorySet& bwd,
                                    std::size_t physical_step, std::size_t n_bins,
                                    std::size_t min_bin_count) {
    if (fwd.direction != TimeDirection::forward || bwd.direction != TimeDirection::backward) {
        throw std::invalid_argument("reversal_compare: need one forward and one backward set");
    }
    if (!(fwd.grid == bwd.grid) || fwd.window.n_steps != bwd.window.n_steps) {
        throw std::invalid_argument("reversal_compare: trajectory sets are not comparable");
    }
    const std::size_t kf = fwd.index_at_physical_step(physical_step);
    const std::size_t kb = bwd.index_at_physical_step(physical_step);

    const EnsembleStats sf = ensemble_stats(fwd, kf, n_bins);
    const EnsembleStats sb = ensemble_stats(bwd, kb, n_bins);

    ReversalComparison out;
    for (std::size_t j = 0; j < sf.count.size(); ++j) {
        if (sf.count[j] < min_bin_count || sb.count[j] < min_bin_count) continue;
        out.occupied_bins += 1;
        const double gap = std::abs(sf.mean_velocity[j] + sb.mean_velocity[j]);
        const double se = std::hypot(sf.velocity_se[j], sb.velocity_se[j]);
        out.max_velocity_gap = std::max(out.max_velocity_gap, gap);
        if (gap <= 3.0 * se) out.agreeing_bins += 1;
    }
    out.agreement_fraction =
        out.occupied_bins == 0 ? 0.0 : double(out.agreeing_bins) / double(out.occupied_bins);

    std::vector<double> pf(fwd.n_walkers), pb(bwd.n_walkers);
    for (std::size_t w = 0; w < fwd.n_walkers; ++w) pf[w] = fwd.at(kf, w);
    for (std::size_t w = 0; w < bwd.n_walkers; ++w) pb[w] = bwd.at(kb, w);
    out.ks_density = ks_distance(std::move(pf), std::move(pb));
    return out;
}

double path_roughness(const TrajectorySet& ts, const FieldHistory& h) {
    if (h.frames.size() != ts.window.n_steps + 1) {
        throw std::invalid_argument("path_roughness: history does not match the trajectories");
    }
    if (ts.window.n_steps == 0) {
        throw std::invalid_argument("path_roughness: zero-step trajectories");
    }
    const auto tables = drift_tables(h, ts.mass);
    const double dt = ts.window.dt();
    double acc = 0.0;
    for (std::size_t w = 0; w < ts.n_walkers; ++w) {
        for (std::size_t k = 0; k < ts.window.n_steps; ++k) {
            const double x = ts.at(k, w);
            const double dev = ts.at(k + 1, w) - x - interp(ts.grid, tables[k], x) * dt;
            acc += dev * dev;
        }
    }
    return acc / (double(ts.n_walkers) * double(ts.window.n_steps) * dt);
}

void write_csv(const TrajectorySet& ts, const std::string& path, std::size_t max_walkers) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) {
        throw std::runtime_error("write_csv: cannot open " + path);
    }
    const std::size_t m = std::min(max_walkers, ts.n_walkers);
    std::fprintf(fp, "t");
    for (std::size_t w = 0; w < m; ++w) std::fprintf(fp, ",walker_%zu", w);
    std::fprintf(fp, "\n");
    for (std::size_t k = 0; k <= ts.window.n_steps; ++k) {
        std::fprintf(fp, "%.17g", ts.window.dt() * double(k));
        for (std::size_t w = 0; w < m; ++w) std::fprintf(fp, ",%.17g", ts.at(k, w));
        std::fprintf(fp, "\n");
    }
    std::fclose(fp);
}

void write_csv(const EnsembleStats& s, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) {
        throw std::runtime_error("write_csv: cannot open " + path);
    }
    std::fprintf(fp, "x,count,density,mean_velocity,velocity_se\n");
    for (std::size_t j = 0; j < s.centers.size(); ++j) {
        std::fprintf(fp, "%.17g,%zu,%.17g,%.17g,%.17g\n", s.centers[j], s.count[j],
                     s.density[j], s.mean_velocity[j], s.velocity_se[j]);
    }
    std::fclose(fp);
}

} // namespace revdiff
