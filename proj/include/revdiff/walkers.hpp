#pragma once

#include "revdiff/evolve.hpp"
#include "revdiff/lattice.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace revdiff {

/// Positions of a walker cloud at one instant, bound to the grid the drift
/// fields live on.
struct WalkerEnsemble {
    Grid grid;
    std::vector<double> positions;
};

/// Dense record of every walker path through a window. Paths are stored
/// contiguously per walker; `at(step, walker)` hides the layout.
struct TrajectorySet {
    Grid grid;
    TimeWindow window;
    TimeDirection direction = TimeDirection::forward;
    std::size_t n_walkers = 0;
    double mass = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> positions; // n_walkers rows of (n_steps + 1) entries

    double at(std::size_t step, std::size_t walker) const {
        return positions[walker * (window.n_steps + 1) + step];
    }
    double& at(std::size_t step, std::size_t walker) {
        return positions[walker * (window.n_steps + 1) + step];
    }

    /// Row index holding physical step k_c of the original forward clock:
    /// k_c on a forward set, n_steps - k_c on a backward one.
    std::size_t index_at_physical_step(std::size_t k_c) const;
};

struct WalkerOptions {
    std::uint64_t seed = 0;
    double mass = 1.0;
    /// 0 = one worker per hardware thread. The partition has no effect on the
    /// result: every variate is addressed by (walker, purpose, draw) alone.
    unsigned threads = 0;
};

/// Per-bin summary of a trajectory set at one step. Velocities are
/// forward-difference estimates (x_{k+1} - x_k)/dt attached to the bin of
/// x_k; at the final step only the backward difference exists and is used
/// instead. `velocity_se` is the standard error of the bin mean.
struct EnsembleStats {
    double lo = 0.0;
    double bin_width = 0.0;
    std::vector<double> centers;
    std::vector<std::size_t> count;
    std::vector<double> density; // histogram normalized to unit mass
    std::vector<double> mean_velocity;
    std::vector<double> velocity_se;
};

/// Outcome of comparing a forward and a backward trajectory set at the same
/// physical instant. A bin "agrees" when |v_fwd + v_bwd| <= 3 x the combined
/// standard error; only bins holding at least `min_bin_count` walkers on both
/// sides count as occupied.
struct ReversalComparison {
    double ks_density = 0.0; // two-sample KS between the position clouds
    std::size_t occupied_bins = 0;
    std::size_t agreeing_bins = 0;
    double agreement_fraction = 0.0;
    double max_velocity_gap = 0.0; // max over occupied bins of |v_fwd + v_bwd|
};

/// Local drift b = eta + u of a frame (masked nodes drift-free). Frames of a
/// reversed history are conjugated, so the same formula yields the
/// backward-process drift automatically.
RealField drift_field(const ComplexField& f, double mass = 1.0);

/// Draw n_walkers positions from a normalized density by inverting its
/// cumulative trapezoid integral (piecewise-linear between nodes). Walker i
/// consumes the addressed variate (i, init, 0), so the sample is identical
/// for any thread count or call order.
WalkerEnsemble sample_initial(const RealField& rho, std::size_t n_walkers, std::uint64_t seed);

/// Euler-Maruyama walk dX = b dt + sqrt(2 beta^2 dt) dW through the history's
/// window, beta^2 = 1/(2 mass), drift field held piecewise-constant over each
/// step (frame k on [k dt, (k+1) dt)). Walls reflect; a step that would need
/// more than one reflection aborts with a step-size error naming the walker.
TrajectorySet propagate(const WalkerEnsemble& start, const FieldHistory& h,
                        const WalkerOptions& opt = {});

/// n_bins = 0 picks one bin per grid spacing.
EnsembleStats ensemble_stats(const TrajectorySet& ts, std::size_t step, std::size_t n_bins = 0);

ReversalComparison reversal_compare(const TrajectorySet& fwd, const TrajectorySet& bwd,
                                    std::size_t physical_step, std::size_t n_bins = 0,
                                    std::size_t min_bin_count = 10);

/// Mean squared deviation of steps from their drift, per unit time:
/// (Delta x - b dt)^2 / dt averaged over all steps and walkers. For the exact
/// walk this is the injected 2 beta^2 = 1/mass, so it shrinks as the particle
/// gets heavier while the drift part of the motion survives.
double path_roughness(const TrajectorySet& ts, const FieldHistory& h);

/// CSV "t,walker_0,...,walker_{m-1}" for the first min(max_walkers, n) paths.
void write_csv(const TrajectorySet& ts, const std::string& path, std::size_t max_walkers = 100);

/// CSV "x,count,density,mean_velocity,velocity_se".
void write_csv(const EnsembleStats& s, const std::string& path);

} // namespace revdiff
