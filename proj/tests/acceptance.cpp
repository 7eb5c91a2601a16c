// Acceptance suite for the reversible-diffusion laboratory.
//
// Each numbered criterion below is an end-to-end property of the built
// library (plus, for the last one, the bundled command-line driver).  Every
// tolerance is pinned here as a literal; the binary prints exactly one
// PASS/FAIL line per criterion and exits with the number of failures, so a
// zero exit code certifies the whole contract.
//
// Scale used throughout: grid n = 2048 on [-20, 20] (or the unit box for
// well states), a window of 1000 steps ending at t0 = 1, and ensembles of
// 10^5 walkers.

#include "revdiff/borncalc.hpp"
#include "revdiff/eventcalc.hpp"
#include "revdiff/evolve.hpp"
#include "revdiff/hydro.hpp"
#include "revdiff/lattice.hpp"
#include "revdiff/rng.hpp"
#include "revdiff/slit.hpp"
#include "revdiff/spin2.hpp"
#include "revdiff/stats.hpp"
#include "revdiff/walkers.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace revdiff;

using Verdict = std::pair<bool, std::string>;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Shared reference evolution: a unit Gaussian drifting through free space on
// the default box, stored frame-by-frame over the whole window.
struct Reference {
    Grid grid{-20.0, 20.0, 2048};
    TimeWindow window{1.0, 1000};
    Potential free_v = Potential::free_space(grid);
    FieldHistory history =
        evolve_window(gaussian_packet(grid, 0.0, 1.0, 1.0), free_v, window);
};

double max_norm_drift(const FieldHistory& h) {
    double drift = 0.0;
    for (std::size_t k = 0; k < h.n_frames(); ++k) {
        drift = std::max(drift, std::abs(l2_norm_sq(h.frame(k)) - 1.0));
    }
    return drift;
}

ComplexField quadrature_mix(const ComplexField& a, const ComplexField& b) {
    ComplexField f(a.grid);
    const double w = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        f.values[i] = w * (a.values[i] + Complex(0.0, 1.0) * b.values[i]);
    }
    return f;
}

std::vector<double> positions_at(const TrajectorySet& ts, std::size_t step) {
    std::vector<double> xs(ts.n_walkers);
    for (std::size_t w = 0; w < ts.n_walkers; ++w) {
        xs[w] = ts.at(step, w);
    }
    return xs;
}

// 1. The stepper conserves the norm to round-off for both bundled regimes.
Verdict unitarity(const Reference& ref) {
    const double free_drift = max_norm_drift(ref.history);

    const Grid gw(0.0, 1.0, 2048);
    EvolveOptions opt;
    opt.bc = BoundaryCondition::dirichlet;
    const FieldHistory well =
        evolve_window(well_eigenstate(gw, 1), Potential::infinite_well(gw), ref.window, opt);
    const double well_drift = max_norm_drift(well);

    const double worst = std::max(free_drift, well_drift);
    return {worst < 1e-10,
            "max |norm^2 - 1|: free " + num(free_drift) + ", well " + num(well_drift) +
                "; bound 1e-10"};
}

// 2. Conjugate-evolve-conjugate-evolve returns the initial wave, while the
//    same protocol through the heat flow visibly does not.
Verdict reversibility_contrast(const Reference& ref) {
    const ComplexField& psi0 = ref.history.frame(0);
    const FieldHistory back = evolve_backward_window(ref.history, ref.free_v, EvolveOptions{});
    const double round_err = l2_distance(conjugate(back.frame(ref.window.n_steps)), psi0);

    RealField rho0 = density(gaussian_packet(ref.grid, 0.0, 2.0, 0.0));
    const CounterRng rng(0);
    for (std::size_t i = 0; i < ref.grid.size(); ++i) {
        rho0.values[i] *= 1.0 + 0.5 * (2.0 * rng.uniform(i, CounterRng::Purpose::init, 0) - 1.0);
    }
    normalize_density(rho0);
    // Conjugation is the identity on a real density, so the "reversed" heat
    // leg is simply a second forward diffusion.
    const RealField round = evolve_heat(evolve_heat(rho0, 0.5, ref.window), 0.5, ref.window);
    const double heat_err = l2_distance(round, rho0);

    return {round_err < 1e-8 && heat_err > 1e-2,
            "wave round trip " + num(round_err) + " (bound 1e-8), heat round trip " +
                num(heat_err) + " (must exceed 1e-2)"};
}

// 3. The reversed current velocity is the negated forward one wherever the
//    density supports it, at five sampled instants.
Verdict velocity_reversal(const Reference& ref) {
    const double free_gap = velocity_reversal_check(ref.history, 1.0, 5);

    const Grid gw(0.0, 1.0, 2048);
    EvolveOptions opt;
    opt.bc = BoundaryCondition::dirichlet;
    const FieldHistory well = evolve_window(
        quadrature_mix(well_eigenstate(gw, 1), well_eigenstate(gw, 2)),
        Potential::infinite_well(gw), ref.window, opt);
    const double well_gap = velocity_reversal_check(well, 1.0, 5);

    const double worst = std::max(free_gap, well_gap);
    return {worst < 1e-10,
            "max |eta_rev + eta_fwd|: free " + num(free_gap) + ", well mix " + num(well_gap) +
                "; bound 1e-10"};
}

// 4. The windowed intersection limit reproduces interval Born values, both
//    against closed forms and against the plain density quadrature.
Verdict interval_born() {
    // 2049 nodes put the half and quarter points exactly on the lattice, so
    // the reference intervals carry no endpoint-snapping error.
    const Grid g(0.0, 1.0, 2049);
    const EpsSchedule schedule = EpsSchedule::geometric(g, 4, 16);
    const ComplexField psi1 = well_eigenstate(g, 1);
    const ComplexField psi2 = well_eigenstate(g, 2);
    const ComplexField mix = quadrature_mix(psi1, psi2);

    const double half = born_limit(psi1, Interval(0.0, 0.5), schedule).extrapolated.real();
    const double quarter = born_limit(psi1, Interval(0.0, 0.25), schedule).extrapolated.real();
    const double quarter_ref = 0.25 - 1.0 / (2.0 * std::numbers::pi);

    const CounterRng rng(0);
    const std::vector<const ComplexField*> states{&psi1, &psi2, &mix};
    double equiv_max = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
        const double u1 = rng.uniform(j, CounterRng::Purpose::init, 0);
        const double u2 = rng.uniform(j, CounterRng::Purpose::init, 1);
        const double lo = 0.05 + 0.4 * u1;
        const Interval F(lo, lo + 0.1 + 0.4 * u2);
        for (const ComplexField* f : states) {
            const double limit = born_limit(*f, F, schedule).extrapolated.real();
            const double direct = integrate(density(*f), F) / l2_norm_sq(*f);
            equiv_max = std::max(equiv_max, std::abs(limit - direct));
        }
    }

    const bool ok = std::abs(half - 0.5) < 1e-4 && std::abs(quarter - quarter_ref) < 1e-3 &&
                    equiv_max < 2e-4;
    return {ok, "half " + num(std::abs(half - 0.5)) + " (1e-4), quarter " +
                    num(std::abs(quarter - quarter_ref)) + " (1e-3), two-route gap " +
                    num(equiv_max) + " (2e-4) over 30 interval/state pairs"};
}

// 5. The imaginary part of the windowed probability is pure boundary flux:
//    it shrinks along the schedule and vanishes in the extrapolated limit.
Verdict imaginary_decay() {
    const Grid g(0.0, 1.0, 2049);
    const EpsSchedule schedule = EpsSchedule::geometric(g, 4, 16);
    const ComplexField psi1 = well_eigenstate(g, 1);
    const ComplexField psi2 = well_eigenstate(g, 2);
    const ComplexField mix = quadrature_mix(psi1, psi2);

    bool monotone = true;
    double extrap_max = 0.0;
    for (const ComplexField* f : {&psi1, &psi2, &mix}) {
        const BornTable t = born_limit(*f, Interval(0.05, 0.45), schedule);
        for (std::size_t r = 1; r < t.rows.size(); ++r) {
            // 10% headroom: round-off jitter must not mask the decay.
            if (std::abs(t.rows[r].value.imag()) >
                1.1 * std::abs(t.rows[r - 1].value.imag()) + 1e-14) {
                monotone = false;
            }
        }
        extrap_max = std::max(extrap_max, std::abs(t.extrapolated.imag()));
    }
    return {monotone && extrap_max < 1e-6,
            std::string("decay monotone: ") + (monotone ? "yes" : "no") +
                ", extrapolated |Im| " + num(extrap_max) + " (bound 1e-6)"};
}

// 6. Spectral Born weights: the quadrature mix splits evenly, cross terms
//    cancel, and a localized packet's 64-mode weights close to unit total.
Verdict eigenbasis_born() {
    const Grid g(0.0, 1.0, 2049);
    std::vector<ComplexField> basis;
    basis.reserve(64);
    for (std::size_t n = 1; n <= 64; ++n) {
        basis.push_back(well_eigenstate(g, n));
    }
    const ComplexField mix = quadrature_mix(basis[0], basis[1]);
    const std::vector<double> probs = state_probabilities(expand_in_basis(mix, basis));
    const double p_err = std::max(std::abs(probs[0] - 0.5), std::abs(probs[1] - 0.5));
    const double cross = std::abs(cross_term(mix, basis, 0, 1, Interval::whole_line()));

    // Keep 8 sigma of wall clearance: the sine modes all vanish at the
    // walls, so packet mass sitting there would be unrepresentable.
    const ComplexField packet = gaussian_packet(g, 0.4, 0.05, 0.0);
    const std::vector<double> pp = state_probabilities(expand_in_basis(packet, basis));
    double sum = 0.0;
    for (double p : pp) {
        sum += p;
    }

    const bool ok = p_err < 1e-8 && cross < 1e-8 && std::abs(sum - 1.0) < 1e-8;
    return {ok, "|p - 1/2| " + num(p_err) + ", cross term " + num(cross) + ", 64-mode sum gap " +
                    num(std::abs(sum - 1.0)) + "; bounds 1e-8"};
}

// 7. Walker clouds stay Born-distributed, and the backward cloud's bin
//    velocities mirror the negated forward ones within Monte Carlo error.
Verdict walker_equivariance(const Reference& ref) {
    const std::size_t n_walkers = 100000;
    const std::size_t step_c = 500; // t_c = 0.5 into the 1000-step window
    WalkerOptions wopt;

    double ks_stationary = 0.0;
    {
        const FieldHistory h = evolve_window(harmonic_ground_state(ref.grid),
                                             Potential::harmonic(ref.grid), ref.window);
        const TrajectorySet ts =
            propagate(sample_initial(density(h.frame(0)), n_walkers, 0), h, wopt);
        ks_stationary = ks_distance(positions_at(ts, step_c), ref.grid,
                                    cumulative_integral(density(h.frame(step_c))));
    }

    const TrajectorySet fwd =
        propagate(sample_initial(density(ref.history.frame(0)), n_walkers, 0), ref.history, wopt);
    const double ks_packet =
        ks_distance(positions_at(fwd, step_c), ref.grid,
                    cumulative_integral(density(ref.history.frame(step_c))));

    double agreement = 0.0;
    std::size_t bins = 0;
    {
        const FieldHistory rev = time_reverse(ref.history);
        WalkerOptions bopt;
        bopt.seed = 1;
        const TrajectorySet bwd =
            propagate(sample_initial(density(rev.frame(0)), n_walkers, 1), rev, bopt);
        const ReversalComparison rc = reversal_compare(fwd, bwd, step_c);
        agreement = rc.agreement_fraction;
        bins = rc.occupied_bins;
    }

    const bool ok = ks_stationary < 0.02 && ks_packet < 0.02 && agreement >= 0.95 && bins > 0;
    return {ok, "KS stationary " + num(ks_stationary) + ", packet " + num(ks_packet) +
                    " (bound 0.02); velocity agreement " + num(agreement) + " over " +
                    std::to_string(bins) + " bins (need >= 0.95 within 3 se)"};
}

// 8. The four-term screen decomposition: Hermitian cross terms, agreement
//    with the one-wave Born route, textbook fringe spacing, starved dark
//    fringe.
Verdict double_slit() {
    const Grid g(-40.0, 40.0, 4096);
    const SlitConfig scfg{2.0, 0.25, 0.0, 2.0};
    const SlitState st = slit_state(scfg, g);
    const Potential V = Potential::free_space(g);
    const double t_s = scfg.t_screen;
    const std::size_t n_bins = 20;

    const std::vector<ScreenBin> cells = screen_dataset(st.psi1, st.psi2, t_s, V, n_bins);

    // Independent route to the screen state: evolve the superposition itself
    // on the same step budget the screen quadratures use.
    ComplexField psi_T = st.psi;
    {
        const auto steps = static_cast<std::size_t>(std::ceil(t_s / 1e-3));
        const double dt = t_s / static_cast<double>(steps);
        for (std::size_t k = 0; k < steps; ++k) {
            psi_T = step_schrodinger(psi_T, V, dt);
        }
    }

    const EpsSchedule schedule = EpsSchedule::geometric(g, 4, 16);
    const double width = (g.x_max() - g.x_min()) / static_cast<double>(n_bins);
    double conj_gap = 0.0;
    double born_gap = 0.0;
    for (std::size_t b = 0; b < cells.size(); ++b) {
        const FourTerms& t = cells[b].terms;
        conj_gap = std::max(conj_gap, std::abs(t.P21 - std::conj(t.P12)));
        const Interval F(g.x_min() + width * static_cast<double>(b),
                         b + 1 == cells.size() ? g.x_max()
                                               : g.x_min() + width * static_cast<double>(b + 1));
        born_gap = std::max(born_gap, std::abs(t.normalized_total() -
                                               born_limit(psi_T, F, schedule).extrapolated));
    }

    const RealField profile = screen_profile(st.psi, t_s, V, 256);
    const double far_field = 2.0 * std::numbers::pi * t_s / scfg.d;
    const FringeMetrics fm = fringe_metrics(profile, 16.0);
    const double spacing_err = std::abs(fm.spacing - far_field) / far_field;

    const double dark = dark_fringe_near(scfg, t_s, 0.5 * fringe_spacing_estimate(scfg, t_s));
    const FourTerms dark_terms =
        four_terms(st.psi1, st.psi2, Interval(dark - 0.2, dark + 0.2), t_s, V);
    const double dark_ratio =
        std::abs(dark_terms.raw_sum()) / (0.5 * (dark_terms.P11.real() + dark_terms.P22.real()));

    const bool ok =
        conj_gap < 1e-10 && born_gap < 2e-4 && spacing_err < 0.05 && dark_ratio < 0.1;
    return {ok, "P21-conj(P12) " + num(conj_gap) + " (1e-10), Born route gap " + num(born_gap) +
                    " (2e-4) over 20 bins, fringe spacing off by " + num(spacing_err) +
                    " (0.05), dark-fringe ratio " + num(dark_ratio) + " (0.1)"};
}

// 9. Event bookkeeping: the entangled-pair identities, conjugate remainders
//    from quadrature inputs, and the hyper-measure truth table.
Verdict event_calculus() {
    const CounterRng rng(0);
    double identity_max = 0.0;
    for (std::size_t j = 0; j < 1000; ++j) {
        const Complex z(2.0 * rng.uniform(j, CounterRng::Purpose::init, 0) - 1.0,
                        2.0 * rng.uniform(j, CounterRng::Purpose::init, 1) - 1.0);
        const EntangledPair p = entangled_pair_solve(z);
        identity_max = std::max({identity_max, std::abs(p.z1 * p.z2 + p.d1 - p.z1),
                                 std::abs(p.z1 * p.z2 + p.d2 - p.z2), std::abs(p.s.imag()),
                                 std::abs(p.d2 - std::conj(p.d1))});
    }

    const Grid g(-20.0, 20.0, 2048);
    const ComplexField f = gaussian_packet(g, 0.0, 1.0, 2.0);
    const Interval F(0.3, g.x_max());
    double conj_gap = 0.0;
    bool consistent = true;
    for (const double eps_in_dx : {16.0, 8.0, 4.0}) {
        const Complex P_T = intersection_probability_eps(f, F, eps_in_dx * g.dx());
        const Complex P_A = intersection_probability_eps(conjugate(f), F, eps_in_dx * g.dx());
        const EventDecomposition dec = decompose_event(P_T, P_A, integrate(density(f), F));
        conj_gap = std::max(conj_gap, std::abs(dec.d1 - std::conj(dec.d2)));
        consistent = consistent && dec.consistent && !dec.degenerate_same_set;
    }

    const bool table_ok =
        hyper_measure_check(Complex(1.0, 0.0), Complex(0.2, 0.1), Complex(-0.2, -0.1)).ok() &&
        !hyper_measure_check(Complex(1.0, 0.0), Complex(0.3, 0.0), Complex(-0.3, 0.0)).ok() &&
        !hyper_measure_check(Complex(0.9, 0.0), Complex(0.2, 0.1), Complex(-0.2, -0.1))
             .normalized &&
        !hyper_measure_check(Complex(1.0, 0.0), Complex(0.2, 0.1), Complex(-0.2, -0.2)).balanced &&
        hyper_measure_check(Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0)).ok();

    const bool ok = identity_max < 1e-15 && conj_gap < 1e-12 && consistent && table_ok;
    return {ok, "pair identities " + num(identity_max) + " (1e-15) over 1000 draws, quadrature " +
                    "remainder conjugacy " + num(conj_gap) + " (1e-12), truth table " +
                    (table_ok ? "exact" : "BROKEN")};
}

// 10. Spin star algebra: orthonormal pairing table, coefficient extraction
//     on random states, exact exclusivity, and global-phase invariance.
Verdict spin_star_algebra() {
    double table_gap = 0.0;
    const SpinOutcome outcomes[2] = {SpinOutcome::up, SpinOutcome::down};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const Complex v = star(basis_side(TimeSide::backward, outcomes[a]),
                                   basis_side(TimeSide::forward, outcomes[b]));
            table_gap = std::max(table_gap, std::abs(v - Complex(a == b ? 1.0 : 0.0, 0.0)));
        }
    }

    const CounterRng rng(0);
    double extract_gap = 0.0;
    double total_gap = 0.0;
    double phase_gap = 0.0;
    for (std::size_t j = 0; j < 100; ++j) {
        const Complex c1(2.0 * rng.uniform(j, CounterRng::Purpose::init, 0) - 1.0,
                         2.0 * rng.uniform(j, CounterRng::Purpose::init, 1) - 1.0);
        const Complex c2(2.0 * rng.uniform(j, CounterRng::Purpose::init, 2) - 1.0,
                         2.0 * rng.uniform(j, CounterRng::Purpose::init, 3) - 1.0);
        const SpinState st = make_spin_state(c1, c2, /*auto_normalize=*/true);

        extract_gap = std::max(
            {extract_gap,
             std::abs(star(basis_side(TimeSide::backward, SpinOutcome::up), st.ket()) - st.c1),
             std::abs(star(basis_side(TimeSide::backward, SpinOutcome::down), st.ket()) - st.c2)});

        const ExclusivityReport ex = exclusivity_sum_check(st);
        total_gap = std::max({total_gap, std::abs(ex.total - 1.0), std::abs(ex.cross_up_down),
                              std::abs(ex.cross_down_up)});

        const double p_up = spin_probability(st, SpinOutcome::up);
        const double p_down = spin_probability(st, SpinOutcome::down);
        const double theta = 2.0 * std::numbers::pi * rng.uniform(j, CounterRng::Purpose::init, 4);
        const SpinState rotated = make_spin_state(Complex(std::cos(theta), std::sin(theta)) * st.c1,
                                                  Complex(std::cos(theta), std::sin(theta)) * st.c2,
                                                  true);
        phase_gap = std::max({phase_gap,
                              std::abs(spin_probability(rotated, SpinOutcome::up) - p_up),
                              std::abs(spin_probability(rotated, SpinOutcome::down) - p_down)});
    }

    const bool ok =
        table_gap < 1e-15 && extract_gap < 1e-15 && total_gap < 1e-15 && phase_gap < 1e-15;
    return {ok, "pairing table " + num(table_gap) + ", coefficient extraction " +
                    num(extract_gap) + ", exclusivity " + num(total_gap) + ", phase drift " +
                    num(phase_gap) + " over 100 states; bounds 1e-15"};
}

// 11. Classical limit: walker path roughness and the osmotic field both
//     scale as 1/m across a hundredfold mass sweep.
Verdict classical_limit(const Reference& ref) {
    double rough1 = 0.0;
    double rough_gap = 0.0;
    for (const double m : {1.0, 10.0, 100.0}) {
        EvolveOptions mo;
        mo.mass = m;
        WalkerOptions wm;
        wm.seed = 2;
        wm.mass = m;
        const FieldHistory hm =
            evolve_window(gaussian_packet(ref.grid, 0.0, 1.0, 1.0), ref.free_v, ref.window, mo);
        const TrajectorySet ts =
            propagate(sample_initial(density(hm.frame(0)), 20000, 2), hm, wm);
        const double r = path_roughness(ts, hm);
        if (m == 1.0) {
            rough1 = r;
        } else {
            rough_gap = std::max(rough_gap, std::abs(m * r - rough1) / rough1);
        }
    }

    const ComplexField psi0 = gaussian_packet(ref.grid, 0.0, 1.0, 1.0);
    const HydroFields h1 = hydro_decompose(psi0, 1.0);
    double u_gap = 0.0;
    for (const double m : {10.0, 100.0}) {
        const HydroFields hm = hydro_decompose(psi0, m);
        for (std::size_t i = 0; i < ref.grid.size(); ++i) {
            if (h1.valid[i] && hm.valid[i]) {
                u_gap = std::max(u_gap, std::abs(m * hm.u.values[i] - h1.u.values[i]));
            }
        }
    }

    return {rough_gap < 0.2 && u_gap < 1e-10,
            "roughness 1/m mismatch " + num(rough_gap) + " (bound 0.2, Monte Carlo), " +
                "osmotic 1/m mismatch " + num(u_gap) + " (bound 1e-10, deterministic)"};
}

// 12. The command-line driver is deterministic: a seeded full run produces
//     identical metric values regardless of the worker-thread count.
Verdict cli_determinism() {
    const char* cli = std::getenv("REVDIFF_CLI_PATH");
    if (cli == nullptr || *cli == '\0') {
        return {false, "REVDIFF_CLI_PATH is not set; cannot launch the driver"};
    }

    const std::string base = "acceptance_cli";
    std::filesystem::create_directories(base);
    auto run = [&](int threads) -> std::string {
        const std::string out = base + "/t" + std::to_string(threads);
        const std::string cmd = std::string("\"") + cli + "\" all --seed 42 --threads " +
                                std::to_string(threads) + " --out " + out + " > " + out +
                                ".log 2>&1";
        if (std::system(cmd.c_str()) != 0) {
            return "";
        }
        return out + "/report.json";
    };

    const std::string r1 = run(1);
    const std::string r8 = run(8);
    if (r1.empty() || r8.empty()) {
        return {false, "a driver run exited nonzero (see " + base + "/*.log)"};
    }

    std::ifstream f1(r1), f8(r8);
    const auto j1 = nlohmann::ordered_json::parse(f1);
    const auto j8 = nlohmann::ordered_json::parse(f8);
    const bool equal = j1.at("metrics") == j8.at("metrics");
    return {equal, std::to_string(j1.at("metrics").size()) +
                       " metrics from 'all --seed 42' compared across --threads 1 vs 8: " +
                       (equal ? "identical" : "DIFFER")};
}

} // namespace

int main() {
    const Reference ref;

    struct Criterion {
        const char* name;
        std::function<Verdict()> check;
    };
    const std::vector<Criterion> criteria{
        {"norm conservation", [&] { return unitarity(ref); }},
        {"reversibility, with heat contrast", [&] { return reversibility_contrast(ref); }},
        {"velocity reversal", [&] { return velocity_reversal(ref); }},
        {"interval Born values, two routes", [] { return interval_born(); }},
        {"imaginary-part decay", [] { return imaginary_decay(); }},
        {"eigenbasis Born weights", [] { return eigenbasis_born(); }},
        {"walker equivariance", [&] { return walker_equivariance(ref); }},
        {"double-slit screen", [] { return double_slit(); }},
        {"event calculus", [] { return event_calculus(); }},
        {"spin star algebra", [] { return spin_star_algebra(); }},
        {"classical 1/m scaling", [&] { return classical_limit(ref); }},
        {"driver determinism", [] { return cli_determinism(); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %2zu, %s: %s\n", v.first ? "PASS" : "FAIL", i + 1,
                    criteria[i].name, v.second.c_str());
        std::fflush(stdout);
        if (!v.first) {
            ++failures;
        }
    }
    if (failures == 0) {
        std::printf("all %zu criteria hold\n", criteria.size());
    } else {
        std::printf("%d of %zu criteria FAILED\n", failures, criteria.size());
    }
    return failures;
}
