// ============================================================================
//  test_evolve.cpp
//
//  Crank-Nicolson propagation of i df/dt = -(1/2m) f'' + V f and the
//  implicit-Euler heat foil. Reference values:
//    * box ground state sqrt(2) sin(pi x) rotates as exp(-i E1 t), E1 = pi^2/2
//    * free Gaussian variance sigma(t)^2 = sigma0^2 + t^2 / (4 sigma0^2)
//    * plane-wave packet centroid advances at the group velocity k
//    * implicit Euler damps the cosine mode k by 1 / (1 - D dt lambda_k) per
//      step, lambda_k = 2 (cos(k dx) - 1) / dx^2  (exact per-mode algebra)
// ============================================================================

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "revdiff/evolve.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace revdiff;

namespace {

constexpr double kPi = std::numbers::pi;

Grid box_grid() { return Grid(0.0, 1.0, 2048); }
Grid desk_grid() { return Grid(-20.0, 20.0, 2048); }

double max_norm_drift(const FieldHistory& h) {
    double worst = 0.0;
    for (const auto& f : h.frames) worst = std::max(worst, std::abs(l2_norm_sq(f) - 1.0));
    return worst;
}

// Band-limited positive density used by the heat tests.
RealField noisy_density(const Grid& g, unsigned seed, int j_lo, int j_hi, double amp) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coeff(-amp, amp);
    const double L = g.x_max() - g.x_min();
    RealField rho(g);
    std::vector<double> a;
    for (int j = j_lo; j <= j_hi; ++j) a.push_back(coeff(rng));
    for (std::size_t i = 0; i < g.size(); ++i) {
        double v = 1.0;
        for (int j = j_lo; j <= j_hi; ++j)
            v += a[j - j_lo] * std::cos(j * kPi * (g.x(i) - g.x_min()) / L);
        rho.values[i] = v;
    }
    return rho;
}

} // namespace

TEST_CASE("time window maps steps onto the opposite-running clock") {
    TimeWindow w(1.0, 1000);
    CHECK(w.dt() == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(w.reversed_index(0) == 1000);
    CHECK(w.reversed_index(1000) == 0);
    CHECK(w.reversed_index(250) == 750);
    CHECK_THROWS_AS(w.reversed_index(1001), std::domain_error);
    CHECK_THROWS_AS(TimeWindow(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(TimeWindow(-1.0, 10), std::invalid_argument);
}

TEST_CASE("box ground state acquires the phase exp(-i E1 dt) per step") {
    const Grid g = box_grid();
    auto f0 = well_eigenstate(g, 1);
    normalize(f0);
    const Potential V = Potential::infinite_well(g);
    const double dt = 1e-3;
    const double e1 = 0.5 * kPi * kPi;

    ComplexField f1 = step_schrodinger(f0, V, dt);

    // Global phase extracted from the overlap; modulus stays 1.
    Complex overlap{};
    for (std::size_t i = 0; i < g.size(); ++i)
        overlap += std::conj(f0.values[i]) * f1.values[i];
    overlap *= g.dx();
    CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-12);
    // Per-step phase error: O(dt^3) time slicing plus O(dx^2 dt) dispersion.
    CHECK(std::abs(std::arg(overlap) + e1 * dt) < 5e-8);

    // Over a full window the phase drift stays below 1000x the per-step bound.
    FieldHistory h = evolve_window(f0, V, TimeWindow(1.0, 1000));
    Complex late{};
    for (std::size_t i = 0; i < g.size(); ++i)
        late += std::conj(f0.values[i]) * h.frames.back().values[i];
    late *= g.dx();
    double want = std::remainder(-e1 * 1.0, 2.0 * kPi);
    CHECK(std::abs(std::remainder(std::arg(late) - want, 2.0 * kPi)) < 5e-5);
}

TEST_CASE("norm is preserved to 1e-10 across a thousand steps") {
    const Grid g = desk_grid();
    auto f0 = gaussian_packet(g, 0.0, 1.0, 1.0);
    normalize(f0);
    FieldHistory h = evolve_window(f0, Potential::free_space(g), TimeWindow(1.0, 1000));
    CHECK(max_norm_drift(h) < 1e-10);
}

TEST_CASE("free gaussian spreads with the analytic variance law") {
    const Grid g = desk_grid();
    const double sigma0 = 1.0;
    auto f0 = gaussian_packet(g, 0.0, sigma0, 0.0);
    normalize(f0);
    FieldHistory h = evolve_window(f0, Potential::free_space(g), TimeWindow(1.0, 1000));

    for (double t : {0.25, 0.5, 1.0}) {
        const auto k = static_cast<std::size_t>(std::round(t / h.window.dt()));
        const double want = sigma0 * sigma0 + t * t / (4.0 * sigma0 * sigma0);
        CHECK(std::abs(position_variance(h.frame(k)) - want) < 1e-4);
    }
}

TEST_CASE("drifting packet centroid moves at the group velocity") {
    const Grid g = desk_grid();
    // Periodic ring of n nodes has period n * dx; pick k on the ring lattice.
    const double period = static_cast<double>(g.size()) * g.dx();
    const double k = 2.0 * kPi * 6.0 / period;
    auto f0 = gaussian_packet(g, 0.0, 2.0, k);
    normalize(f0);
    EvolveOptions opt;
    opt.bc = BoundaryCondition::periodic;
    FieldHistory h = evolve_window(f0, Potential::free_space(g), TimeWindow(0.1, 100), opt);
    CHECK(max_norm_drift(h) < 1e-11);
    const double shift = position_expectation(h.frames.back()) - position_expectation(f0);
    CHECK(std::abs(shift - k * 0.1) < 1e-4);
}

TEST_CASE("energy expectation is conserved by the stepper") {
    const Grid g = desk_grid();
    const Potential V = Potential::harmonic(g);
    auto f0 = gaussian_packet(g, 1.0, 1.0, 0.0); // displaced -> coherent oscillation
    normalize(f0);
    FieldHistory h = evolve_window(f0, V, TimeWindow(1.0, 1000));
    const double e0 = energy_expectation(h.frame(0), V);
    double worst = 0.0;
    for (std::size_t k = 0; k <= 1000; k += 100)
        worst = std::max(worst, std::abs(energy_expectation(h.frame(k), V) - e0));
    CHECK(worst < 1e-8);
}

TEST_CASE("a zero-step window records exactly the initial frame") {
    const Grid g = desk_grid();
    auto f0 = gaussian_packet(g, 0.0, 1.0, 0.0);
    normalize(f0);
    FieldHistory h = evolve_window(f0, Potential::free_space(g), TimeWindow(1.0, 0));
    REQUIRE(h.n_frames() == 1);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(h.frame(0).values[i] == f0.values[i]);
}

TEST_CASE("unnormalized input is rejected unless explicitly allowed") {
    const Grid g = desk_grid();
    auto f0 = gaussian_packet(g, 0.0, 1.0, 0.0); // norm 1 by construction
    for (auto& v : f0.values) v *= 1.1;
    CHECK_THROWS_WITH_AS(evolve_window(f0, Potential::free_space(g), TimeWindow(1.0, 10)),
                         doctest::Contains("not normalized"), std::invalid_argument);
    EvolveOptions opt;
    opt.allow_unnormalized = true;
    CHECK_NOTHROW(evolve_window(f0, Potential::free_space(g), TimeWindow(0.01, 10), opt));
}

TEST_CASE("time reversal conjugates and reorders frames bit-exactly") {
    const Grid g = desk_grid();
    auto f0 = gaussian_packet(g, -2.0, 1.0, 1.5);
    normalize(f0);
    FieldHistory h = evolve_window(f0, Potential::free_space(g), TimeWindow(0.5, 50));
    FieldHistory r = time_reverse(h);

    CHECK(r.direction == TimeDirection::backward);
    REQUIRE(r.n_frames() == h.n_frames());

    // The reversed history's frame at any physical instant is the conjugate
    // of the forward frame at that same instant, bitwise.
    for (std::size_t k_c : {std::size_t{0}, std::size_t{17}, std::size_t{50}}) {
        const auto& fwd = h.frame_at_physical_step(k_c);
        const auto& rev = r.frame_at_physical_step(k_c);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(rev.values[i].real() == fwd.values[i].real());
            CHECK(rev.values[i].imag() == -fwd.values[i].imag());
        }
    }

    // Double reversal is the identity, bitwise.
    FieldHistory rr = time_reverse(r);
    CHECK(rr.direction == TimeDirection::forward);
    for (std::size_t k = 0; k < h.n_frames(); ++k)
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(rr.frame(k).values[i] == h.frame(k).values[i]);
}

TEST_CASE("conjugate-evolve-conjugate round trip returns the initial state") {
    const Grid g = desk_grid();
    const Potential V = Potential::harmonic(g);
    auto f0 = gaussian_packet(g, 1.0, 0.8, 0.5);
    normalize(f0);
    const TimeWindow w(1.0, 1000);

    FieldHistory fwd = evolve_window(f0, V, w);
    EvolveOptions opt;
    opt.allow_unnormalized = true;
    FieldHistory back = evolve_window(conjugate(fwd.frames.back()), V, w, opt);
    CHECK(l2_distance(conjugate(back.frames.back()), f0) < 1e-8);
}

TEST_CASE("independent backward integration reproduces the reversed history") {
    const Grid g = desk_grid();
    const Potential V = Potential::free_space(g);
    auto f0 = gaussian_packet(g, 0.0, 1.0, 2.0);
    normalize(f0);
    FieldHistory h = evolve_window(f0, V, TimeWindow(0.5, 500));

    FieldHistory relabeled = time_reverse(h);
    FieldHistory integrated = evolve_backward_window(h, V);
    CHECK(integrated.direction == TimeDirection::backward);
    double worst = 0.0;
    for (std::size_t k = 0; k <= 500; k += 50)
        worst = std::max(worst, l2_distance(relabeled.frame(k), integrated.frame(k)));
    CHECK(worst < 1e-10);
}

TEST_CASE("heat step conserves mass, fixes uniform fields and obeys the max principle") {
    Grid g(-20.0, 20.0, 1024);
    RealField rho = noisy_density(g, 7u, 5, 25, 0.04);
    const double mass0 = integrate(rho, Interval::whole_line());

    RealField next = step_heat(rho, 0.5, 1e-3);
    CHECK(std::abs(integrate(next, Interval::whole_line()) - mass0) < 1e-12 * std::abs(mass0));

    double lo = rho.values[0], hi = rho.values[0];
    for (double v : rho.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : next.values) {
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }

    RealField flat(g, std::vector<double>(g.size(), 0.7));
    RealField still = step_heat(flat, 0.5, 1e-3);
    for (double v : still.values) CHECK(std::abs(v - 0.7) < 1e-14);
}

TEST_CASE("heat modes decay by the implicit-Euler gain per step") {
    Grid g(-20.0, 20.0, 1024);
    const double L = g.x_max() - g.x_min();
    const double k = 12.0 * kPi / L; // zero-flux cosine mode
    RealField rho(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        rho.values[i] = 1.0 + 0.25 * std::cos(k * (g.x(i) - g.x_min()));

    const double D = 0.5, dt = 1e-3;
    const double lambda = 2.0 * (std::cos(k * g.dx()) - 1.0) / (g.dx() * g.dx());
    const double gain = 1.0 / (1.0 - D * dt * lambda);
    RealField next = step_heat(rho, D, dt);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double want = 1.0 + 0.25 * gain * std::cos(k * (g.x(i) - g.x_min()));
        CHECK(std::abs(next.values[i] - want) < 1e-12);
    }
}

TEST_CASE("negative diffusion is gated and amplifies boundedly") {
    Grid g(-20.0, 20.0, 1024);
    const double L = g.x_max() - g.x_min();
    const double k = 12.0 * kPi / L;
    RealField rho(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        rho.values[i] = 1.0 + 0.25 * std::cos(k * (g.x(i) - g.x_min()));

    CHECK_THROWS_AS(step_heat(rho, -0.5, 1e-3), std::invalid_argument);

    HeatOptions demo;
    demo.allow_negative_diffusion = true;
    const double D = -0.5, dt = 1e-3;
    const double lambda = 2.0 * (std::cos(k * g.dx()) - 1.0) / (g.dx() * g.dx());
    const double gain = 1.0 / (1.0 - D * dt * lambda);
    CHECK(gain > 1.0); // amplification, but finite
    RealField next = step_heat(rho, D, dt, demo);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double want = 1.0 + 0.25 * gain * std::cos(k * (g.x(i) - g.x_min()));
        CHECK(std::abs(next.values[i] - want) < 1e-12);
    }
}

TEST_CASE("the heat equation does not reverse under the conjugation protocol") {
    // Conjugation is the identity on a real density, so the "round trip" is
    // two forward diffusions; the discrepancy grows with spectral content.
    Grid g(-20.0, 20.0, 1024);
    const TimeWindow w(1.0, 1000);

    RealField low = noisy_density(g, 3u, 2, 6, 0.05);
    RealField high = noisy_density(g, 3u, 20, 40, 0.05);

    RealField low2 = evolve_heat(evolve_heat(low, 0.5, w), 0.5, w);
    RealField high2 = evolve_heat(evolve_heat(high, 0.5, w), 0.5, w);

    const double low_err = l2_distance(low2, low) / std::sqrt(l2_norm_sq(low));
    const double high_err = l2_distance(high2, high) / std::sqrt(l2_norm_sq(high));
    CHECK(high_err > 1e-2);
    CHECK(high_err > low_err);
}

TEST_CASE("potential factories sample the advertised shapes") {
    Grid g(-2.0, 2.0, 64);
    const Potential V = Potential::harmonic(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(V.values[i] == doctest::Approx(0.5 * g.x(i) * g.x(i)).epsilon(1e-15));
    const Potential W = Potential::free_space(g);
    for (double v : W.values) CHECK(v == 0.0);
}

TEST_CASE("grid mismatch between field and potential is rejected") {
    Grid a(-2.0, 2.0, 64), b(-2.0, 2.0, 65);
    auto f = gaussian_packet(a, 0.0, 0.5, 0.0);
    CHECK_THROWS_AS(step_schrodinger(f, Potential::free_space(b), 1e-3), std::invalid_argument);
}
