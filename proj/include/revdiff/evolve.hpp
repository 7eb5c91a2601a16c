#pragma once

#include "revdiff/lattice.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace revdiff {

/// Uniform time discretisation of [0, t0] into n_steps steps. A zero-step
/// window is the degenerate "no evolution" case; stepping through it is
/// rejected but histories built on it hold exactly the initial frame.
struct TimeWindow {
    double t0;
    std::size_t n_steps;

    TimeWindow(double t0, std::size_t n_steps);

    double dt() const { return n_steps == 0 ? 0.0 : t0 / static_cast<double>(n_steps); }

    /// Step index on the opposite-running clock: k -> n_steps - k.
    std::size_t reversed_index(std::size_t k) const;
};

enum class BoundaryCondition { dirichlet, periodic };

/// External potential sampled on the evolution grid.
struct Potential {
    Grid grid;
    std::vector<double> values;

    /// V = 0 everywhere; hard walls come from the boundary condition.
    static Potential free_space(const Grid& g);
    /// Alias of free_space for a box grid: the infinite well is V = 0 with
    /// Dirichlet walls at the grid ends.
    static Potential infinite_well(const Grid& g);
    /// V(x) = x^2 / 2.
    static Potential harmonic(const Grid& g);
    /// Arbitrary samples from an "x,value" CSV defined on g.
    static Potential from_csv(const Grid& g, const std::string& path);

    Potential(Grid g, std::vector<double> v);
};

enum class TimeDirection { forward, backward };

/// Dense record of every frame of an evolution, frame k at clock k * dt().
/// `direction` tells which way the underlying physical time runs relative to
/// this history's own clock.
struct FieldHistory {
    TimeWindow window;
    std::vector<ComplexField> frames;
    TimeDirection direction = TimeDirection::forward;

    std::size_t n_frames() const { return frames.size(); }
    const ComplexField& frame(std::size_t k) const;

    /// Frame holding the state at physical time t_c = k_c * dt() of the
    /// original forward run: index k_c on a forward history, n_steps - k_c on
    /// a reversed one.
    const ComplexField& frame_at_physical_step(std::size_t k_c) const;

    /// Clock reading of frame k on this history's own axis.
    double clock(std::size_t k) const { return window.dt() * static_cast<double>(k); }
};

struct EvolveOptions {
    /// Require l2_norm_sq(f0) == 1 within this tolerance (see
    /// allow_unnormalized).
    double norm_tolerance = 1e-6;
    /// Skip the normalization precondition (for deliberate stress inputs).
    bool allow_unnormalized = false;
    BoundaryCondition bc = BoundaryCondition::dirichlet;
    /// Particle mass in units of the reference mass; kinetic term -(1/2m) d^2/dx^2.
    double mass = 1.0;
};

/// One Crank-Nicolson step of i df/dt = -(1/2m) f'' + V f.
/// Unconditionally stable and norm-preserving; O(dt^2 + dx^2) accurate.
ComplexField step_schrodinger(const ComplexField& f, const Potential& V, double dt,
                              const EvolveOptions& opt = {});

/// Evolve f0 through the window, recording every frame (n_steps + 1 frames).
FieldHistory evolve_window(const ComplexField& f0, const Potential& V, const TimeWindow& w,
                           const EvolveOptions& opt = {});

/// Conjugate every frame and reverse their order; flips the direction tag.
/// The result's frame at its clock t' holds conj(psi) at physical time t0 - t'.
FieldHistory time_reverse(const FieldHistory& h);

/// Independently integrate the conjugated final frame forward through the
/// window (the conjugated equation has the same form, so the same stepper
/// applies). Cross-validates time_reverse; not the default reversal route.
FieldHistory evolve_backward_window(const FieldHistory& h, const Potential& V,
                                    const EvolveOptions& opt = {});

struct HeatOptions {
    /// Permit negative diffusion constants (bounded anti-diffusion demo).
    bool allow_negative_diffusion = false;
};

/// One implicit-Euler step of d rho/dt = D rho'' with zero-flux walls.
/// For D > 0 this is unconditionally stable and obeys the max principle; for
/// D < 0 (demo mode only) mode k is amplified by 1 / (1 - |D| k^2 dt), a
/// bounded blow-up that makes the irreversibility quantifiable.
RealField step_heat(const RealField& rho, double diffusion, double dt,
                    const HeatOptions& opt = {});

/// n_steps repeated heat steps.
RealField evolve_heat(const RealField& rho0, double diffusion, const TimeWindow& w,
                      const HeatOptions& opt = {});

/// Trapezoid expectation <f|H|f> with the same discrete Hamiltonian the
/// stepper uses; Crank-Nicolson conserves this exactly up to roundoff.
double energy_expectation(const ComplexField& f, const Potential& V,
                          const EvolveOptions& opt = {});

/// Trapezoid centroid <x> of |f|^2 (normalized internally).
double position_expectation(const ComplexField& f);

/// Trapezoid variance <x^2> - <x>^2 of |f|^2.
double position_variance(const ComplexField& f);

// --- reference states ------------------------------------------------------

/// Normalized Gaussian packet exp(-(x-x0)^2/(4 sigma0^2) + i k x).
ComplexField gaussian_packet(const Grid& g, double x0, double sigma0, double k);

/// Infinite-well eigenstate sqrt(2) sin(n pi (x - x_min) / L) on its box grid.
ComplexField well_eigenstate(const Grid& g, std::size_t n);

/// Harmonic-oscillator ground state pi^{-1/4} exp(-x^2/2) (m = omega = 1).
ComplexField harmonic_ground_state(const Grid& g);

/// Constant field 1 everywhere (not normalized).
ComplexField uniform_field(const Grid& g);

} // namespace revdiff
