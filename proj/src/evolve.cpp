#include "revdiff/evolve.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace revdiff {

namespace {

constexpr Complex kI{0.0, 1.0};

// Thomas algorithm for a tridiagonal system; sub/super are the constant
// off-diagonal coefficients of a symmetric operator row. Overwrites rhs with
// the solution.
template <typename Scalar>
void solve_tridiagonal(const std::vector<Scalar>& diag, Scalar off, std::vector<Scalar>& rhs) {
    const std::size_t n = diag.size();
    std::vector<Scalar> scratch(n);
    Scalar pivot = diag[0];
    if (std::abs(pivot) < 1e-300)
        throw std::runtime_error("tridiagonal solve: zero pivot at row 0");
    rhs[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = off / pivot;
        pivot = diag[i] - off * scratch[i];
        if (std::abs(pivot) < 1e-300)
            throw std::runtime_error("tridiagonal solve: zero pivot at row " + std::to_string(i));
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

// Cyclic tridiagonal solve (Sherman-Morrison with two Thomas passes); `off`
// also couples the first and last unknowns.
template <typename Scalar>
void solve_cyclic_tridiagonal(const std::vector<Scalar>& diag, Scalar off,
                              std::vector<Scalar>& rhs) {
    const std::size_t n = diag.size();
    const Scalar gamma = -diag[0];
    std::vector<Scalar> bb(diag);
    bb[0] = diag[0] - gamma;
    bb[n - 1] = diag[n - 1] - off * off / gamma;
    solve_tridiagonal(bb, off, rhs);
    std::vector<Scalar> z(n, Scalar{});
    z[0] = gamma;
    z[n - 1] = off;
    solve_tridiagonal(bb, off, z);
    const Scalar denom = Scalar{1} + z[0] + off * z[n - 1] / gamma;
    if (std::abs(denom) < 1e-300)
        throw std::runtime_error("cyclic tridiagonal solve: singular correction");
    const Scalar fact = (rhs[0] + off * rhs[n - 1] / gamma) / denom;
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= fact * z[i];
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b))
        throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

} // namespace

TimeWindow::TimeWindow(double t0_, std::size_t n_steps_) : t0(t0_), n_steps(n_steps_) {
    if (!std::isfinite(t0) || t0 <= 0.0)
        throw std::invalid_argument("TimeWindow: duration must be positive and finite");
}

std::size_t TimeWindow::reversed_index(std::size_t k) const {
    if (k > n_steps)
        throw std::domain_error("TimeWindow: step index beyond window");
    return n_steps - k;
}

Potential::Potential(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
        throw std::invalid_argument("Potential: value count does not match grid");
    RealField probe(grid, values);
    require_finite(probe, "Potential");
}

Potential Potential::free_space(const Grid& g) {
    return Potential(g, std::vector<double>(g.size(), 0.0));
}

Potential Potential::infinite_well(const Grid& g) { return free_space(g); }

Potential Potential::harmonic(const Grid& g) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = 0.5 * g.x(i) * g.x(i);
    return Potential(g, std::move(v));
}

Potential Potential::from_csv(const Grid& g, const std::string& path) {
    RealField f = read_real_csv(g, path);
    return Potential(g, std::move(f.values));
}

const ComplexField& FieldHistory::frame(std::size_t k) const {
    if (k >= frames.size())
        throw std::domain_error("FieldHistory: frame index out of range");
    return frames[k];
}

const ComplexField& FieldHistory::frame_at_physical_step(std::size_t k_c) const {
    if (direction == TimeDirection::forward) return frame(k_c);
    return frame(window.reversed_index(k_c));
}

ComplexField step_schrodinger(const ComplexField& f, const Potential& V, double dt,
                              const EvolveOptions& opt) {
    require_same_grid(f.grid, V.grid, "step_schrodinger");
    require_finite(f, "step_schrodinger input");
    if (!std::isfinite(dt) || dt <= 0.0)
        throw std::invalid_argument("step_schrodinger: dt must be positive");
    if (opt.mass <= 0.0)
        throw std::invalid_argument("step_schrodinger: mass must be positive");

    const std::size_t n = f.grid.size();
    const double dx = f.grid.dx();
    const double hop = -1.0 / (2.0 * opt.mass * dx * dx); // off-diagonal of H
    const double diag0 = 1.0 / (opt.mass * dx * dx);      // kinetic diagonal of H
    const Complex half_idt = kI * (0.5 * dt);

    ComplexField out(f.grid);

    if (opt.bc == BoundaryCondition::dirichlet) {
        // Hard walls: boundary nodes are held at zero; solve the interior.
        const std::size_t m = n - 2;
        std::vector<Complex> diag(m), rhs(m);
        const Complex off = half_idt * hop;
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t i = j + 1;
            const Complex h_diag = diag0 + V.values[i];
            diag[j] = 1.0 + half_idt * h_diag;
            const Complex left = (i == 1) ? Complex{} : f.values[i - 1];
            const Complex right = (i == n - 2) ? Complex{} : f.values[i + 1];
            rhs[j] = f.values[i] - half_idt * (hop * (left + right) + h_diag * f.values[i]);
        }
        solve_tridiagonal(diag, off, rhs);
        out.values[0] = Complex{};
        out.values[n - 1] = Complex{};
        for (std::size_t j = 0; j < m; ++j) out.values[j + 1] = rhs[j];
    } else {
        // Periodic ring of n distinct nodes, node n-1 adjacent to node 0.
        std::vector<Complex> diag(n), rhs(n);
        const Complex off = half_idt * hop;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex h_diag = diag0 + V.values[i];
            diag[i] = 1.0 + half_idt * h_diag;
            const Complex left = f.values[(i + n - 1) % n];
            const Complex right = f.values[(i + 1) % n];
            rhs[i] = f.values[i] - half_idt * (hop * (left + right) + h_diag * f.values[i]);
        }
        solve_cyclic_tridiagonal(diag, off, rhs);
        out.values = std::move(rhs);
    }

    require_finite(out, "step_schrodinger output");
    return out;
}

FieldHistory evolve_window(const ComplexField& f0, const Potential& V, const TimeWindow& w,
                           const EvolveOptions& opt) {
    require_same_grid(f0.grid, V.grid, "evolve_window");
    if (!opt.allow_unnormalized) {
        const double nsq = l2_norm_sq(f0);
        if (std::abs(nsq - 1.0) > opt.norm_tolerance)
            throw std::invalid_argument(
                "evolve_window: initial state is not normalized (|psi|^2 integrates to " +
                std::to_string(nsq) + "); normalize it or opt out explicitly");
    }
    FieldHistory h{w, {}, TimeDirection::forward};
    h.frames.reserve(w.n_steps + 1);
    h.frames.push_back(f0);
    for (std::size_t k = 0; k < w.n_steps; ++k)
        h.frames.push_back(step_schrodinger(h.frames.back(), V, w.dt(), opt));
    return h;
}

FieldHistory time_reverse(const FieldHistory& h) {
    FieldHistory r{h.window, {}, h.direction == TimeDirection::forward ? TimeDirection::backward
                                                                       : TimeDirection::forward};
    r.frames.reserve(h.frames.size());
    for (std::size_t k = h.frames.size(); k-- > 0;) r.frames.push_back(conjugate(h.frames[k]));
    return r;
}

FieldHistory evolve_backward_window(const FieldHistory& h, const Potential& V,
                                    const EvolveOptions& opt) {
    if (h.direction != TimeDirection::forward)
        throw std::invalid_argument("evolve_backward_window: expects a forward history");
    if (h.frames.empty())
        throw std::invalid_argument("evolve_backward_window: empty history");
    EvolveOptions o = opt;
    o.allow_unnormalized = true; // the source history already passed its check
    FieldHistory b = evolve_window(conjugate(h.frames.back()), V, h.window, o);
    b.direction = TimeDirection::backward;
    return b;
}

RealField step_heat(const RealField& rho, double diffusion, double dt, const HeatOptions& opt) {
    require_finite(rho, "step_heat input");
    if (!std::isfinite(dt) || dt <= 0.0)
        throw std::invalid_argument("step_heat: dt must be positive");
    if (diffusion < 0.0 && !opt.allow_negative_diffusion)
        throw std::invalid_argument(
            "step_heat: negative diffusion is ill-posed; enable the demo option to study it");

    const std::size_t n = rho.grid.size();
    const double dx = rho.grid.dx();
    const double r = diffusion * dt / (dx * dx);

    // Implicit Euler with zero-flux (mirrored ghost) walls: every row of the
    // Laplacian sums to zero, so a uniform field is exactly invariant. The
    // mirror makes the boundary rows couple with weight -2r, which a general
    // Thomas sweep handles directly.
    std::vector<double> diag(n, 1.0 + 2.0 * r);
    std::vector<double> sub(n, -r), sup(n, -r);
    sup[0] = -2.0 * r;
    sub[n - 1] = -2.0 * r;
    std::vector<double> rhs(rho.values);
    std::vector<double> c(n), d(n);
    double pivot = diag[0];
    if (std::abs(pivot) < 1e-12)
        throw std::runtime_error("step_heat: singular system (choose a smaller dt)");
    c[0] = sup[0] / pivot;
    d[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - sub[i] * c[i - 1];
        if (std::abs(pivot) < 1e-12)
            throw std::runtime_error("step_heat: singular system (choose a smaller dt)");
        c[i] = sup[i] / pivot;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];

    RealField out(rho.grid, std::move(d));
    require_finite(out, "step_heat output");
    return out;
}

RealField evolve_heat(const RealField& rho0, double diffusion, const TimeWindow& w,
                      const HeatOptions& opt) {
    RealField rho = rho0;
    for (std::size_t k = 0; k < w.n_steps; ++k) rho = step_heat(rho, diffusion, w.dt(), opt);
    return rho;
}

double energy_expectation(const ComplexField& f, const Potential& V, const EvolveOptions& opt) {
    require_same_grid(f.grid, V.grid, "energy_expectation");
    const std::size_t n = f.grid.size();
    const double dx = f.grid.dx();
    const double inv2m = 1.0 / (2.0 * opt.mass);
    ComplexField hf(f.grid);
    for (std::size_t i = 0; i < n; ++i) {
        Complex left, right;
        if (opt.bc == BoundaryCondition::periodic) {
            left = f.values[(i + n - 1) % n];
            right = f.values[(i + 1) % n];
        } else {
            left = (i == 0) ? Complex{} : f.values[i - 1];
            right = (i == n - 1) ? Complex{} : f.values[i + 1];
        }
        const Complex lap = (left - 2.0 * f.values[i] + right) / (dx * dx);
        hf.values[i] = -inv2m * lap + V.values[i] * f.values[i];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        acc += w * (std::conj(f.values[i]) * hf.values[i]).real();
    }
    return acc * dx / l2_norm_sq(f);
}

double position_expectation(const ComplexField& f) {
    RealField rho = density(f);
    double mass = integrate(rho, Interval::whole_line());
    RealField xr(f.grid);
    for (std::size_t i = 0; i < f.grid.size(); ++i) xr.values[i] = f.grid.x(i) * rho.values[i];
    return integrate(xr, Interval::whole_line()) / mass;
}

double position_variance(const ComplexField& f) {
    RealField rho = density(f);
    double mass = integrate(rho, Interval::whole_line());
    double mean = position_expectation(f);
    RealField x2r(f.grid);
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        const double d = f.grid.x(i) - mean;
        x2r.values[i] = d * d * rho.values[i];
    }
    return integrate(x2r, Interval::whole_line()) / mass;
}

ComplexField gaussian_packet(const Grid& g, double x0, double sigma0, double k) {
    if (sigma0 <= 0.0)
        throw std::invalid_argument("gaussian_packet: width must be positive");
    ComplexField f(g);
    const double amp = std::pow(2.0 * std::numbers::pi * sigma0 * sigma0, -0.25);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double u = g.x(i) - x0;
        f.values[i] = amp * std::exp(-u * u / (4.0 * sigma0 * sigma0)) *
                      std::exp(kI * (k * g.x(i)));
    }
    return f;
}

ComplexField well_eigenstate(const Grid& g, std::size_t n) {
    if (n == 0)
        throw std::invalid_argument("well_eigenstate: mode number starts at 1");
    const double L = g.x_max() - g.x_min();
    ComplexField f(g);
    const double amp = std::sqrt(2.0 / L);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double u = (g.x(i) - g.x_min()) / L;
        f.values[i] = amp * std::sin(static_cast<double>(n) * std::numbers::pi * u);
    }
    return f;
}

ComplexField harmonic_ground_state(const Grid& g) {
    ComplexField f(g);
    const double amp = std::pow(std::numbers::pi, -0.25);
    for (std::size_t i = 0; i < g.size(); ++i)
        f.values[i] = amp * std::exp(-0.5 * g.x(i) * g.x(i));
    return f;
}

ComplexField uniform_field(const Grid& g) {
    ComplexField f(g);
    for (auto& v : f.values) v = 1.0;
    return f;
}

} // namespace revdiff
