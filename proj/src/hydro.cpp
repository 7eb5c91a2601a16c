#include "revdiff/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace revdiff {

namespace {

// Centered first derivative on the interior, second-order one-sided at the
// two ends. Works for real and complex samples.
template <typename T>
std::vector<T> derivative(const std::vector<T>& f, double dx) {
    const std::size_t n = f.size();
    std::vector<T> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
    return d;
}

template <typename T>
std::vector<T> second_derivative(const std::vector<T>& f, double dx) {
    const std::size_t n = f.size();
    const double dx2 = dx * dx;
    std::vector<T> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / dx2;
    }
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dx2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / dx2;
    return d;
}

} // namespace

HydroFields hydro_decompose(const ComplexField& f, double mass) {
    if (mass <= 0.0) {
        throw std::invalid_argument("hydro_decompose: mass must be positive");
    }
    require_finite(f, "hydro_decompose input");
    const Grid& g = f.grid;
    const std::size_t n = g.size();
    const double beta_sq = 1.0 / (2.0 * mass);

    HydroFields hf{RealField{g}, RealField{g}, RealField{g}, RealField{g},
                   RealField{g}, RealField{g}, std::vector<std::uint8_t>(n, 0), 0.0};

    double rho_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        hf.rho.values[i] = std::norm(f.values[i]);
        rho_max = std::max(rho_max, hf.rho.values[i]);
    }
    if (rho_max == 0.0) {
        throw std::domain_error("hydro_decompose: field is identically zero");
    }
    hf.rho_floor = 1e-12 * rho_max;
    for (std::size_t i = 0; i < n; ++i) {
        hf.valid[i] = hf.rho.values[i] >= hf.rho_floor ? 1 : 0;
    }

    const std::vector<Complex> dpsi = derivative(f.values, g.dx());
    const std::vector<double> drho = derivative(hf.rho.values, g.dx());

    std::vector<double> sqrt_rho(n);
    for (std::size_t i = 0; i < n; ++i) {
        sqrt_rho[i] = std::sqrt(hf.rho.values[i]);
    }
    const std::vector<double> d2_sqrt_rho = second_derivative(sqrt_rho, g.dx());

    for (std::size_t i = 0; i < n; ++i) {
        if (!hf.valid[i]) {
            hf.eta.values[i] = 0.0;
            hf.u.values[i] = 0.0;
            hf.Q.values[i] = 0.0;
            continue;
        }
        hf.eta.values[i] = std::imag(dpsi[i] / f.values[i]) / mass;
        hf.u.values[i] = beta_sq * drho[i] / hf.rho.values[i];
        hf.Q.values[i] = -beta_sq * d2_sqrt_rho[i] / sqrt_rho[i];
    }

    // Unwrapped phase: anchor at the density maximum and accumulate the
    // principal-branch increment outward in both directions.
    std::size_t i0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (hf.rho.values[i] > hf.rho.values[i0]) i0 = i;
    }
    const double two_pi = 2.0 * std::acos(-1.0);
    hf.S.values[i0] = std::arg(f.values[i0]);
    for (std::size_t i = i0 + 1; i < n; ++i) {
        const double step = std::arg(f.values[i]) - std::arg(f.values[i - 1]);
        hf.S.values[i] = hf.S.values[i - 1] + std::remainder(step, two_pi);
    }
    for (std::size_t i = i0; i > 0; --i) {
        const double step = std::arg(f.values[i - 1]) - std::arg(f.values[i]);
        hf.S.values[i - 1] = hf.S.values[i] + std::remainder(step, two_pi);
    }

    const std::vector<double> dQ = derivative(hf.Q.values, g.dx());
    for (std::size_t i = 0; i < n; ++i) {
        hf.F_Q.values[i] = hf.valid[i] ? -dQ[i] : 0.0;
    }
    return hf;
}

KineticEnergySplit kinetic_energy(const ComplexField& f, double mass) {
    const double nrm = l2_norm_sq(f);
    if (std::abs(nrm - 1.0) > 1e-6) {
        throw std::invalid_argument("kinetic_energy: field is not normalized (|psi|^2 integrates to " +
                                    std::to_string(nrm) + ")");
    }
    const Grid& g = f.grid;
    const std::size_t n = g.size();

    const std::vector<Complex> d2psi = second_derivative(f.values, g.dx());
    ComplexField lhs_integrand{g};
    for (std::size_t i = 0; i < n; ++i) {
        lhs_integrand.values[i] = std::conj(f.values[i]) * d2psi[i];
    }
    const double lhs = -std::real(integrate(lhs_integrand, Interval::whole_line())) / (2.0 * mass);

    const HydroFields hf = hydro_decompose(f, mass);
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        integrand[i] = hf.rho.values[i] *
                       (hf.eta.values[i] * hf.eta.values[i] + hf.u.values[i] * hf.u.values[i]);
    }
    // rho (eta^2 + u^2) = |psi'|^2 / m^2 has a finite limit where rho -> 0
    // (e.g. hard-wall nodes), but the ratio quantities are masked there.
    // Complete the quadrature by linear extension from the nearest valid
    // neighbours on each side.
    for (std::size_t i = 0; i < n; ++i) {
        if (hf.valid[i]) continue;
        double left = 0.0, right = 0.0;
        bool has_left = false, has_right = false;
        // Nearest run of >= 2 valid nodes to the left.
        for (std::size_t j = i; j > 1; --j) {
            if (hf.valid[j - 1] && hf.valid[j - 2]) {
                const std::size_t a = j - 2, b = j - 1;
                left = integrand[b] + (integrand[b] - integrand[a]) * double(i - b);
                has_left = true;
                break;
            }
        }
        for (std::size_t j = i + 1; j + 1 < n; ++j) {
            if (hf.valid[j] && hf.valid[j + 1]) {
                right = integrand[j] - (integrand[j + 1] - integrand[j]) * double(j - i);
                has_right = true;
                break;
            }
        }
        if (has_left && has_right) {
            integrand[i] = 0.5 * (left + right);
        } else if (has_left) {
            integrand[i] = left;
        } else if (has_right) {
            integrand[i] = right;
        } else {
            integrand[i] = 0.0;
        }
    }
    const double rhs = 0.5 * mass * integrate(RealField{g, integrand}, Interval::whole_line());
    return {lhs, rhs};
}

RealField continuity_residual(const FieldHistory& h, double mass) {
    if (h.frames.size() < 3) {
        throw std::invalid_argument("continuity_residual: need at least 3 frames");
    }
    const Grid& g = h.frames.front().grid;
    const double dt = h.window.dt();
    const std::size_t n = g.size();

    RealField worst{g};
    for (std::size_t k = 1; k + 1 < h.frames.size(); ++k) {
        const HydroFields hf = hydro_decompose(h.frames[k], mass);
        std::vector<double> flux(n);
        for (std::size_t i = 0; i < n; ++i) {
            flux[i] = hf.valid[i] ? hf.rho.values[i] * hf.eta.values[i] : 0.0;
        }
        const std::vector<double> div = derivative(flux, g.dx());
        for (std::size_t i = 0; i < n; ++i) {
            const double drho_dt =
                (std::norm(h.frames[k + 1].values[i]) - std::norm(h.frames[k - 1].values[i])) /
                (2.0 * dt);
            worst.values[i] = std::max(worst.values[i], std::abs(drho_dt + div[i]));
        }
    }
    return worst;
}

double velocity_reversal_check(const FieldHistory& h, double mass, std::size_t n_samples) {
    if (h.frames.empty()) {
        throw std::invalid_argument("velocity_reversal_check: empty history");
    }
    const FieldHistory rev = time_reverse(h);
    const std::size_t n_steps = h.frames.size() - 1;
    if (n_samples == 0) n_samples = 1;

    double worst = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const std::size_t k =
            n_samples == 1 ? 0 : (s * n_steps) / (n_samples - 1);
        const HydroFields fwd = hydro_decompose(h.frame_at_physical_step(k), mass);
        const HydroFields bwd = hydro_decompose(rev.frame_at_physical_step(k), mass);
        for (std::size_t i = 0; i < fwd.rho.grid.size(); ++i) {
            if (!fwd.valid[i] || !bwd.valid[i]) continue;
            worst = std::max(worst, std::abs(bwd.eta.values[i] + fwd.eta.values[i]));
        }
    }
    return worst;
}

NewtonResidualFields newton_residual_fields(const FieldHistory& h, std::size_t k,
                                            const Potential& V, double mass) {
    if (h.frames.size() < 3 || k == 0 || k + 1 >= h.frames.size()) {
        throw std::invalid_argument("newton_residual_fields: k must index an interior frame");
    }
    const Grid& g = h.frames.front().grid;
    if (!(V.grid == g)) {
        throw std::invalid_argument("newton_residual_fields: potential grid mismatch");
    }
    const double dt = h.window.dt();
    const std::size_t n = g.size();

    const HydroFields prev = hydro_decompose(h.frames[k - 1], mass);
    const HydroFields cur = hydro_decompose(h.frames[k], mass);
    const HydroFields next = hydro_decompose(h.frames[k + 1], mass);

    std::vector<double> v_plus_q(n);
    for (std::size_t i = 0; i < n; ++i) {
        v_plus_q[i] = V.values[i] + cur.Q.values[i];
    }
    const std::vector<double> grad = derivative(v_plus_q, g.dx());
    const std::vector<double> deta_dx = derivative(cur.eta.values, g.dx());

    NewtonResidualFields out{RealField{g}, RealField{g}, std::vector<std::uint8_t>(n, 0)};
    for (std::size_t i = 1; i + 1 < n; ++i) {
        // The gradient stencils reach one node either side, so demand a valid
        // neighbourhood at the current frame and validity across time.
        if (!cur.valid[i - 1] || !cur.valid[i] || !cur.valid[i + 1]) continue;
        if (!prev.valid[i] || !next.valid[i]) continue;
        out.valid[i] = 1;
        const double deta_dt = (next.eta.values[i] - prev.eta.values[i]) / (2.0 * dt);
        out.as_printed.values[i] = deta_dt + grad[i] / mass;
        out.with_convective.values[i] =
            out.as_printed.values[i] + cur.eta.values[i] * deta_dx[i];
    }
    return out;
}

NewtonResidual newton_residual(const FieldHistory& h, const Potential& V, double mass) {
    if (h.frames.size() < 3) {
        throw std::invalid_argument("newton_residual: need at least 3 frames");
    }
    NewtonResidual worst{0.0, 0.0};
    for (std::size_t k = 1; k + 1 < h.frames.size(); ++k) {
        const NewtonResidualFields f = newton_residual_fields(h, k, V, mass);
        for (std::size_t i = 0; i < f.valid.size(); ++i) {
            if (!f.valid[i]) continue;
            worst.as_printed = std::max(worst.as_printed, std::abs(f.as_printed.values[i]));
            worst.with_convective =
                std::max(worst.with_convective, std::abs(f.with_convective.values[i]));
        }
    }
    return worst;
}

void write_csv(const HydroFields& hf, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) {
        throw std::runtime_error("write_csv: cannot open " + path);
    }
    std::fprintf(fp, "x,rho,eta,u,Q,F_Q,valid\n");
    const Grid& g = hf.rho.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", g.x(i),
                     hf.rho.values[i], hf.eta.values[i], hf.u.values[i], hf.Q.values[i],
                     hf.F_Q.values[i], int(hf.valid[i]));
    }
    std::fclose(fp);
}

} // namespace revdiff
