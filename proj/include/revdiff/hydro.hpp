#pragma once

#include "revdiff/evolve.hpp"
#include "revdiff/lattice.hpp"

#include <cstdint>
#include <vector>

namespace revdiff {

/// Madelung decomposition of a complex field: density rho, current velocity
/// eta, osmotic velocity u, unwrapped phase S, quantum potential Q and
/// quantum force F_Q. Nodes where rho < rho_floor carry no reliable ratio
/// quantities and are masked out via `valid`; the first and last node are
/// computed with one-sided differences.
struct HydroFields {
    RealField rho;
    RealField eta;
    RealField u;
    RealField S;
    RealField Q;
    RealField F_Q;
    std::vector<std::uint8_t> valid;
    double rho_floor;
};

/// Both routes to the mean kinetic energy: lhs from -(1/2m) Int psi* psi'',
/// rhs from (m/2) Int rho (eta^2 + u^2). Computed independently; callers
/// assert agreement.
struct KineticEnergySplit {
    double lhs;
    double rhs;
};

/// Residual diagnostics for the momentum balance d(eta)/dt = -(1/m) d(V+Q)/dx.
/// `as_printed` evaluates exactly that equation; `with_convective` adds the
/// material-derivative term eta * d(eta)/dx on the left, the form standard
/// hydrodynamics would use. Both are reported so the difference is visible.
struct NewtonResidual {
    double as_printed;
    double with_convective;
};

/// Extract all hydrodynamic fields from f. beta^2 = 1/(2 mass) enters eta, u,
/// Q. Throws std::domain_error on an all-zero field.
HydroFields hydro_decompose(const ComplexField& f, double mass = 1.0);

/// Requires l2_norm_sq(f) = 1 within 1e-6. The rhs quadrature fills masked
/// nodes by linear extrapolation of the integrand from the nearest valid
/// neighbours (the limit is finite at simple zeros, e.g. hard walls).
KineticEnergySplit kinetic_energy(const ComplexField& f, double mass = 1.0);

/// Max-over-time field of | d(rho)/dt + d(rho eta)/dx | with centered
/// differences in t and x; needs at least 3 frames. The flux at masked nodes
/// is taken as zero (rho vanishes there to working precision).
RealField continuity_residual(const FieldHistory& h, double mass = 1.0);

/// Computes eta from time_reverse(h) and from h at the same physical instants
/// (five evenly spaced by default) and returns max |eta_rev + eta_fwd| over
/// commonly valid nodes. Exact up to roundoff: conjugation negates eta.
double velocity_reversal_check(const FieldHistory& h, double mass = 1.0,
                               std::size_t n_samples = 5);

/// Max residual of the momentum balance over interior times and valid nodes.
NewtonResidual newton_residual(const FieldHistory& h, const Potential& V, double mass = 1.0);

/// Per-node residual fields of the momentum balance at interior frame k
/// (1 <= k <= n_steps-1), for tests that probe specific instants/regions.
struct NewtonResidualFields {
    RealField as_printed;
    RealField with_convective;
    std::vector<std::uint8_t> valid;
};
NewtonResidualFields newton_residual_fields(const FieldHistory& h, std::size_t k,
                                            const Potential& V, double mass = 1.0);

/// CSV export with columns x, rho, eta, u, Q, F_Q, valid.
void write_csv(const HydroFields& hf, const std::string& path);

} // namespace revdiff
