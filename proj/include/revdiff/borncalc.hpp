#pragma once

#include "revdiff/lattice.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace revdiff {

/// Window half-widths for the finite-eps intersection functional, ordered
/// coarse to fine. Halving levels keep eps an exact node multiple, so the
/// windowed prefix sums never interpolate.
struct EpsSchedule {
    std::vector<double> levels;

    /// n_levels windows starting at coarsest_in_dx * dx and halving. The
    /// finest level must stay >= 2 dx or the window degenerates to noise.
    static EpsSchedule geometric(const Grid& g, std::size_t n_levels = 4,
                                 double coarsest_in_dx = 16.0);

    /// Throws std::invalid_argument unless levels are strictly decreasing,
    /// the finest is >= 2 dx and the coarsest fits well inside the domain.
    void validate_for(const Grid& g) const;
};

/// One row of the eps-convergence study.
struct IntersectionEstimate {
    double eps;
    Complex value;
};

/// Neville extrapolation of the rows to eps -> 0, treating the value as a
/// polynomial in eps^2 (the window functionals expand in even powers).
/// Throws std::invalid_argument on fewer than two rows.
Complex extrapolate_even(const std::vector<IntersectionEstimate>& rows);

/// Result of extrapolating the finite-eps values to eps -> 0 with a
/// polynomial model in eps^2 (the functional's expansion is even in eps).
/// `monotone` records whether the rows approach the limit level by level;
/// a false value is a warning that the coarsest windows are outside the
/// asymptotic regime, not an error.
struct BornTable {
    std::vector<IntersectionEstimate> rows;
    Complex extrapolated;
    bool monotone = true;
};

/// The finite-window intersection functional
///     num(F, eps) = Int_F conj(psi)(x) [C(x + eps) - C(x - eps)] dx,
/// with C the running integral of psi, normalized by the same functional
/// over the whole line. Complex at finite eps: the imaginary part carries
/// the probability flux through F's boundary at order eps^2. Throws
/// std::domain_error when the whole-line normalizer vanishes.
Complex intersection_probability_eps(const ComplexField& psi, const Interval& F, double eps);

/// Evaluate the functional on every schedule level and extrapolate to
/// eps -> 0 (Neville in eps^2).
BornTable born_limit(const ComplexField& psi, const Interval& F, const EpsSchedule& schedule);

/// CSV "eps,value_re,value_im"; one row per level plus a final eps = 0 row
/// holding the extrapolated value.
void write_csv(const BornTable& table, const std::string& path);

/// Coefficients <basis_n | psi>. The basis must be orthonormal under the
/// trapezoid inner product within 1e-6 (checked; violations name the pair).
std::vector<Complex> expand_in_basis(const ComplexField& psi,
                                     const std::vector<ComplexField>& basis);

/// |c_n|^2 for each coefficient.
std::vector<double> state_probabilities(const std::vector<Complex>& coeffs);

/// Exact eps -> 0 limit of the (n, m) interference contribution to the
/// F-probability of psi = sum c_k basis_k:
///     c_n conj(c_m) Int_F basis_n conj(basis_m) / <psi|psi>.
/// Summing it over all ordered pairs plus the diagonal |c_n|^2 terms
/// reassembles the full probability.
Complex cross_term(const ComplexField& psi, const std::vector<ComplexField>& basis,
                   std::size_t n, std::size_t m, const Interval& F);

} // namespace revdiff
