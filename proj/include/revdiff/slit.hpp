#pragma once

#include "revdiff/evolve.hpp"
#include "revdiff/lattice.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace revdiff {

/// Geometry and timing of the two-slit run: component Gaussians of width
/// sigma_s centered at +/- d/2, common carrier momentum k, examined on the
/// screen at time t_screen.
struct SlitConfig {
    double d = 2.0;
    double sigma_s = 0.25;
    double k = 0.0;
    double t_screen = 2.0;
};

/// The two component states and their normalized superposition
///     psi = (psi1 + psi2) / sqrt(2 + 2 Re<psi1|psi2>),
/// which has unit norm even when the slits overlap. `overlap` is the
/// discrete <psi1|psi2>.
struct SlitState {
    ComplexField psi1;
    ComplexField psi2;
    ComplexField psi;
    Complex overlap;
};

/// Build the two-slit state on g. Throws std::invalid_argument when the
/// config is out of range or a component's tail density at a wall exceeds
/// 1e-10 (hard walls would then distort the run), and std::domain_error
/// when the superposition normalizer degenerates (components cancel).
SlitState slit_state(const SlitConfig& cfg, const Grid& g);

/// The four pairwise intersection quadratures over a region F at screen
/// time: diagonal terms real (particle content of each component), off-
/// diagonal terms complex (interference content), P21 = P12* by symmetry
/// of the window kernel. Raw values; `normalized_total` divides the sum by
/// the superposition normalizer so it reproduces the full Born value of F.
struct FourTerms {
    Complex P11;
    Complex P22;
    Complex P12;
    Complex P21;
    /// 2 + 2 Re<psi1|psi2> of the evolved components.
    double norm_sq;

    Complex raw_sum() const { return P11 + P22 + P12 + P21; }
    Complex normalized_total() const { return raw_sum() / norm_sq; }
};

/// Evolve both initial components to t_s under the same potential, then
/// evaluate the four terms on F via the symmetric finite-window kernel
///     K_jm(F, eps) = Int_F Int_F [|x - y| <= eps] psi_j(x) conj(psi_m)(y),
/// extrapolated to eps -> 0 and normalized by the mean whole-line diagonal
/// kernel. Throws std::runtime_error if an evolved component's wall
/// density exceeds 1e-10 (the state hit the box edge before t_s).
FourTerms four_terms(const ComplexField& psi1, const ComplexField& psi2, const Interval& F,
                     double t_s, const Potential& V);

/// |psi(x, t_s)|^2 evolved under V and binned into `bins` equal screen
/// cells; the returned field lives on the grid of bin centers and its
/// values are bin masses summing to exactly 1. Requires 2 <= bins <= n.
RealField screen_profile(const ComplexField& psi, double t_s, const Potential& V,
                         std::size_t bins);

/// One screen cell of the fringe dataset: bin center, bin mass of the
/// normalized superposition, and the four terms evaluated on the cell.
struct ScreenBin {
    double x;
    double intensity;
    FourTerms terms;
};

/// Evolve once and evaluate intensity plus four terms on every screen cell.
std::vector<ScreenBin> screen_dataset(const ComplexField& psi1, const ComplexField& psi2,
                                      double t_s, const Potential& V, std::size_t bins);

/// CSV "x,intensity,P11_re,P22_re,P12_re,P12_im", one row per screen cell.
void write_csv(const std::vector<ScreenBin>& dataset, const std::string& path);

/// Closed-form free evolution of a normalized Gaussian packet released at
/// x0 with width sigma and momentum k (exact for V = 0).
Complex free_gaussian_at(double x, double t, double x0, double sigma, double k);

/// Normalized |psi1 + psi2|^2 / (2 + 2 Re<psi1|psi2>) at (x, t) from the
/// closed-form free evolution of both components.
double two_slit_intensity(const SlitConfig& cfg, double t, double x);

/// Fringe spacing of the far-field pattern including the finite-time
/// envelope correction: (2 pi t / d) (1 + 4 sigma_s^4 / t^2).
double fringe_spacing_estimate(const SlitConfig& cfg, double t);

/// Location of the intensity minimum of the analytic profile nearest x0
/// (golden-section search over one fringe around x0).
double dark_fringe_near(const SlitConfig& cfg, double t, double x0);

/// Oscillation metrics of a binned profile restricted to |x| <= half_width:
/// mean gap between interior local minima (dark fringes sit still while the
/// envelope drags bright maxima inward), and visibility measured at interior
/// local minima against their flanking maxima (0 when the profile has no
/// interior dip, as for a single slit). n_peaks counts the local maxima.
struct FringeMetrics {
    double spacing;
    double visibility;
    std::size_t n_peaks;
};

FringeMetrics fringe_metrics(const RealField& profile, double half_width);

} // namespace revdiff
