#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace revdiff {

using Complex = std::complex<double>;

/// Thrown when the "*" pairing is applied to two sides of the same time
/// orientation. The pairing models the intersection of independent forward
/// and backward experiments; bra-with-bra or ket-with-ket has no defined
/// value in the algebra.
class UndefinedPairing : public std::logic_error {
  public:
    explicit UndefinedPairing(const std::string& what) : std::logic_error(what) {}
};

/// Time orientation of a quasi-probability vector: kets describe the
/// forward-moving particle, bras the backward-moving one.
enum class TimeSide { forward, backward };

enum class SpinOutcome { up, down };

/// Two complex quasi-probability components over the {up, down} labels,
/// tagged with the time orientation they belong to.
struct SpinSide {
    TimeSide side;
    std::array<Complex, 2> components;
};

/// Normalized two-level state. The ket carries (c1, c2) and the bra carries
/// the elementwise conjugates: the two sides are entangled partners, never
/// independent data.
struct SpinState {
    Complex c1;
    Complex c2;

    SpinSide ket() const { return SpinSide{TimeSide::forward, {c1, c2}}; }
    SpinSide bra() const {
        return SpinSide{TimeSide::backward, {std::conj(c1), std::conj(c2)}};
    }
};

/// Validates |c1|^2 + |c2|^2 = 1 within 1e-9, then snaps the stored
/// components to unit norm (so downstream identities see at most a couple of
/// ulp of drift). With auto_normalize set, any nonzero finite vector is
/// rescaled instead of rejected. Throws std::invalid_argument on the zero
/// vector, non-finite input, or an off-norm vector without the flag.
SpinState make_spin_state(Complex c1, Complex c2, bool auto_normalize = false);

/// The basis vectors of one orientation: "anywhere in spacetime given spin
/// up" has components (1, 0), the spin-down partner (0, 1).
SpinSide basis_side(TimeSide side, SpinOutcome o);

/// The "*" pairing: bilinear in the stored components, expanded over the
/// fixed basis table  up*up = down*down = 1,  up*down = down*up = 0.
/// Defined only between opposite time orientations; argument order is
/// immaterial. It never conjugates anything itself -- the familiar
/// sesquilinear bra-ket behavior emerges because bra components are stored
/// conjugated.
Complex star(const SpinSide& a, const SpinSide& b);

/// Probability of measuring the outcome, computed through the pairing route
/// c c* (omega_oforward * omega_obackward); equals |c_outcome|^2.
double spin_probability(const SpinState& state, SpinOutcome outcome);

/// Bookkeeping behind the two-level Born rule: the full real event splits
/// into both-sides-up, both-sides-down, and two mixed forward/backward
/// intersections. The pairing table must kill the mixed terms or the total
/// measure would depend on the relative phase of c1 and c2.
struct ExclusivityReport {
    double p_up;            // measure of the both-sides-up piece
    double p_down;          // measure of the both-sides-down piece
    Complex cross_up_down;  // c1 c2* (up_forward * down_backward)
    Complex cross_down_up;  // c2 c1* (down_forward * up_backward)
    double total;           // p_up + p_down + Re(cross terms)

    // The two coefficient choices that isolate the real and imaginary part
    // of the up-down pairing; both must vanish for the table to be
    // consistent with a unit total for every phase.
    double probe_real_condition;  // from the (1/sqrt2, 1/sqrt2) probe
    double probe_imag_condition;  // from the (1/sqrt2, i/sqrt2) probe

    bool ok() const;
};

ExclusivityReport exclusivity_sum_check(const SpinState& state);

} // namespace revdiff
