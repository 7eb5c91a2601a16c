#include "revdiff/spin2.hpp"

#include <cmath>

namespace revdiff {

namespace {

// The four basis pairing values, indexed [forward label][backward label].
// These are the module's only axioms; everything else (orthonormality as a
// theorem, the Born rule, phase invariance) is evaluated through them.
constexpr double kPairingTable[2][2] = {{1.0, 0.0}, {0.0, 1.0}};

constexpr double kNormTol = 1e-9;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

} // namespace

SpinState make_spin_state(Complex c1, Complex c2, bool auto_normalize) {
    if (!finite(c1) || !finite(c2)) {
        throw std::invalid_argument("make_spin_state: components must be finite");
    }
    const double norm_sq = std::norm(c1) + std::norm(c2);
    if (norm_sq == 0.0) {
        throw std::invalid_argument("make_spin_state: zero vector is a degenerate state");
    }
    if (!auto_normalize && std::abs(norm_sq - 1.0) > kNormTol) {
        throw std::invalid_argument(
            "make_spin_state: |c1|^2 + |c2|^2 must be 1 (pass auto_normalize to rescale)");
    }
    if (norm_sq != 1.0) {
        const double scale = 1.0 / std::sqrt(norm_sq);
        c1 *= scale;
        c2 *= scale;
    }
    return SpinState{c1, c2};
}

SpinSide basis_side(TimeSide side, SpinOutcome o) {
    return SpinSide{side, o == SpinOutcome::up ? std::array<Complex, 2>{1.0, 0.0}
                                               : std::array<Complex, 2>{0.0, 1.0}};
}

Complex star(const SpinSide& a, const SpinSide& b) {
    if (a.side == b.side) {
        const char* name = a.side == TimeSide::forward ? "forward" : "backward";
        throw UndefinedPairing(std::string("star: pairing two ") + name +
                               " sides is undefined; the product needs one forward and one "
                               "backward experiment");
    }
    Complex acc(0.0, 0.0);
    for (int j = 0; j < 2; ++j) {
        for (int m = 0; m < 2; ++m) {
            acc += a.components[j] * b.components[m] * kPairingTable[j][m];
        }
    }
    return acc;
}

double spin_probability(const SpinState& state, SpinOutcome outcome) {
    const Complex c = outcome == SpinOutcome::up ? state.c1 : state.c2;
    const Complex pairing =
        star(basis_side(TimeSide::forward, outcome), basis_side(TimeSide::backward, outcome));
    return (c * std::conj(c) * pairing).real();
}

bool ExclusivityReport::ok() const {
    return cross_up_down == Complex(0.0, 0.0) && cross_down_up == Complex(0.0, 0.0) &&
           probe_real_condition == 0.0 && probe_imag_condition == 0.0 &&
           std::abs(total - 1.0) <= 1e-12;
}

ExclusivityReport exclusivity_sum_check(const SpinState& state) {
    const SpinSide ket_up = basis_side(TimeSide::forward, SpinOutcome::up);
    const SpinSide ket_down = basis_side(TimeSide::forward, SpinOutcome::down);
    const SpinSide bra_up = basis_side(TimeSide::backward, SpinOutcome::up);
    const SpinSide bra_down = basis_side(TimeSide::backward, SpinOutcome::down);

    ExclusivityReport report{};
    report.p_up = spin_probability(state, SpinOutcome::up);
    report.p_down = spin_probability(state, SpinOutcome::down);
    report.cross_up_down = state.c1 * std::conj(state.c2) * star(ket_up, bra_down);
    report.cross_down_up = state.c2 * std::conj(state.c1) * star(ket_down, bra_up);
    report.total =
        report.p_up + report.p_down + (report.cross_up_down + report.cross_down_up).real();

    // With c1 = c2 = 1/sqrt(2) the mixed terms add up to Re(up*down); with
    // c1 = 1/sqrt(2), c2 = i/sqrt(2) they add up to Im(up*down). A unit
    // total for both choices forces the cross pairing to vanish outright.
    const auto cross_sum = [&](const SpinState& probe) {
        const Complex s3 = probe.c1 * std::conj(probe.c2) * star(ket_up, bra_down);
        const Complex s4 = probe.c2 * std::conj(probe.c1) * star(ket_down, bra_up);
        return (s3 + s4).real();
    };
    const double r = 1.0 / std::sqrt(2.0);
    report.probe_real_condition = cross_sum(SpinState{r, r});
    report.probe_imag_condition = cross_sum(SpinState{r, Complex(0.0, r)});
    return report;
}

} // namespace revdiff
