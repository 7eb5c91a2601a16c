#include "revdiff/eventcalc.hpp"

#include <cmath>

namespace revdiff {

namespace {

// Pure complex arithmetic resolves to machine precision; values routed in
// from quadratures carry discretisation noise and get the looser bound.
constexpr double kArithmeticTol = 1e-15;
constexpr double kQuadratureTol = 1e-12;

bool lands_real(const Complex& v) { return std::abs(v.imag()) <= kQuadratureTol; }

Complex snapped_real(const Complex& v) { return Complex(v.real(), 0.0); }

} // namespace

EventMeasure EventMeasure::real_event(std::string label, double value) {
    return EventMeasure{std::move(label), Complex(value, 0.0), true};
}

EventMeasure EventMeasure::nonreal_event(std::string label, Complex value) {
    return EventMeasure{std::move(label), value, false};
}

EventMeasure disjoint_union(const EventMeasure& a, const EventMeasure& b) {
    const Complex sum = a.value + b.value;
    std::string label = "(" + a.label + " + " + b.label + ")";
    if (a.real && b.real) {
        return EventMeasure{std::move(label), snapped_real(sum), true};
    }
    if (!a.real && !b.real) {
        if (!lands_real(sum)) {
            throw UndefinedEventOperation(
                "union of non-real events '" + a.label + "' and '" + b.label +
                "' is undefined by the theory: the total measure stays non-real");
        }
        return EventMeasure{std::move(label), snapped_real(sum), false};
    }
    return EventMeasure{std::move(label), sum, false};
}

EventMeasure intersect_independent(const EventMeasure& a, const EventMeasure& b) {
    const Complex product = a.value * b.value;
    if (!lands_real(product)) {
        throw UndefinedEventOperation(
            "intersection of '" + a.label + "' and '" + b.label +
            "' is undefined by the theory: it lies in the real sample space "
            "but the independence product is not real");
    }
    return EventMeasure{"(" + a.label + " * " + b.label + ")", snapped_real(product), true};
}

EventMeasure hyper_complement(const EventMeasure& a) {
    return EventMeasure{"complement(" + a.label + ")", Complex(1.0, 0.0) - a.value, false};
}

EntangledPair entangled_pair_solve(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw std::invalid_argument("entangled_pair_solve: z must be finite");
    }
    EntangledPair pair;
    pair.z1 = z;
    pair.z2 = std::conj(z);
    pair.s = Complex(std::norm(z), 0.0);
    pair.d1 = z - pair.s;
    pair.d2 = std::conj(pair.d1);
    return pair;
}

EventDecomposition decompose_event(Complex P_T, Complex P_A, double s) {
    EventDecomposition d;
    d.d1 = P_T - s;
    d.d2 = P_A - s;
    d.consistent = std::abs(P_T - std::conj(P_A)) <= kQuadratureTol;
    d.degenerate_same_set =
        std::abs(d.d1) <= kQuadratureTol && std::abs(d.d2) <= kQuadratureTol;
    return d;
}

HyperMeasureReport hyper_measure_check(Complex mu_Omega, Complex mu_J1, Complex mu_J2) {
    HyperMeasureReport report;
    report.normalized = std::abs(mu_Omega - Complex(1.0, 0.0)) <= kArithmeticTol;
    report.balanced = std::abs(mu_J1 + mu_J2) <= kArithmeticTol;
    report.real_valued_parts = std::abs(mu_J1) > 0.0 && std::abs(mu_J2) > 0.0 &&
                               std::abs(mu_J1.imag()) <= kArithmeticTol &&
                               std::abs(mu_J2.imag()) <= kArithmeticTol;
    return report;
}

} // namespace revdiff
