#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace revdiff {

using Complex = std::complex<double>;

/// Thrown when the event calculus is asked for a combination the theory
/// leaves undefined (for example intersecting two non-real events whose
/// independence product is not real) rather than guessing a value.
class UndefinedEventOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A named event carrying a complex measure. `real` marks containment in
/// the real sample space; the calculus never lets such an event carry a
/// measure with a nonzero imaginary part. Non-real events live only in the
/// enclosing hyper-sample space (total measure 1) and may be complex.
struct EventMeasure {
    std::string label;
    Complex value;
    bool real;

    /// An event inside the real sample space; its measure is real by type.
    static EventMeasure real_event(std::string label, double value);

    /// An event extended outside the real sample space; any complex measure.
    static EventMeasure nonreal_event(std::string label, Complex value);
};

/// Measure of the disjoint union a "+" b (finite additivity). Defined for
/// real-with-real, real-with-nonreal, and for two non-real events only when
/// the summed measure lands real (the zero-measure bridge set that pads the
/// real space out to the hyper-sample space); anything else throws
/// UndefinedEventOperation. The result is real only if both inputs are.
EventMeasure disjoint_union(const EventMeasure& a, const EventMeasure& b);

/// Measure of a intersect b under the independence rule mu(a) mu(b). An
/// intersection is contained in each operand, so the result always lies in
/// the real sample space and must carry a real measure: when the product
/// has a nonzero imaginary part the combination is undefined by the theory
/// and throws UndefinedEventOperation. The accepted two-non-real case is
/// exactly the conjugate-pair overlap that produces a real joint measure.
EventMeasure intersect_independent(const EventMeasure& a, const EventMeasure& b);

/// Measure of the complement within the hyper-sample space: 1 - mu(a).
/// Conservatively non-real (measures alone cannot certify containment).
EventMeasure hyper_complement(const EventMeasure& a);

/// The two-equation system for a pair of events that occur together or not
/// at all, made independent by extension outside the real sample space:
///     z1 = z1 z2 + d1,   z2 = z1 z2 + d2,   s = z1 z2 real.
/// Solvable exactly when z2 = z1* and d2 = d1*.
struct EntangledPair {
    Complex z1;
    Complex z2;
    Complex s;
    Complex d1;
    Complex d2;
};

/// Solve the pair system for a given z: z1 = z, z2 = z*, s = |z|^2,
/// d1 = z - s, d2 = d1*. Throws std::invalid_argument on non-finite z.
EntangledPair entangled_pair_solve(Complex z);

/// Split of a forward/backward event pair over a common real core s:
/// d1 = P_T - s and d2 = P_A - s. `consistent` records the reality
/// condition P_T = P_A* (equivalently d1 = d2*); `degenerate_same_set`
/// flags the everything-collapses case d1 = d2 = 0, which the theory rules
/// out because it would leave a real density with no reversible dynamics.
struct EventDecomposition {
    Complex d1;
    Complex d2;
    bool consistent;
    bool degenerate_same_set;
};

EventDecomposition decompose_event(Complex P_T, Complex P_A, double s);

/// Consistency report for the hyper-sample-space bookkeeping: the total
/// measure must be exactly 1 (`normalized`), the two padding sets must
/// cancel, mu(J1) + mu(J2) = 0 (`balanced`), and when both parts are
/// nonzero at least one must be non-real -- two cancelling real parts are
/// legal measure arithmetic but describe no extension, so they are flagged
/// (`real_valued_parts`) and fail `ok`.
struct HyperMeasureReport {
    bool normalized;
    bool balanced;
    bool real_valued_parts;

    bool ok() const { return normalized && balanced && !real_valued_parts; }
};

HyperMeasureReport hyper_measure_check(Complex mu_Omega, Complex mu_J1, Complex mu_J2);

} // namespace revdiff
