#include "revdiff/borncalc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace revdiff {

namespace {

// Running integral of psi evaluated at an arbitrary abscissa, clamped to the
// accumulated totals outside the grid (psi is treated as zero there).
Complex cumulative_at(const Grid& g, const std::vector<Complex>& cdf, double x) {
    if (x <= g.x_min()) return cdf.front();
    if (x >= g.x_max()) return cdf.back();
    const double s = (x - g.x_min()) / g.dx();
    const std::size_t j = std::min(std::size_t(s), g.size() - 2);
    const double w = s - double(j);
    return (1.0 - w) * cdf[j] + w * cdf[j + 1];
}

// Trapezoid integral of conj(psi)(x) [C(x+eps) - C(x-eps)] over the node
// range [lo, hi].
Complex windowed_overlap(const ComplexField& psi, const std::vector<Complex>& cdf,
                         std::size_t lo, std::size_t hi, double eps) {
    const Grid& g = psi.grid;
    Complex acc = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double x = g.x(i);
        const Complex window =
            cumulative_at(g, cdf, x + eps) - cumulative_at(g, cdf, x - eps);
        const double weight = (i == lo || i == hi) ? 0.5 : 1.0;
        acc += weight * std::conj(psi.values[i]) * window;
    }
    return acc * g.dx();
}

} // namespace

EpsSchedule EpsSchedule::geometric(const Grid& g, std::size_t n_levels,
                                   double coarsest_in_dx) {
    EpsSchedule s;
    double eps = coarsest_in_dx * g.dx();
    for (std::size_t k = 0; k < n_levels; ++k) {
        s.levels.push_back(eps);
        eps *= 0.5;
    }
    s.validate_for(g);
    return s;
}

void EpsSchedule::validate_for(const Grid& g) const {
    if (levels.size() < 2) {
        throw std::invalid_argument("EpsSchedule: need at least two levels to extrapolate");
    }
    for (std::size_t k = 1; k < levels.size(); ++k) {
        if (!(levels[k] < levels[k - 1])) {
            throw std::invalid_argument("EpsSchedule: levels must decrease strictly");
        }
    }
    if (levels.back() < 2.0 * g.dx() * (1.0 - 1e-12)) {
        throw std::invalid_argument(
            "EpsSchedule: finest eps " + std::to_string(levels.back()) +
            " is below two grid spacings; the window cannot resolve the integrand");
    }
    const double span = g.x_max() - g.x_min();
    if (levels.front() > 0.25 * span) {
        throw std::invalid_argument("EpsSchedule: coarsest eps does not fit in the domain");
    }
}

Complex intersection_probability_eps(const ComplexField& psi, const Interval& F, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("intersection_probability_eps: eps must be positive");
    }
    const Grid& g = psi.grid;
    const std::vector<Complex> cdf = cumulative_integral(psi);
    const Complex denominator = windowed_overlap(psi, cdf, 0, g.size() - 1, eps);
    if (std::abs(denominator) < 1e-14) {
        throw std::domain_error(
            "intersection_probability_eps: whole-line normalizer vanishes");
    }
    const SnappedInterval s = snap_interval(g, F);
    return windowed_overlap(psi, cdf, s.lo, s.hi, eps) / denominator;
}

Complex extrapolate_even(const std::vector<IntersectionEstimate>& rows) {
    if (rows.size() < 2) {
        throw std::invalid_argument("extrapolate_even: need at least two rows");
    }
    // Neville tableau in t = eps^2, evaluated at t = 0.
    std::vector<double> t(rows.size());
    std::vector<Complex> p(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t[i] = rows[i].eps * rows[i].eps;
        p[i] = rows[i].value;
    }
    for (std::size_t m = 1; m < p.size(); ++m) {
        for (std::size_t i = 0; i + m < p.size(); ++i) {
            p[i] = (t[i + m] * p[i] - t[i] * p[i + 1]) / (t[i + m] - t[i]);
        }
    }
    return p[0];
}

BornTable born_limit(const ComplexField& psi, const Interval& F, const EpsSchedule& schedule) {
    schedule.validate_for(psi.grid);

    BornTable table;
    for (double eps : schedule.levels) {
        table.rows.push_back({eps, intersection_probability_eps(psi, F, eps)});
    }
    table.extrapolated = extrapolate_even(table.rows);

    double prev = std::numeric_limits<double>::infinity();
    for (const IntersectionEstimate& row : table.rows) {
        const double residual = std::abs(row.value - table.extrapolated);
        if (residual > prev * (1.0 + 1e-9) + 1e-15) {
            table.monotone = false;
        }
        prev = residual;
    }
    return table;
}

void write_csv(const BornTable& table, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) {
        throw std::runtime_error("write_csv: cannot open " + path);
    }
    std::fprintf(fp, "eps,value_re,value_im\n");
    for (const IntersectionEstimate& row : table.rows) {
        std::fprintf(fp, "%.17g,%.17g,%.17g\n", row.eps, row.value.real(),
                     row.value.imag());
    }
    std::fprintf(fp, "0,%.17g,%.17g\n", table.extrapolated.real(),
                 table.extrapolated.imag());
    std::fclose(fp);
}

std::vector<Complex> expand_in_basis(const ComplexField& psi,
                                     const std::vector<ComplexField>& basis) {
    if (basis.empty()) {
        throw std::invalid_argument("expand_in_basis: empty basis");
    }
    const Grid& g = psi.grid;
    for (std::size_t n = 0; n < basis.size(); ++n) {
        if (!(basis[n].grid == g)) {
            throw std::invalid_argument("expand_in_basis: basis state " + std::to_string(n) +
                                        " lives on a different grid");
        }
    }
    for (std::size_t n = 0; n < basis.size(); ++n) {
        for (std::size_t m = n; m < basis.size(); ++m) {
            ComplexField prod{g};
            for (std::size_t i = 0; i < g.size(); ++i) {
                prod.values[i] = std::conj(basis[n].values[i]) * basis[m].values[i];
            }
            const Complex gram = integrate(prod, Interval::whole_line());
            const double expected = n == m ? 1.0 : 0.0;
            if (std::abs(gram - expected) > 1e-6) {
                throw std::invalid_argument("expand_in_basis: basis is not orthonormal at pair (" +
                                            std::to_string(n) + ", " + std::to_string(m) + ")");
            }
        }
    }

    std::vector<Complex> coeffs(basis.size());
    for (std::size_t n = 0; n < basis.size(); ++n) {
        ComplexField prod{g};
        for (std::size_t i = 0; i < g.size(); ++i) {
            prod.values[i] = std::conj(basis[n].values[i]) * psi.values[i];
        }
        coeffs[n] = integrate(prod, Interval::whole_line());
    }
    return coeffs;
}

std::vector<double> state_probabilities(const std::vector<Complex>& coeffs) {
    std::vector<double> p(coeffs.size());
    for (std::size_t n = 0; n < coeffs.size(); ++n) p[n] = std::norm(coeffs[n]);
    return p;
}

Complex cross_term(const ComplexField& psi, const std::vector<ComplexField>& basis,
                   std::size_t n, std::size_t m, const Interval& F) {
    if (n >= basis.size() || m >= basis.size()) {
        throw std::out_of_range("cross_term: basis index out of range");
    }
    const std::vector<Complex> coeffs = expand_in_basis(psi, basis);
    const Grid& g = psi.grid;
    ComplexField prod{g};
    for (std::size_t i = 0; i < g.size(); ++i) {
        prod.values[i] = basis[n].values[i] * std::conj(basis[m].values[i]);
    }
    const double norm_sq = l2_norm_sq(psi);
    if (norm_sq <= 0.0) {
        throw std::domain_error("cross_term: zero state");
    }
    return coeffs[n] * std::conj(coeffs[m]) * integrate(prod, F) / norm_sq;
}

} // namespace revdiff
