#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace revdiff {

using Complex = std::complex<double>;

/// Uniform 1-D grid with both endpoints included as nodes.
/// Spacing dx = (x_max - x_min) / (n - 1).
class Grid {
public:
    Grid(double x_min, double x_max, std::size_t n);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double dx() const { return dx_; }

    /// Abscissa of node i.
    double x(std::size_t i) const { return x_min_ + dx_ * static_cast<double>(i); }

    bool contains(double x) const { return x >= x_min_ && x <= x_max_; }

    /// Index of the node closest to x (x must lie inside the grid).
    std::size_t nearest_node(double x) const;

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
    }

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double dx_;
};

/// Closed interval [lo, hi] used as an integration region. The whole grid
/// domain is representable explicitly so callers never need sentinel bounds.
class Interval {
public:
    Interval(double lo, double hi);

    /// Region covering the entire grid the interval is later paired with.
    static Interval whole_line();

    bool is_whole_line() const { return whole_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    Interval() : lo_(0.0), hi_(0.0), whole_(true) {}
    double lo_;
    double hi_;
    bool whole_;
};

/// Result of snapping interval endpoints to grid nodes. `snap_lo`/`snap_hi`
/// are the absolute distances the endpoints moved; experiments surface them
/// in report metadata so their effect can be bounded.
struct SnappedInterval {
    std::size_t lo;
    std::size_t hi;
    double snap_lo;
    double snap_hi;
};

/// Complex-valued function sampled on a grid.
struct ComplexField {
    Grid grid;
    std::vector<Complex> values;

    ComplexField(Grid g, std::vector<Complex> v);
    explicit ComplexField(Grid g);
};

/// Real-valued function sampled on a grid.
struct RealField {
    Grid grid;
    std::vector<double> values;

    RealField(Grid g, std::vector<double> v);
    explicit RealField(Grid g);
};

/// Snap interval endpoints to the nearest nodes. Throws std::domain_error if
/// the interval pokes outside the grid domain.
SnappedInterval snap_interval(const Grid& g, const Interval& region);

/// Trapezoid quadrature of f over the node-snapped region.
Complex integrate(const ComplexField& f, const Interval& region);
double integrate(const RealField& f, const Interval& region);

/// Trapezoid quadrature of |f|^2 over the whole grid.
double l2_norm_sq(const ComplexField& f);
double l2_norm_sq(const RealField& f);

/// L2 norm of the pointwise difference of two same-grid fields.
double l2_distance(const ComplexField& a, const ComplexField& b);
double l2_distance(const RealField& a, const RealField& b);

/// Pointwise complex conjugate.
ComplexField conjugate(const ComplexField& f);

/// |f|^2 as a real field.
RealField density(const ComplexField& f);

/// Rescale f so that l2_norm_sq(f) == 1. Throws on an all-zero field.
void normalize(ComplexField& f);
void normalize_density(RealField& rho);

/// Running trapezoid integral C with C[0] = 0 and C[i] = integral up to node i.
std::vector<Complex> cumulative_integral(const ComplexField& f);
std::vector<double> cumulative_integral(const RealField& f);

/// Throws std::runtime_error naming the first non-finite node, if any.
void require_finite(const ComplexField& f, const std::string& label);
void require_finite(const RealField& f, const std::string& label);

/// CSV export: "x,re,im" for complex fields, "x,value" for real fields.
/// Headers included, '.' decimal separator, newline-terminated rows.
void write_csv(const ComplexField& f, const std::string& path);
void write_csv(const RealField& f, const std::string& path);

/// Read a real field column file ("x,value") defined on exactly this grid.
RealField read_real_csv(const Grid& g, const std::string& path);

} // namespace revdiff
