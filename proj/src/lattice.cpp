#include "revdiff/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace revdiff {

Grid::Grid(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max))
        throw std::invalid_argument("Grid: bounds must be finite");
    if (!(x_min < x_max))
        throw std::invalid_argument("Grid: x_min must be strictly below x_max");
    if (n < 8)
        throw std::invalid_argument("Grid: need at least 8 nodes");
    dx_ = (x_max - x_min) / static_cast<double>(n - 1);
}

std::size_t Grid::nearest_node(double x) const {
    if (!contains(x))
        throw std::domain_error("Grid: point lies outside the domain");
    double idx = std::round((x - x_min_) / dx_);
    if (idx < 0.0) idx = 0.0;
    auto i = static_cast<std::size_t>(idx);
    if (i >= n_) i = n_ - 1;
    return i;
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi), whole_(false) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("Interval: bounds must be finite");
    if (!(lo <= hi))
        throw std::invalid_argument("Interval: lo must not exceed hi");
}

Interval Interval::whole_line() { return Interval(); }

ComplexField::ComplexField(Grid g, std::vector<Complex> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
        throw std::invalid_argument("ComplexField: value count does not match grid");
}

ComplexField::ComplexField(Grid g) : grid(g), values(g.size(), Complex{0.0, 0.0}) {}

RealField::RealField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
        throw std::invalid_argument("RealField: value count does not match grid");
}

RealField::RealField(Grid g) : grid(g), values(g.size(), 0.0) {}

SnappedInterval snap_interval(const Grid& g, const Interval& region) {
    if (region.is_whole_line())
        return SnappedInterval{0, g.size() - 1, 0.0, 0.0};
    if (region.lo() < g.x_min() || region.hi() > g.x_max())
        throw std::domain_error("Interval: region extends outside the grid domain");
    std::size_t lo = g.nearest_node(region.lo());
    std::size_t hi = g.nearest_node(region.hi());
    return SnappedInterval{lo, hi, std::abs(g.x(lo) - region.lo()), std::abs(g.x(hi) - region.hi())};
}

namespace {

// Trapezoid weights over nodes [lo, hi]: dx everywhere except dx/2 at the two
// ends. A zero-width snapped region integrates to zero.
template <typename T>
T trapezoid(const Grid& g, const std::vector<T>& v, std::size_t lo, std::size_t hi) {
    if (lo >= hi) return T{};
    T acc = (v[lo] + v[hi]) * 0.5;
    for (std::size_t i = lo + 1; i < hi; ++i) acc += v[i];
    return acc * g.dx();
}

} // namespace

Complex integrate(const ComplexField& f, const Interval& region) {
    auto s = snap_interval(f.grid, region);
    return trapezoid(f.grid, f.values, s.lo, s.hi);
}

double integrate(const RealField& f, const Interval& region) {
    auto s = snap_interval(f.grid, region);
    return trapezoid(f.grid, f.values, s.lo, s.hi);
}

double l2_norm_sq(const ComplexField& f) {
    require_finite(f, "l2_norm_sq input");
    double acc = 0.5 * (std::norm(f.values.front()) + std::norm(f.values.back()));
    for (std::size_t i = 1; i + 1 < f.values.size(); ++i) acc += std::norm(f.values[i]);
    return acc * f.grid.dx();
}

double l2_norm_sq(const RealField& f) {
    require_finite(f, "l2_norm_sq input");
    double acc = 0.5 * (f.values.front() * f.values.front() + f.values.back() * f.values.back());
    for (std::size_t i = 1; i + 1 < f.values.size(); ++i) acc += f.values[i] * f.values[i];
    return acc * f.grid.dx();
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("l2_distance: fields live on different grids");
    ComplexField diff(a.grid);
    for (std::size_t i = 0; i < a.values.size(); ++i) diff.values[i] = a.values[i] - b.values[i];
    return std::sqrt(l2_norm_sq(diff));
}

double l2_distance(const RealField& a, const RealField& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("l2_distance: fields live on different grids");
    RealField diff(a.grid);
    for (std::size_t i = 0; i < a.values.size(); ++i) diff.values[i] = a.values[i] - b.values[i];
    return std::sqrt(l2_norm_sq(diff));
}

ComplexField conjugate(const ComplexField& f) {
    ComplexField out(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = std::conj(f.values[i]);
    return out;
}

RealField density(const ComplexField& f) {
    RealField out(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = std::norm(f.values[i]);
    return out;
}

void normalize(ComplexField& f) {
    double nsq = l2_norm_sq(f);
    if (nsq <= 0.0)
        throw std::domain_error("normalize: field has zero norm");
    double inv = 1.0 / std::sqrt(nsq);
    for (auto& v : f.values) v *= inv;
}

void normalize_density(RealField& rho) {
    double mass = integrate(rho, Interval::whole_line());
    if (mass <= 0.0)
        throw std::domain_error("normalize_density: field has zero mass");
    double inv = 1.0 / mass;
    for (auto& v : rho.values) v *= inv;
}

template <typename T>
static std::vector<T> cumulative_impl(const Grid& g, const std::vector<T>& v) {
    std::vector<T> c(v.size());
    c[0] = T{};
    for (std::size_t i = 1; i < v.size(); ++i)
        c[i] = c[i - 1] + (v[i - 1] + v[i]) * (0.5 * g.dx());
    return c;
}

std::vector<Complex> cumulative_integral(const ComplexField& f) {
    return cumulative_impl(f.grid, f.values);
}

std::vector<double> cumulative_integral(const RealField& f) {
    return cumulative_impl(f.grid, f.values);
}

void require_finite(const ComplexField& f, const std::string& label) {
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (!std::isfinite(f.values[i].real()) || !std::isfinite(f.values[i].imag()))
            throw std::runtime_error(label + ": non-finite value at node " + std::to_string(i));
}

void require_finite(const RealField& f, const std::string& label) {
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (!std::isfinite(f.values[i]))
            throw std::runtime_error(label + ": non-finite value at node " + std::to_string(i));
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_csv(const ComplexField& f, const std::string& path) {
    auto out = open_out(path);
    out << "x,re,im\n";
    for (std::size_t i = 0; i < f.values.size(); ++i)
        out << fmt(f.grid.x(i)) << ',' << fmt(f.values[i].real()) << ',' << fmt(f.values[i].imag())
            << '\n';
}

void write_csv(const RealField& f, const std::string& path) {
    auto out = open_out(path);
    out << "x,value\n";
    for (std::size_t i = 0; i < f.values.size(); ++i)
        out << fmt(f.grid.x(i)) << ',' << fmt(f.values[i]) << '\n';
}

RealField read_real_csv(const Grid& g, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty csv file: " + path);
    RealField out(g);
    std::size_t i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (i >= g.size())
            throw std::runtime_error("csv has more rows than grid nodes: " + path);
        std::istringstream row(line);
        std::string xs, vs;
        if (!std::getline(row, xs, ',') || !std::getline(row, vs, ','))
            throw std::runtime_error("malformed csv row in " + path + ": " + line);
        double x = std::stod(xs);
        if (std::abs(x - g.x(i)) > 0.5 * g.dx())
            throw std::runtime_error("csv abscissa does not match grid in " + path);
        out.values[i] = std::stod(vs);
        ++i;
    }
    if (i != g.size())
        throw std::runtime_error("csv has fewer rows than grid nodes: " + path);
    return out;
}

} // namespace revdiff
