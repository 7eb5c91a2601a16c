#include "revdiff/slit.hpp"

#include "revdiff/borncalc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace revdiff {

namespace {

constexpr Complex kI(0.0, 1.0);

// CN step ceiling for screen runs: small enough that the O(dt^2) phase error
// stays far below the 2e-4 budget of the four-term decomposition identity.
constexpr double kScreenStepTarget = 1e-3;

// A component whose wall density exceeds this would feel the hard walls and
// stop being the free two-slit state the analytics describe.
constexpr double kWallTailTol = 1e-10;

void validate_config(const SlitConfig& cfg) {
    if (!(cfg.sigma_s > 0.0)) {
        throw std::invalid_argument("slit_state: slit width must be positive");
    }
    if (!(cfg.d >= 0.0)) {
        throw std::invalid_argument("slit_state: slit separation must be non-negative");
    }
    if (!(cfg.t_screen >= 0.0)) {
        throw std::invalid_argument("slit_state: screen time must be non-negative");
    }
    if (!std::isfinite(cfg.k)) {
        throw std::invalid_argument("slit_state: carrier momentum must be finite");
    }
}

Complex inner_product(const ComplexField& a, const ComplexField& b) {
    ComplexField prod{a.grid};
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
        prod.values[i] = std::conj(a.values[i]) * b.values[i];
    }
    return integrate(prod, Interval::whole_line());
}

ComplexField evolve_to(const ComplexField& f, double t_s, const Potential& V) {
    if (!(t_s >= 0.0)) {
        throw std::invalid_argument("screen evolution: time must be non-negative");
    }
    if (t_s == 0.0) {
        return f;
    }
    const auto n = static_cast<std::size_t>(std::ceil(t_s / kScreenStepTarget));
    const double dt = t_s / static_cast<double>(n);
    ComplexField cur = f;
    for (std::size_t step = 0; step < n; ++step) {
        cur = step_schrodinger(cur, V, dt);
    }
    // Dirichlet pins the boundary nodes themselves to zero, so an escaping
    // state shows up in the band just inside each wall, not on it.
    const std::size_t band = std::max<std::size_t>(4, cur.grid.size() / 100);
    double leaked = 0.0;
    for (std::size_t i = 1; i <= band; ++i) {
        leaked = std::max(leaked, std::norm(cur.values[i]));
        leaked = std::max(leaked, std::norm(cur.values[cur.grid.size() - 1 - i]));
    }
    if (leaked > kWallTailTol) {
        throw std::runtime_error(
            "screen evolution: the state reached the wall before the screen time");
    }
    return cur;
}

/// Finite-window kernel over the node range [lo, hi]:
///     K = dx^2 sum_{i in [lo,hi]} w_i conj(bwd_i) * trapezoid of fwd over
///         [x_i - eps, x_i + eps],
/// outer trapezoid weights on [lo, hi], inner windows clamped only at the
/// box walls. Truncating the windows at the cell edges instead would shave
/// corner regions of area ~ eps^2 * rho(edge) off the numerator; against
/// the 2 eps scale of the normalizer that is a term *linear* in eps, which
/// the even-order extrapolation cannot remove. Clamping at the walls is
/// harmless because admission requires negligible tail density there.
Complex pair_window_kernel(const ComplexField& fwd, const ComplexField& bwd, std::size_t lo,
                           std::size_t hi, std::size_t radius) {
    const double dx = fwd.grid.dx();
    const std::size_t last = fwd.grid.size() - 1;
    std::vector<Complex> prefix(fwd.grid.size() + 1, Complex(0.0, 0.0));
    for (std::size_t i = 0; i <= last; ++i) {
        prefix[i + 1] = prefix[i] + fwd.values[i];
    }
    Complex acc(0.0, 0.0);
    for (std::size_t i = lo; i <= hi; ++i) {
        const std::size_t l = i > radius ? i - radius : 0;
        const std::size_t u = std::min(last, i + radius);
        const Complex inner = prefix[u + 1] - prefix[l] - 0.5 * fwd.values[l] -
                              0.5 * fwd.values[u];
        const double w = (i == lo || i == hi) ? 0.5 : 1.0;
        acc += w * std::conj(bwd.values[i]) * inner;
    }
    return acc * (dx * dx);
}

/// Both components evolved to the screen time plus everything the per-cell
/// kernel evaluations share: the window schedule, its node radii and the
/// whole-line denominator per level.
struct EvolvedPair {
    ComplexField e1;
    ComplexField e2;
    double norm_sq;
    std::vector<double> levels;
    std::vector<std::size_t> radii;
    std::vector<double> denom;
};

EvolvedPair prepare_pair(const ComplexField& psi1, const ComplexField& psi2, double t_s,
                         const Potential& V) {
    if (!(psi1.grid == psi2.grid)) {
        throw std::invalid_argument("four_terms: components live on different grids");
    }
    EvolvedPair ep{evolve_to(psi1, t_s, V), evolve_to(psi2, t_s, V), 0.0, {}, {}, {}};
    const Grid& g = ep.e1.grid;

    ep.norm_sq = 2.0 + 2.0 * inner_product(ep.e1, ep.e2).real();
    if (ep.norm_sq < 1e-10) {
        throw std::domain_error("four_terms: superposition normalizer degenerates");
    }

    const EpsSchedule schedule = EpsSchedule::geometric(g);
    for (double eps : schedule.levels) {
        const auto radius = static_cast<std::size_t>(std::llround(eps / g.dx()));
        // The whole-line diagonal kernels are Hermitian forms, real up to
        // rounding; their mean normalizes every pair the same way so the
        // conjugate symmetry of the off-diagonal terms survives division.
        const double d =
            0.5 * (pair_window_kernel(ep.e1, ep.e1, 0, g.size() - 1, radius) +
                   pair_window_kernel(ep.e2, ep.e2, 0, g.size() - 1, radius))
                      .real();
        if (!(d > 0.0)) {
            throw std::domain_error("four_terms: whole-line window normalizer vanishes");
        }
        ep.levels.push_back(eps);
        ep.radii.push_back(radius);
        ep.denom.push_back(d);
    }
    return ep;
}

FourTerms terms_on_range(const EvolvedPair& ep, std::size_t lo, std::size_t hi) {
    // Per level, K_jm and conj(K_mj) are quadratures of the same band-limited
    // double integral with the roles of the two coordinates swapped; averaging
    // them symmetrizes the quadrature, so P21 = conj(P12) and the diagonal
    // terms are real exactly rather than up to edge-weight rounding.
    std::vector<IntersectionEstimate> r11, r22, r12;
    for (std::size_t level = 0; level < ep.levels.size(); ++level) {
        const std::size_t radius = ep.radii[level];
        const double d = ep.denom[level];
        const Complex k11 = pair_window_kernel(ep.e1, ep.e1, lo, hi, radius);
        const Complex k22 = pair_window_kernel(ep.e2, ep.e2, lo, hi, radius);
        const Complex k12 = pair_window_kernel(ep.e1, ep.e2, lo, hi, radius);
        const Complex k21 = pair_window_kernel(ep.e2, ep.e1, lo, hi, radius);
        r11.push_back({ep.levels[level], Complex(k11.real(), 0.0) / d});
        r22.push_back({ep.levels[level], Complex(k22.real(), 0.0) / d});
        r12.push_back({ep.levels[level], 0.5 * (k12 + std::conj(k21)) / d});
    }
    const Complex p12 = extrapolate_even(r12);
    return FourTerms{extrapolate_even(r11), extrapolate_even(r22), p12, std::conj(p12),
                     ep.norm_sq};
}

/// Node range of each screen cell plus the Riemann mass of rho in it.
std::vector<std::size_t> bin_of_node(const Grid& g, std::size_t bins) {
    std::vector<std::size_t> bin(g.size());
    const double width = (g.x_max() - g.x_min()) / static_cast<double>(bins);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto b = static_cast<std::size_t>((g.x(i) - g.x_min()) / width);
        bin[i] = std::min(b, bins - 1);
    }
    return bin;
}

Grid bin_center_grid(const Grid& g, std::size_t bins) {
    const double width = (g.x_max() - g.x_min()) / static_cast<double>(bins);
    return Grid(g.x_min() + 0.5 * width, g.x_max() - 0.5 * width, bins);
}

std::vector<double> binned_masses(const RealField& rho, const std::vector<std::size_t>& bin,
                                  std::size_t bins) {
    std::vector<double> mass(bins, 0.0);
    for (std::size_t i = 0; i < rho.grid.size(); ++i) {
        mass[bin[i]] += rho.values[i] * rho.grid.dx();
    }
    double total = 0.0;
    for (double m : mass) total += m;
    if (!(total > 0.0)) {
        throw std::domain_error("screen_profile: state carries no probability mass");
    }
    for (double& m : mass) m /= total;
    return mass;
}

void validate_bins(const Grid& g, std::size_t bins) {
    if (bins < 2 || bins > g.size()) {
        throw std::invalid_argument("screen binning: need 2 <= bins <= grid size");
    }
}

} // namespace

SlitState slit_state(const SlitConfig& cfg, const Grid& g) {
    validate_config(cfg);
    SlitState state{gaussian_packet(g, -0.5 * cfg.d, cfg.sigma_s, cfg.k),
                    gaussian_packet(g, +0.5 * cfg.d, cfg.sigma_s, cfg.k), ComplexField(g),
                    Complex(0.0, 0.0)};

    for (const ComplexField* f : {&state.psi1, &state.psi2}) {
        if (std::norm(f->values.front()) > kWallTailTol ||
            std::norm(f->values.back()) > kWallTailTol) {
            throw std::invalid_argument(
                "slit_state: component tail density exceeds 1e-10 at a wall; "
                "widen the box or narrow the slits");
        }
    }

    state.overlap = inner_product(state.psi1, state.psi2);
    const double norm_sq = 2.0 + 2.0 * state.overlap.real();
    if (norm_sq < 1e-10) {
        throw std::domain_error("slit_state: degenerate configuration, components cancel");
    }
    const double scale = 1.0 / std::sqrt(norm_sq);
    for (std::size_t i = 0; i < g.size(); ++i) {
        state.psi.values[i] = scale * (state.psi1.values[i] + state.psi2.values[i]);
    }
    return state;
}

FourTerms four_terms(const ComplexField& psi1, const ComplexField& psi2, const Interval& F,
                     double t_s, const Potential& V) {
    const EvolvedPair ep = prepare_pair(psi1, psi2, t_s, V);
    const SnappedInterval s = snap_interval(psi1.grid, F);
    return terms_on_range(ep, s.lo, s.hi);
}

RealField screen_profile(const ComplexField& psi, double t_s, const Potential& V,
                         std::size_t bins) {
    validate_bins(psi.grid, bins);
    const ComplexField evolved = evolve_to(psi, t_s, V);
    const RealField rho = density(evolved);
    const std::vector<std::size_t> bin = bin_of_node(psi.grid, bins);
    return RealField(bin_center_grid(psi.grid, bins), binned_masses(rho, bin, bins));
}

std::vector<ScreenBin> screen_dataset(const ComplexField& psi1, const ComplexField& psi2,
                                      double t_s, const Potential& V, std::size_t bins) {
    validate_bins(psi1.grid, bins);
    const EvolvedPair ep = prepare_pair(psi1, psi2, t_s, V);
    const Grid& g = ep.e1.grid;

    // Superposition of the evolved components (the stepper is linear, so
    // this equals evolving the superposition).
    ComplexField psi{g};
    const double scale = 1.0 / std::sqrt(ep.norm_sq);
    for (std::size_t i = 0; i < g.size(); ++i) {
        psi.values[i] = scale * (ep.e1.values[i] + ep.e2.values[i]);
    }
    const RealField rho = density(psi);
    const std::vector<std::size_t> bin = bin_of_node(g, bins);
    const std::vector<double> mass = binned_masses(rho, bin, bins);
    const Grid centers = bin_center_grid(g, bins);

    // Kernel cells are snapped the same way a standalone interval would be,
    // so each bin's terms equal four_terms on [edge_b, edge_{b+1}] exactly.
    const double width = (g.x_max() - g.x_min()) / static_cast<double>(bins);
    std::vector<ScreenBin> dataset;
    dataset.reserve(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const Interval cell(g.x_min() + width * static_cast<double>(b),
                            b + 1 == bins ? g.x_max()
                                          : g.x_min() + width * static_cast<double>(b + 1));
        const SnappedInterval s = snap_interval(g, cell);
        dataset.push_back(ScreenBin{centers.x(b), mass[b], terms_on_range(ep, s.lo, s.hi)});
    }
    return dataset;
}

void write_csv(const std::vector<ScreenBin>& dataset, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) {
        throw std::runtime_error("write_csv: cannot open " + path);
    }
    std::fprintf(fp, "x,intensity,P11_re,P22_re,P12_re,P12_im\n");
    for (const ScreenBin& bin : dataset) {
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", bin.x, bin.intensity,
                     bin.terms.P11.real(), bin.terms.P22.real(), bin.terms.P12.real(),
                     bin.terms.P12.imag());
    }
    std::fclose(fp);
}

Complex free_gaussian_at(double x, double t, double x0, double sigma, double k) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("free_gaussian_at: width must be positive");
    }
    const double amp = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    const double X = x - x0;
    if (t == 0.0) {
        return amp * std::exp(-X * X / (4.0 * sigma * sigma)) * std::exp(kI * (k * x));
    }
    // Propagating the t = 0 packet through the free kernel in closed form:
    // a Gaussian integral whose exponent collects to the two terms below.
    const Complex c(t, -2.0 * sigma * sigma);
    const Complex exponent =
        kI * (X * X / (2.0 * t)) - sigma * sigma * (k * t - X) * (k * t - X) / (t * c);
    const Complex pref = amp / std::sqrt(Complex(1.0, t / (2.0 * sigma * sigma)));
    // gaussian_packet carries the carrier phase exp(ikx) rather than
    // exp(ik(x - x0)); the difference is the constant factor exp(ik x0).
    return pref * std::exp(exponent) * std::exp(kI * (k * x0));
}

double two_slit_intensity(const SlitConfig& cfg, double t, double x) {
    validate_config(cfg);
    const Complex a1 = free_gaussian_at(x, t, -0.5 * cfg.d, cfg.sigma_s, cfg.k);
    const Complex a2 = free_gaussian_at(x, t, +0.5 * cfg.d, cfg.sigma_s, cfg.k);
    const double overlap =
        std::exp(-cfg.d * cfg.d / (8.0 * cfg.sigma_s * cfg.sigma_s));
    return std::norm(a1 + a2) / (2.0 + 2.0 * overlap);
}

double fringe_spacing_estimate(const SlitConfig& cfg, double t) {
    if (!(cfg.d > 0.0) || !(t > 0.0)) {
        throw std::invalid_argument("fringe_spacing_estimate: needs d > 0 and t > 0");
    }
    const double s2 = cfg.sigma_s * cfg.sigma_s;
    return 2.0 * std::numbers::pi * t / cfg.d * (1.0 + 4.0 * s2 * s2 / (t * t));
}

double dark_fringe_near(const SlitConfig& cfg, double t, double x0) {
    const double half = 0.5 * fringe_spacing_estimate(cfg, t);
    double a = x0 - half;
    double b = x0 + half;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = two_slit_intensity(cfg, t, c);
    double fd = two_slit_intensity(cfg, t, d);
    for (int iter = 0; iter < 200 && b - a > 1e-13; ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = two_slit_intensity(cfg, t, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = two_slit_intensity(cfg, t, d);
        }
    }
    return 0.5 * (a + b);
}

FringeMetrics fringe_metrics(const RealField& profile, double half_width) {
    const Grid& g = profile.grid;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.x(i)) <= half_width) idx.push_back(i);
    }
    if (idx.size() < 3) {
        throw std::invalid_argument("fringe_metrics: window covers fewer than three cells");
    }

    double vmax = 0.0;
    for (std::size_t i : idx) vmax = std::max(vmax, profile.values[i]);

    // Extrema below the floor are rounding ripples in empty cells, not
    // structure; counting them would fabricate fringes out of noise.
    const double floor = 1e-9 * vmax;
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
    for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
        const double prev = profile.values[idx[j - 1]];
        const double cur = profile.values[idx[j]];
        const double next = profile.values[idx[j + 1]];
        if (cur > prev && cur >= next && cur > floor) maxima.push_back(idx[j]);
        if (cur < prev && cur <= next && std::max(prev, next) > floor) minima.push_back(idx[j]);
    }

    // Sub-cell extremum location from the parabola through the three cells.
    const auto refined_x = [&](std::size_t i) {
        const double prev = profile.values[i - 1];
        const double cur = profile.values[i];
        const double next = profile.values[i + 1];
        const double curvature = prev - 2.0 * cur + next;
        double shift = 0.0;
        if (curvature != 0.0) shift = 0.5 * (prev - next) / curvature;
        return g.x(i) + std::clamp(shift, -0.5, 0.5) * g.dx();
    };

    // Spacing from the dark-fringe gaps: the decaying envelope drags bright
    // maxima toward the center, while the near-zero minima barely move.
    FringeMetrics metrics{0.0, 0.0, maxima.size()};
    if (minima.size() >= 2) {
        double sum = 0.0;
        for (std::size_t j = 1; j < minima.size(); ++j) {
            sum += refined_x(minima[j]) - refined_x(minima[j - 1]);
        }
        metrics.spacing = sum / static_cast<double>(minima.size() - 1);
    } else if (maxima.size() >= 2) {
        double sum = 0.0;
        for (std::size_t j = 1; j < maxima.size(); ++j) {
            sum += refined_x(maxima[j]) - refined_x(maxima[j - 1]);
        }
        metrics.spacing = sum / static_cast<double>(maxima.size() - 1);
    }
    for (std::size_t m : minima) {
        const std::size_t* left = nullptr;
        const std::size_t* right = nullptr;
        for (const std::size_t& p : maxima) {
            if (p < m) left = &p;
            if (p > m) {
                right = &p;
                break;
            }
        }
        if (!left || !right) continue;
        const double side = 0.5 * (profile.values[*left] + profile.values[*right]);
        const double dip = profile.values[m];
        if (side + dip > 0.0) {
            metrics.visibility = std::max(metrics.visibility, (side - dip) / (side + dip));
        }
    }
    return metrics;
}

} // namespace revdiff
