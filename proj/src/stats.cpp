#include "revdiff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace revdiff {

double ks_distance(std::vector<double> samples, const Grid& g, const std::vector<double>& cdf) {
    if (samples.empty()) {
        throw std::invalid_argument("ks_distance: empty sample");
    }
    if (cdf.size() != g.size()) {
        throw std::invalid_argument("ks_distance: cdf node count does not match grid");
    }
    const double total = cdf.back();
    if (!(total > 0.0)) {
        throw std::invalid_argument("ks_distance: cdf has no mass");
    }
    std::sort(samples.begin(), samples.end());

    const double n = double(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double x = samples[i];
        double f; // model CDF at x, clamped outside the grid
        if (x <= g.x_min()) {
            f = 0.0;
        } else if (x >= g.x_max()) {
            f = 1.0;
        } else {
            const double s = (x - g.x_min()) / g.dx();
            const std::size_t j = std::min(std::size_t(s), g.size() - 2);
            const double w = s - double(j);
            f = ((1.0 - w) * cdf[j] + w * cdf[j + 1]) / total;
        }
        worst = std::max(worst, std::abs(f - double(i) / n));
        worst = std::max(worst, std::abs(double(i + 1) / n - f));
    }
    return worst;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("ks_distance: empty sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double worst = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) {
            ++i;
        } else {
            ++j;
        }
        worst = std::max(worst, std::abs(double(i) / na - double(j) / nb));
    }
    return worst;
}

} // namespace revdiff
