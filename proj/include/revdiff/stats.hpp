#pragma once

#include "revdiff/lattice.hpp"

#include <cstddef>
#include <vector>

namespace revdiff {

/// Kolmogorov-Smirnov distance between a sample and a model distribution
/// given as a cumulative integral on grid nodes (cdf[i] = integral up to node
/// i, need not end exactly at 1; it is renormalized by its last entry).
/// The model CDF is interpolated linearly between nodes; samples are copied
/// and sorted internally.
double ks_distance(std::vector<double> samples, const Grid& g, const std::vector<double>& cdf);

/// Two-sample Kolmogorov-Smirnov distance between empirical distributions.
double ks_distance(std::vector<double> a, std::vector<double> b);

} // namespace revdiff
