#pragma once

#include "revdiff/evolve.hpp"
#include "revdiff/lattice.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace revdiff {

/// Raised on malformed, unknown or out-of-range configuration input. The
/// message always names the offending key (and the line when parsing a
/// file) so the runner can exit with an actionable diagnostic.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every knob of the experiment runner, with the documented defaults. A
/// default-constructed SimConfig is valid and describes the reference
/// desk-scale setup: grid [-20, 20] with 2048 nodes, one time unit in 1000
/// steps, hard walls, free potential, seed 0.
struct SimConfig {
    // grid.*
    double grid_x_min = -20.0;
    double grid_x_max = 20.0;
    std::size_t grid_n = 2048;

    // window.*
    double window_t0 = 1.0;
    std::size_t window_n_steps = 1000;

    // physics
    std::string bc = "dirichlet";        // dirichlet | periodic
    std::string potential = "free";      // free | well | harmonic | custom-file
    std::string potential_file;          // CSV "x,value" for custom-file
    double mass = 1.0;

    // slit.*
    double slit_d = 2.0;
    double slit_sigma = 0.25;
    double slit_k = 0.0;
    double slit_t_screen = 2.0;
    std::size_t slit_bins = 20;

    // walkers.*
    std::size_t walkers_n = 100000;
    double walkers_t_c = 0.5;

    // eps.*
    std::size_t eps_n_levels = 4;
    double eps_coarsest_in_dx = 16.0;

    // spin.* and eventcalc.*
    Complex spin_c1{0.7071067811865476, 0.0};
    Complex spin_c2{0.0, 0.7071067811865476};
    Complex eventcalc_z{0.6, 0.3};

    // run control
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::size_t threads = 0;             // 0 = auto; never affects results
    std::string evolve_export = "final"; // final | history

    /// Keys assigned explicitly (config file or command-line override), so
    /// commands can tell a deliberate choice from a default they may adapt.
    std::set<std::string> keys_set;

    bool is_set(const std::string& key) const { return keys_set.count(key) != 0; }

    Grid make_grid() const { return Grid(grid_x_min, grid_x_max, grid_n); }
    TimeWindow make_window() const { return TimeWindow(window_t0, window_n_steps); }
    BoundaryCondition boundary() const;
    Potential make_potential(const Grid& g) const;
    EvolveOptions evolve_options() const;
};

/// Parse a complex literal: "0.6", "0.8i", "0.5+0.25i", "i", "-2i",
/// "1e-3-2e-4i". Whitespace is ignored; the imaginary part must end in 'i'.
Complex parse_complex(const std::string& text);

/// Shortest exact text form of z, inverse of parse_complex.
std::string format_complex(Complex z);

/// Assign one "key = value" pair. Unknown keys and malformed or
/// out-of-range values throw ConfigError naming the key.
void apply_key(SimConfig& cfg, const std::string& key, const std::string& value);

/// Parse "key = value" text with '#'/';' comments and optional [section]
/// headers that prefix the keys below them ("[grid]" + "n = 512" means
/// "grid.n = 512"). Errors carry the 1-based line number.
SimConfig parse_config_text(const std::string& text);

/// Read and parse a config file; errors carry the path and line.
SimConfig load_config(const std::string& path);

/// Cross-field checks that single keys cannot see (domain orientation,
/// t_c inside the window, custom potential file named). Throws ConfigError.
void validate(const SimConfig& cfg);

/// One "key = default -- description" line per knob, for --help.
std::string config_reference();

/// Ordered key -> current-value snapshot of cfg, echoed into reports.
std::vector<std::pair<std::string, std::string>> config_echo(const SimConfig& cfg);

} // namespace revdiff
