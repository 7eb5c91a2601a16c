#include "revdiff/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace revdiff {

namespace {

double parse_double(const std::string& text) {
    double v = 0.0;
    const bool plus = !text.empty() && text.front() == '+'; // from_chars rejects '+'
    const char* first = text.data() + (plus ? 1 : 0);
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("expected a number, got '" + text + "'");
    }
    if (!std::isfinite(v)) {
        throw ConfigError("value must be finite, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

std::size_t parse_size(const std::string& text) {
    return static_cast<std::size_t>(parse_u64(text));
}

std::string format_double(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    std::ostringstream os;
    os.precision(17);
    os << v;
    std::string s = os.str();
    // Prefer the shortest text that still round-trips exactly.
    for (int prec = 1; prec < 17; ++prec) {
        std::ostringstream probe;
        probe.precision(prec);
        probe << v;
        if (parse_double(probe.str()) == v) {
            s = probe.str();
            break;
        }
    }
    return s;
}

std::string format_size(std::size_t v) { return std::to_string(v); }

void require_choice(const std::string& value, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (value == a) {
            return;
        }
    }
    std::string msg = "expected one of {";
    bool first = true;
    for (const char* a : allowed) {
        msg += (first ? "" : ", ");
        msg += a;
        first = false;
    }
    msg += "}, got '" + value + "'";
    throw ConfigError(msg);
}

struct KeyEntry {
    const char* key;
    const char* description;
    void (*set)(SimConfig&, const std::string&);
    std::string (*get)(const SimConfig&);
};

const std::array<KeyEntry, 25>& key_table() {
    static const std::array<KeyEntry, 25> table = {{
        {"grid.x_min", "left edge of the spatial domain",
         [](SimConfig& c, const std::string& v) { c.grid_x_min = parse_double(v); },
         [](const SimConfig& c) { return format_double(c.grid_x_min); }},
        {"grid.x_max", "right edge of the spatial domain",
         [](SimConfig& c, const std::string& v) { c.grid_x_max = parse_double(v); },
         [](const SimConfig& c) { return format_double(c.grid_x_max); }},
        {"grid.n", "number of grid nodes (at least 8)",
         [](SimConfig& c, const std::string& v) {
             const std::size_t n = parse_size(v);
             if (n < 8) {
                 throw ConfigError("must be at least 8, got " + std::to_string(n));
             }
             c.grid_n = n;
         },
         [](const SimConfig& c) { return format_size(c.grid_n); }},
        {"window.t0", "total evolution time (positive)",
         [](SimConfig& c, const std::string& v) {
             const double t = parse_double(v);
             if (!(t > 0.0)) {
                 throw ConfigError("must be positive, got '" + v + "'");
             }
             c.window_t0 = t;
         },
         [](const SimConfig& c) { return format_double(c.window_t0); }},
        {"window.n_steps", "number of time steps (at least 1)",
         [](SimConfig& c, const std::string& v) {
             const std::size_t n = parse_size(v);
             if (n < 1) {
                 throw ConfigError("must be at least 1");
             }
             c.window_n_steps = n;
         },
         [](const SimConfig& c) { return format_size(c.window_n_steps); }},
        {"bc", "boundary condition: dirichlet | periodic",
         [](SimConfig& c, const std::string& v) {
             require_choice(v, {"dirichlet", "periodic"});
             c.bc = v;
         },
         [](const SimConfig& c) { return c.bc; }},
        {"potential", "potential shape: free | well | harmonic | custom-file",
         [](SimConfig& c, const std::string& v) {
             require_choice(v, {"free", "well", "harmonic", "custom-file"});
             c.potential = v;
         },
         [](const SimConfig& c) { return c.potential; }},
        {"potential.file", "CSV \"x,value\" samples for potential = custom-file",
         [](SimConfig& c, const std::string& v) { c.potential_file = v; },
         [](const SimConfig& c) { return c.potential_file; }},
        {"mass", "particle mass in reference units (positive)",
         [](SimConfig& c, const std::string& v) {
             const double m = parse_double(v);
             if (!(m > 0.0)) {
                 throw ConfigError("must be positive, got '" + v + "'");
             }
             c.mass = m;
         },
         [](const SimConfig& c) { return format_double(c.mass); }},
        {"slit.d", "slit separation (non-negative)",
         [](SimConfig& c, const std::string& v) {
             const double d = parse_double(v);
             if (!(d >= 0.0)) {
                 throw ConfigError("must be non-negative, got '" + v + "'");
             }
             c.slit_d = d;
         },
         [](const SimConfig& c) { return format_double(c.slit_d); }},
        {"slit.sigma", "width of each slit Gaussian (positive)",
         [](SimConfig& c, const std::string& v) {
             const double s = parse_double(v);
             if (!(s > 0.0)) {
                 throw ConfigError("must be positive, got '" + v + "'");
             }
             c.slit_sigma = s;
         },
         [](const SimConfig& c) { return format_double(c.slit_sigma); }},
        {"slit.k", "common carrier momentum of the slit components",
         [](SimConfig& c, const std::string& v) { c.slit_k = parse_double(v); },
         [](const SimConfig& c) { return format_double(c.slit_k); }},
        {"slit.t_screen", "flight time to the screen (non-negative)",
         [](SimConfig& c, const std::string& v) {
             const double t = parse_double(v);
             if (!(t >= 0.0)) {
                 throw ConfigError("must be non-negative, got '" + v + "'");
             }
             c.slit_t_screen = t;
         },
         [](const SimConfig& c) { return format_double(c.slit_t_screen); }},
        {"slit.bins", "screen cells for the fringe dataset (at least 2)",
         [](SimConfig& c, const std::string& v) {
             const std::size_t b = parse_size(v);
             if (b < 2) {
                 throw ConfigError("must be at least 2");
             }
             c.slit_bins = b;
         },
         [](const SimConfig& c) { return format_size(c.slit_bins); }},
        {"walkers.n", "ensemble size (at least 1)",
         [](SimConfig& c, const std::string& v) {
             const std::size_t n = parse_size(v);
             if (n < 1) {
                 throw ConfigError("must be at least 1");
             }
             c.walkers_n = n;
         },
         [](const SimConfig& c) { return format_size(c.walkers_n); }},
        {"walkers.t_c", "comparison instant for walker statistics",
         [](SimConfig& c, const std::string& v) {
             const double t = parse_double(v);
             if (!(t >= 0.0)) {
                 throw ConfigError("must be non-negative, got '" + v + "'");
             }
             c.walkers_t_c = t;
         },
         [](const SimConfig& c) { return format_double(c.walkers_t_c); }},
        {"eps.n_levels", "window half-width levels in the schedule (at least 2)",
         [](SimConfig& c, const std::string& v) {
             const std::size_t n = parse_size(v);
             if (n < 2) {
                 throw ConfigError("must be at least 2 (extrapolation needs two rows)");
             }
             c.eps_n_levels = n;
         },
         [](const SimConfig& c) { return format_size(c.eps_n_levels); }},
        {"eps.coarsest_in_dx", "coarsest window half-width in units of dx",
         [](SimConfig& c, const std::string& v) {
             const double w = parse_double(v);
             if (!(w >= 2.0)) {
                 throw ConfigError("must be at least 2 grid spacings, got '" + v + "'");
             }
             c.eps_coarsest_in_dx = w;
         },
         [](const SimConfig& c) { return format_double(c.eps_coarsest_in_dx); }},
        {"spin.c1", "spin-up amplitude (complex literal, e.g. 0.6 or 0.5+0.25i)",
         [](SimConfig& c, const std::string& v) { c.spin_c1 = parse_complex(v); },
         [](const SimConfig& c) { return format_complex(c.spin_c1); }},
        {"spin.c2", "spin-down amplitude (complex literal)",
         [](SimConfig& c, const std::string& v) { c.spin_c2 = parse_complex(v); },
         [](const SimConfig& c) { return format_complex(c.spin_c2); }},
        {"eventcalc.z", "event measure for the worked entangled-pair example",
         [](SimConfig& c, const std::string& v) { c.eventcalc_z = parse_complex(v); },
         [](const SimConfig& c) { return format_complex(c.eventcalc_z); }},
        {"seed", "64-bit seed for every stochastic component",
         [](SimConfig& c, const std::string& v) { c.seed = parse_u64(v); },
         [](const SimConfig& c) { return std::to_string(c.seed); }},
        {"out_dir", "directory for datasets and report.json",
         [](SimConfig& c, const std::string& v) {
             if (v.empty()) {
                 throw ConfigError("must not be empty");
             }
             c.out_dir = v;
         },
         [](const SimConfig& c) { return c.out_dir; }},
        {"threads", "worker threads, 0 = auto (never affects results)",
         [](SimConfig& c, const std::string& v) { c.threads = parse_size(v); },
         [](const SimConfig& c) { return format_size(c.threads); }},
        {"evolve.export", "evolve artifacts: final | history",
         [](SimConfig& c, const std::string& v) {
             require_choice(v, {"final", "history"});
             c.evolve_export = v;
         },
         [](const SimConfig& c) { return c.evolve_export; }},
    }};
    return table;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

} // namespace

BoundaryCondition SimConfig::boundary() const {
    return bc == "periodic" ? BoundaryCondition::periodic : BoundaryCondition::dirichlet;
}

Potential SimConfig::make_potential(const Grid& g) const {
    if (potential == "well") {
        return Potential::infinite_well(g);
    }
    if (potential == "harmonic") {
        return Potential::harmonic(g);
    }
    if (potential == "custom-file") {
        return Potential::from_csv(g, potential_file);
    }
    return Potential::free_space(g);
}

EvolveOptions SimConfig::evolve_options() const {
    EvolveOptions opt;
    opt.bc = boundary();
    opt.mass = mass;
    return opt;
}

Complex parse_complex(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            s.push_back(ch);
        }
    }
    if (s.empty()) {
        throw ConfigError("expected a complex literal, got an empty value");
    }

    const auto imag_coeff = [](const std::string& body) {
        if (body.empty() || body == "+") {
            return 1.0;
        }
        if (body == "-") {
            return -1.0;
        }
        return parse_double(body);
    };

    // Split at the last +/- that starts the imaginary term (not a leading
    // sign, not an exponent sign).
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
        }
    }
    if (split != std::string::npos) {
        const std::string re_text = s.substr(0, split);
        std::string im_text = s.substr(split);
        if (im_text.back() != 'i' && im_text.back() != 'I') {
            throw ConfigError("expected the imaginary part of '" + text + "' to end in 'i'");
        }
        im_text.pop_back();
        return {parse_double(re_text), imag_coeff(im_text)};
    }
    if (s.back() == 'i' || s.back() == 'I') {
        s.pop_back();
        return {0.0, imag_coeff(s)};
    }
    return {parse_double(s), 0.0};
}

std::string format_complex(Complex z) {
    if (z.imag() == 0.0) {
        return format_double(z.real());
    }
    std::string im = format_double(z.imag()) + "i";
    if (z.real() == 0.0) {
        return im;
    }
    return format_double(z.real()) + (z.imag() > 0.0 ? "+" : "") + im;
}

void apply_key(SimConfig& cfg, const std::string& key, const std::string& value) {
    for (const KeyEntry& entry : key_table()) {
        if (key == entry.key) {
            try {
                entry.set(cfg, value);
            } catch (const ConfigError& err) {
                throw ConfigError("key '" + key + "': " + err.what());
            }
            cfg.keys_set.insert(key);
            return;
        }
    }
    throw ConfigError("unknown key '" + key + "'");
}

SimConfig parse_config_text(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) {
            line.erase(comment);
        }
        line = trimmed(line);
        if (line.empty()) {
            continue;
        }
        try {
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3) {
                    throw ConfigError("malformed section header '" + line + "'");
                }
                section = trimmed(line.substr(1, line.size() - 2));
                if (section.empty()) {
                    throw ConfigError("empty section header");
                }
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("expected 'key = value', got '" + line + "'");
            }
            std::string key = trimmed(line.substr(0, eq));
            const std::string value = trimmed(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError("missing key before '='");
            }
            if (!section.empty()) {
                key = section + "." + key;
            }
            apply_key(cfg, key, value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + err.what());
        }
    }
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ConfigError& err) {
        throw ConfigError(path + ": " + err.what());
    }
}

void validate(const SimConfig& cfg) {
    if (!(cfg.grid_x_max > cfg.grid_x_min)) {
        throw ConfigError("key 'grid.x_max': domain must satisfy x_min < x_max");
    }
    if (cfg.walkers_t_c > cfg.window_t0) {
        throw ConfigError("key 'walkers.t_c': comparison instant lies outside the window");
    }
    if (cfg.potential == "custom-file" && cfg.potential_file.empty()) {
        throw ConfigError("key 'potential.file': required when potential = custom-file");
    }
}

std::string config_reference() {
    std::string out;
    const SimConfig defaults;
    for (const KeyEntry& entry : key_table()) {
        std::string line = "  ";
        line += entry.key;
        line += " = ";
        const std::string value = entry.get(defaults);
        line += value.empty() ? "(unset)" : value;
        while (line.size() < 34) {
            line.push_back(' ');
        }
        line += " ";
        line += entry.description;
        line += "\n";
        out += line;
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> config_echo(const SimConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> echo;
    echo.reserve(key_table().size());
    for (const KeyEntry& entry : key_table()) {
        echo.emplace_back(entry.key, entry.get(cfg));
    }
    return echo;
}

} // namespace revdiff
