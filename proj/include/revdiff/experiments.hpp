#pragma once

#include "revdiff/config.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace revdiff {

/// One checked claim of an experiment: `pass` compares `value` against
/// `bound` with the stored relation. Reports keep the failing entries, so a
/// red run names exactly which quantity broke and by how much.
struct Assertion {
    enum class Relation { less_than, greater_than };

    std::string name;
    double value = 0.0;
    double bound = 0.0;
    Relation relation = Relation::less_than;
    bool pass = false;
};

/// Everything one experiment run produces besides its CSV datasets: named
/// scalar metrics (insertion-ordered, bit-exact under reruns of the same
/// config and seed), assertions, and the artifact paths written.
struct RunReport {
    std::string experiment;
    double wall_time_s = 0.0;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<Assertion> assertions;
    std::vector<std::string> artifacts;
    /// Free-form human-summary lines (worked-example tables and the like);
    /// printed after the metrics, never part of the JSON schema.
    std::vector<std::string> notes;

    void metric(const std::string& name, double value);
    double metric_value(const std::string& name) const; // throws if absent

    /// Record metric `name` and assert value < bound (or > bound).
    void assert_less(const std::string& name, double value, double bound);
    void assert_greater(const std::string& name, double value, double bound);

    bool all_pass() const;
    const Assertion* first_failure() const;

    /// Merge sub, prefixing every metric/assertion name with "prefix.".
    void absorb(const RunReport& sub, const std::string& prefix);
};

/// The command names run_experiment accepts, in execution order of "all".
const std::vector<std::string>& experiment_names();

/// Dispatch by command name; throws ConfigError on an unknown name.
RunReport run_experiment(const std::string& command, const SimConfig& cfg);

RunReport run_evolve(const SimConfig& cfg);
RunReport run_reversal(const SimConfig& cfg);
RunReport run_heat_contrast(const SimConfig& cfg);
RunReport run_hydro(const SimConfig& cfg);
RunReport run_walkers(const SimConfig& cfg);
RunReport run_born(const SimConfig& cfg);
RunReport run_eigen_born(const SimConfig& cfg);
RunReport run_double_slit(const SimConfig& cfg);
RunReport run_eventcalc(const SimConfig& cfg);
RunReport run_spin(const SimConfig& cfg);
RunReport run_all(const SimConfig& cfg);

/// Serialize {experiment, config_echo, metrics{}, assertions[{name, value,
/// bound, pass}], artifacts, wall_time_s} as indented JSON.
std::string report_json(const RunReport& report, const SimConfig& cfg);

/// Write report_json to path (creating parent directories).
void write_report_json(const RunReport& report, const SimConfig& cfg, const std::string& path);

/// Human summary: metrics, PASS/FAIL lines and artifacts.
void print_report(const RunReport& report, std::ostream& out);

} // namespace revdiff
