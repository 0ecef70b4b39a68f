#pragma once

#include "etesc/analysis.hpp"
#include "etesc/scenario.hpp"

#include <string>
#include <utility>
#include <vector>

namespace etesc {

/// Ordered key=value report shared by the CLI and the Python module.
struct Report {
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> failed_checks;

    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, long long value);
    /// Records check_<name>=pass|fail and remembers failures.
    void check(const std::string& name, bool pass);

    [[nodiscard]] bool ok() const noexcept { return failed_checks.empty(); }
    [[nodiscard]] std::string render() const;
};

/// Runs one simulation. When out_dir is nonempty, writes the trajectory and
/// event CSVs there. Throws DivergenceError on non-finite state.
[[nodiscard]] Report simulate_scenario(const Scenario& scenario, const std::string& out_dir);

/// Certificate report: P, eigenvalues, alpha/beta (tight and configured),
/// envelope constants and dwell time for the scenario's trigger kind.
[[nodiscard]] Report certify_scenario(const Scenario& scenario);

/// Runs the campaign block and writes the stats CSV to out_dir (if nonempty).
/// Checks dynamic > static per sigma row and increasing means across sigma.
[[nodiscard]] Report sweep_scenario(const Scenario& scenario, const std::string& out_dir, SweepResult* result = nullptr);

/// Summary of a loaded (hence valid) scenario.
[[nodiscard]] Report validate_report(const Scenario& scenario);

}  // namespace etesc
