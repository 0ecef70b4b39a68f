#include "etesc/scenario.hpp"
#include "etesc/workflows.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 2, kDivergence = 3, kCheckFailure = 4 };

struct Options {
    std::string scenario;
    std::string out_dir = ".";
    std::string mode;
    std::string trigger;
    std::optional<int> jobs;
};

void add_common_flags(CLI::App* cmd, Options& opts, bool with_out_dir) {
    cmd->add_option("--scenario", opts.scenario, "Scenario configuration file")->required();
    if (with_out_dir) {
        cmd->add_option("--out-dir", opts.out_dir, "Directory for CSV outputs")->capture_default_str();
    }
    cmd->add_option("--mode", opts.mode, "Override sim.mode")->check(CLI::IsMember({"full", "average"}));
    cmd->add_option("--trigger", opts.trigger, "Override trigger.kind")
        ->check(CLI::IsMember({"static", "dynamic", "periodic-static", "periodic-dynamic", "continuous"}));
    cmd->add_option("--jobs", opts.jobs, "Worker threads for sweep")->check(CLI::PositiveNumber);
}

etesc::Overrides to_overrides(const Options& opts) {
    etesc::Overrides ov;
    if (!opts.mode.empty()) {
        ov.mode = etesc::parse_sim_mode(opts.mode);
    }
    if (!opts.trigger.empty()) {
        ov.trigger = etesc::parse_trigger_kind(opts.trigger);
    }
    ov.jobs = opts.jobs;
    return ov;
}

int finish(const etesc::Report& report) {
    std::cout << report.render() << std::flush;
    if (!report.ok()) {
        for (const auto& name : report.failed_checks) {
            std::cerr << "check failed: " << name << '\n';
        }
        return kCheckFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-triggered extremum seeking simulator"};
    app.require_subcommand(1);
    Options opts;
    auto* simulate = app.add_subcommand("simulate", "Run one simulation and write trajectory and event CSVs");
    auto* certify = app.add_subcommand("certify", "Report the Lyapunov certificate, envelopes and dwell time");
    auto* sweep = app.add_subcommand("sweep", "Run the campaign block and write the stats CSV");
    auto* validate = app.add_subcommand("validate", "Load and validate a scenario");
    add_common_flags(simulate, opts, true);
    add_common_flags(certify, opts, false);
    add_common_flags(sweep, opts, true);
    add_common_flags(validate, opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        const etesc::Scenario sc = etesc::load_scenario(opts.scenario, to_overrides(opts));
        if (simulate->parsed()) {
            return finish(etesc::simulate_scenario(sc, opts.out_dir));
        }
        if (certify->parsed()) {
            return finish(etesc::certify_scenario(sc));
        }
        if (sweep->parsed()) {
            return finish(etesc::sweep_scenario(sc, opts.out_dir));
        }
        return finish(etesc::validate_report(sc));
    } catch (const etesc::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return kDivergence;
    } catch (const etesc::CertificateError& e) {
        std::cerr << "certificate error: " << e.what() << '\n';
        return kConfigError;
    } catch (const etesc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
