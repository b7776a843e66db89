#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zeno_dd/commands.hpp"
#include "zeno_dd/config.hpp"
#include "zenodd/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kCheckFailure = 1, kUsage = 2, kIo = 3 };

struct Flags {
    std::string config;
    std::map<std::string, std::string> overrides;
};

void add_override(CLI::App& app, Flags& flags, const std::string& flag, const std::string& key,
                  const std::string& help) {
    app.add_option_function<std::string>(
        flag, [&flags, key](const std::string& v) { flags.overrides[key] = v; }, help);
}

void add_common(CLI::App& cmd, Flags& flags) {
    cmd.add_option("--config", flags.config, "flat key = value config file");
    add_override(cmd, flags, "--model", "model", "reference | random(SEED) | file:PATH");
    add_override(cmd, flags, "--d1", "d1", "dimension of system 1");
    add_override(cmd, flags, "--d2", "d2", "dimension of system 2");
    add_override(cmd, flags, "--big-t", "big-t", "T = t ||H^||_inf");
    add_override(cmd, flags, "--set", "set", "pauli | pauli-atypical | file:PATH");
    add_override(cmd, flags, "--seed", "seed", "master seed");
    add_override(cmd, flags, "--samples", "samples", "trajectories per n");
    add_override(cmd, flags, "--n-min", "n-min", "smallest n");
    add_override(cmd, flags, "--n-max", "n-max", "largest n");
    add_override(cmd, flags, "--n-points", "n-points", "geometric grid points");
    add_override(cmd, flags, "--n-values", "n-values", "explicit comma-separated n list");
    add_override(cmd, flags, "--sigma1", "sigma1", "partner state on system 1");
    add_override(cmd, flags, "--sigma2", "sigma2", "partner state on system 2");
    add_override(cmd, flags, "--threshold", "threshold", "tail threshold");
    add_override(cmd, flags, "--statistics", "statistics", "comma-separated statistic names");
    add_override(cmd, flags, "--out", "out", "output directory");
    add_override(cmd, flags, "--threads", "threads", "worker threads (default: ZENO_DD_THREADS or 1)");
}

zeno_dd::ExperimentConfig resolve(const Flags& flags) {
    zeno_dd::ExperimentConfig cfg;
    if (!flags.config.empty()) zeno_dd::apply_config_file(cfg, flags.config);
    for (const auto& [key, value] : flags.overrides) zeno_dd::apply_setting(cfg, key, value);
    return cfg;
}

int run(const std::function<zeno_dd::CommandResult(const zeno_dd::ExperimentConfig&)>& command,
        const Flags& flags, bool print_report) {
    try {
        const zeno_dd::ExperimentConfig cfg = resolve(flags);
        const zeno_dd::CommandResult result = command(cfg);
        zeno_dd::write_result(result, cfg.out);
        if (print_report) {
            for (const std::string& line : result.report) std::cout << line << '\n';
        }
        for (const auto& s : result.series) std::cerr << "wrote " << cfg.out << "/" << s.filename << '\n';
        for (const auto& [name, text] : result.text_files) std::cerr << "wrote " << cfg.out << "/" << name << '\n';
        for (const std::string& f : result.failures) std::cerr << "check failed: " << f << '\n';
        return result.ok() ? kOk : kCheckFailure;
    } catch (const zeno_dd::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const zeno_dd::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const zenodd::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random and averaged dynamical decoupling experiments", "zeno-dd"};
    app.require_subcommand(1);

    struct Entry {
        const char* name;
        const char* help;
        std::function<zeno_dd::CommandResult(const zeno_dd::ExperimentConfig&)> command;
        bool report;
    };
    const std::vector<Entry> entries = {
        {"zeno", "Zeno-limit error against its bound", zeno_dd::cmd_zeno, false},
        {"trajectories", "Monte-Carlo means of trajectory statistics with bounds",
         zeno_dd::cmd_trajectories, false},
        {"tail", "probability that a statistic falls at or below a threshold", zeno_dd::cmd_tail, false},
        {"pulse-inversion", "distances with and without pulse inversion",
         zeno_dd::cmd_pulse_inversion, false},
        {"verify", "run the bound and identity check suite", zeno_dd::cmd_verify, true},
        {"fixtures", "dump the reference Hamiltonian, projector and sequences",
         zeno_dd::cmd_fixtures, false},
    };

    std::vector<Flags> flags(entries.size());
    std::vector<CLI::App*> subs;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        CLI::App* sub = app.add_subcommand(entries[k].name, entries[k].help);
        add_common(*sub, flags[k]);
        if (std::string(entries[k].name) == "verify") {
            add_override(*sub, flags[k], "--inject-fault", "inject-fault", "projector (test hook)");
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    for (std::size_t k = 0; k < entries.size(); ++k) {
        if (subs[k]->parsed()) return run(entries[k].command, flags[k], entries[k].report);
    }
    return kUsage;
}
