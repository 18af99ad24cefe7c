// stochham command-line interface. Talks to the library exclusively through
// the C API in stochham/stochham.h.
//
// Exit codes: 0 = run completed and every gated criterion passed,
//             1 = run completed but a gated criterion failed,
//             2 = configuration / usage error,
//             3 = runtime error (I/O, numerics, domain aborts beyond budget).
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "stochham/stochham.h"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    uint64_t seed = 0;
    int64_t replicas = 0;
    int threads = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* replicas_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "Path to the run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    args.out_opt =
        cmd->add_option("--out", args.out, "Output directory (overrides [output] dir)");
    args.seed_opt = cmd->add_option("--seed", args.seed,
                                    "Master seed (overrides the config file's seed)");
    args.replicas_opt =
        cmd->add_option("--replicas", args.replicas, "Replica count (overrides the file's)");
    cmd->add_option("--threads", args.threads,
                    "Worker threads (default: hardware concurrency)");
}

int run(const char* command, const CommonArgs& args) {
    sh_run_options opts{};
    opts.out_dir = args.out_opt->count() > 0 ? args.out.c_str() : nullptr;
    opts.has_seed = args.seed_opt->count() > 0 ? 1 : 0;
    opts.seed = args.seed;
    opts.has_replicas = args.replicas_opt->count() > 0 ? 1 : 0;
    opts.replicas = args.replicas;
    opts.threads = args.threads;

    int pass = 0;
    char* report_path = nullptr;
    sh_status st = sh_run_command(command, args.config.c_str(), &opts, &pass, nullptr,
                                  &report_path);
    if (st == SH_OK) {
        std::printf("%s: %s\nreport: %s\n", command, pass ? "PASS" : "FAIL",
                    report_path != nullptr ? report_path : "(none)");
        sh_string_free(report_path);
        return pass ? 0 : 1;
    }
    sh_string_free(report_path);
    if (st == SH_ERR_SPEC || st == SH_ERR_INVALID_ARGUMENT) {
        std::fprintf(stderr, "config error: %s\n", sh_last_error());
        return 2;
    }
    std::fprintf(stderr, "runtime error (code %d): %s\n", static_cast<int>(st),
                 sh_last_error());
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochham — integrable systems with noisy actions: simulation and "
                 "distributional verification"};
    app.set_version_flag("--version", std::string(sh_version()));
    app.require_subcommand(1);

    CommonArgs sim_args, clt_args, levy_args, period_args;
    CLI::App* sim = app.add_subcommand(
        "simulate", "Integrate replica paths and write trajectories + metadata");
    add_common(sim, sim_args);
    CLI::App* clt = app.add_subcommand(
        "verify-clt", "Run the replica ensemble and test the normalized statistic "
                      "against its predicted Gaussian limit");
    add_common(clt, clt_args);
    CLI::App* levy = app.add_subcommand(
        "levy-check", "Compare empirical characteristic functions of simulated "
                      "increments against the exact exponent");
    add_common(levy, levy_args);
    CLI::App* period = app.add_subcommand(
        "period-table", "Tabulate oscillator reference periods against quadrature");
    add_common(period, period_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    if (sim->parsed()) return run("simulate", sim_args);
    if (clt->parsed()) return run("verify-clt", clt_args);
    if (levy->parsed()) return run("levy-check", levy_args);
    if (period->parsed()) return run("period-table", period_args);
    std::fprintf(stderr, "config error: no command given\n");
    return 2;
}
