// phasync command-line front end.

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "phasync/commands.hpp"

namespace {

using phasync::cli::Command;
using phasync::cli::Options;

void add_common(CLI::App* sub, Options& opt) {
    sub->add_option("input", opt.input, "problem file")->required();
    sub->add_option("--out", opt.out_dir, "directory for report files");
}

void add_maps(CLI::App* sub, Options& opt) {
    sub->add_option("--transformation", opt.transformation, "transformation file")->required();
    sub->add_option("--target", opt.target, "target (D, B) file")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-synchronization decoupling of linear second-order systems"};
    app.require_subcommand(1);
    Options opt;
    std::map<CLI::App*, Command> commands;

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the quadratic pencil");
    add_common(spectrum, opt);
    commands[spectrum] = phasync::cli::cmd_spectrum;

    auto* decouple = app.add_subcommand("decouple", "build the decoupling transformation");
    add_common(decouple, opt);
    decouple->add_option("--pairing", opt.pairing, "default | custom=<file>");
    decouple->add_option("--vecs", opt.vecs, "eigenvector override file");
    commands[decouple] = phasync::cli::cmd_decouple;

    auto* check = app.add_subcommand("check", "compatibility of a given transformation");
    add_common(check, opt);
    add_maps(check, opt);
    commands[check] = phasync::cli::cmd_check;

    auto* simulate = app.add_subcommand("simulate", "trajectory round trip");
    add_common(simulate, opt);
    add_maps(simulate, opt);
    simulate->add_option("--p0", opt.p0, "decoupled initial position");
    simulate->add_option("--pdot0", opt.pdot0, "decoupled initial velocity");
    simulate->add_option("--q0", opt.q0, "original initial position");
    simulate->add_option("--v0", opt.v0, "original initial velocity");
    simulate->add_option("--t-end", opt.t_end, "final time")->capture_default_str();
    simulate->add_option("--step", opt.step, "RK4 step")->capture_default_str();
    commands[simulate] = phasync::cli::cmd_simulate;

    auto* modal = app.add_subcommand("modal", "invariants and modal-analysis decision");
    add_common(modal, opt);
    commands[modal] = phasync::cli::cmd_modal;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: InvalidArgument: " << e.what() << "\n";
        return 2;
    }
    for (const auto& [sub, cmd] : commands) {
        if (sub->parsed()) return phasync::cli::run_command(cmd, opt, std::cout, std::cerr);
    }
    return 2;
}
