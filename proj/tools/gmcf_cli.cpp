// Command-line front end: gmcf {check|run|slice-ode|emit} CONFIG [options]

#include "gmcf/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kInternalError = 70;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "override a key: section.key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphical mean curvature flows over flat tori"};
  app.require_subcommand(1);

  Common check_args, run_args, slice_args, emit_args;
  gmcf::RunnerOptions run_opts, slice_opts;
  std::string run_out, slice_out;

  auto* check = app.add_subcommand("check", "evaluate the hypotheses for the configured problem");
  add_common(check, check_args);

  auto* run = app.add_subcommand("run", "run the configured flow and write traces and reports");
  add_common(run, run_args);
  run->add_option("-o,--output", run_out, "output directory (overrides output.dir)");
  run->add_flag("--skip-checks", run_opts.skip_checks, "run even if the hypotheses fail");

  auto* slice = app.add_subcommand("slice-ode", "integrate the slice ODE r' = -n phi'(r)");
  add_common(slice, slice_args);
  slice->add_option("-o,--output", slice_out, "output directory (overrides output.dir)");

  auto* emit = app.add_subcommand("emit", "print the configuration in canonical form");
  add_common(emit, emit_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gmcf::exit_code::usage;
  }

  try {
    if (check->parsed()) {
      const auto config = gmcf::load_config(check_args.config, check_args.overrides);
      return gmcf::command_check(config, std::cout);
    }
    if (run->parsed()) {
      const auto config = gmcf::load_config(run_args.config, run_args.overrides);
      if (!run_out.empty()) run_opts.output_dir = run_out;
      return gmcf::command_run(config, run_opts, std::cout);
    }
    if (slice->parsed()) {
      const auto config = gmcf::load_config(slice_args.config, slice_args.overrides);
      if (!slice_out.empty()) slice_opts.output_dir = slice_out;
      return gmcf::command_slice_ode(config, slice_opts, std::cout);
    }
    if (emit->parsed()) {
      std::cout << gmcf::emit_config(gmcf::load_config(emit_args.config, emit_args.overrides));
      return 0;
    }
  } catch (const gmcf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return gmcf::exit_code::usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternalError;
  }
  return gmcf::exit_code::usage;
}
