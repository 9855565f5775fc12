#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pberg/commands.hpp"
#include "pberg/error.hpp"

namespace {

void print_error(const std::string& code, const std::string& message) {
  nlohmann::json j{{"error", code}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-Bergman kernel laboratory"};
  app.require_subcommand(1, 1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its keys");

  // Flag -> dotted config key. Values stay strings until make_config.
  const std::pair<const char*, const char*> flag_keys[] = {
      {"--domain", "domain.kind"},   {"--r-in", "domain.r_in"},     {"--R", "domain.R"},
      {"--n-r", "quad.n_r"},         {"--n-theta", "quad.n_theta"}, {"--m-boundary", "quad.m_boundary"},
      {"--grading", "quad.grading"}, {"--N", "basis.N"},            {"--tol", "solver.tol"},
      {"--max-iter", "solver.max_iter"}, {"--eps-floor", "solver.eps_floor"}, {"--seed", "seed"},
      {"--out", "output.dir"},       {"--format", "output.format"}, {"--p", "run.p"},
      {"--z", "run.z"},              {"--zeta", "run.zeta"},        {"--X", "run.X"},
      {"--region", "run.region"},    {"--eps", "run.eps"},          {"--s", "run.s"},
      {"--radii", "run.radii"},      {"--coeffs", "run.coeffs"},    {"--oracle", "run.oracle"},
      {"--candidates", "run.candidates"}, {"--multistarts", "run.multistarts"},
      {"--levels", "run.levels"},    {"--fd-step", "run.h"},              {"--criteria", "run.criteria"},
  };
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& [flag, key] : flag_keys) {
    options[key] = app.add_option(flag, values[key], std::string("config key ") + key);
  }
  bool quick = false;
  CLI::Option* quick_opt = app.add_flag("--quick", quick, "accepted by verify; all criteria are primary");

  for (const std::string& name : pberg::command_names()) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    pberg::ConfigEntries flags;
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) flags[key] = values[key];
    if (quick_opt->count() > 0) flags["quick"] = quick;
    const pberg::ConfigEntries file =
        config_path.empty() ? pberg::ConfigEntries{} : pberg::load_config_file(config_path);
    const pberg::RunConfig cfg = pberg::make_config(command, file, flags);

    const pberg::CommandOutput out = pberg::run_command(cfg, [](const std::string& line) {
      std::printf("%s\n", line.c_str());
      std::fflush(stdout);
    });
    if (command != "verify") std::fputs(pberg::to_csv(out.table).c_str(), stdout);
    if (!out.results.empty()) std::fprintf(stderr, "results %s\n", out.results.dump().c_str());
    for (const auto& path : pberg::emit(out, cfg)) std::fprintf(stderr, "wrote %s\n", path.string().c_str());
    return out.exit_status;
  } catch (const pberg::Error& e) {
    print_error(std::string(pberg::error_code_name(e.code())), e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 3;
  }
}
