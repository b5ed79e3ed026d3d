#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyptime/cli.hpp"
#include "hyptime/errors.hpp"

namespace {

struct SubcommandArgs {
  std::string config_file;
  std::map<std::string, std::string> flags;
  std::vector<std::string> sets;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hyptime::ConfigError({path + ": cannot open config file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

hyptime::ConfigEntries merge(const SubcommandArgs& args, std::vector<std::string>& violations) {
  hyptime::ConfigEntries entries;
  if (!args.config_file.empty()) {
    entries = hyptime::parse_entries(read_file(args.config_file), args.config_file, violations);
  }
  std::string overrides;
  for (const std::string& s : args.sets) overrides += s + "\n";
  for (const auto& [key, value] : hyptime::parse_entries(overrides, "--set", violations)) {
    entries[key] = {value.text, "--set " + key};
  }
  for (const auto& [key, value] : args.flags) entries[key] = {value, "--" + key};
  return entries;
}

int run(const std::string& command, const SubcommandArgs& args) {
  std::vector<std::string> violations;
  const hyptime::ConfigEntries entries = merge(args, violations);
  const hyptime::ExperimentConfig config = hyptime::build_config(command, entries, violations);
  std::ofstream file;
  std::ostream* csv = &std::cout;
  if (config.out != "-") {
    file.open(config.out, std::ios::binary | std::ios::trunc);
    if (!file) throw hyptime::ConfigError({"out: cannot open '" + config.out + "' for writing"});
    csv = &file;
  }
  const hyptime::RunReport report = hyptime::run_experiment(config, *csv);
  csv->flush();
  if (!config.json.empty()) {
    const std::string text = hyptime::report_to_json(report).dump(2) + "\n";
    if (config.json == "-") {
      std::cout << text;
    } else {
      std::ofstream j(config.json, std::ios::binary | std::ios::trunc);
      if (!j) throw hyptime::ConfigError({"json: cannot open '" + config.json + "' for writing"});
      j << text;
    }
  }
  if (report.summary.contains("notice")) {
    std::cerr << "notice: " << report.summary["notice"].get<std::string>() << "\n";
  }
  return report.passed ? hyptime::kExitOk : hyptime::kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolic-time experiments on one-dimensional maps"};
  app.require_subcommand(1);

  std::map<std::string, SubcommandArgs> args;
  for (const std::string& name : hyptime::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    SubcommandArgs& a = args[name];
    sub->add_option("--config", a.config_file, "key = value config file; flags override it");
    sub->add_option("--set", a.sets, "Extra KEY=VALUE entry, e.g. --set map.c=3");
    for (const auto& [key, def] : hyptime::config_defaults()) {
      const std::string help = def.empty() ? "(unset)" : "default " + def;
      sub->add_option_function<std::string>(
          "--" + key, [&a, key = key](const std::string& v) { a.flags[key] = v; }, help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hyptime::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, args[command]);
  } catch (const hyptime::ConfigError& e) {
    for (const std::string& v : e.violations()) std::cerr << "config error: " << v << "\n";
    return hyptime::kExitConfig;
  } catch (const hyptime::DomainError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return hyptime::kExitConfig;
  } catch (const hyptime::NotApplicableError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return hyptime::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return hyptime::kExitNumeric;
  }
}
