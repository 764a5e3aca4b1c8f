#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cdwork/report.hpp"
#include "cdwork/scenario.hpp"
#include "cdwork/version.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw cdwork::ConfigError("cannot read config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_command(const std::string& config_path, const std::string& preset_name,
                const std::string& out_dir,
                const std::vector<std::string>& overrides, bool dump_only) {
  if (!preset_name.empty() && !config_path.empty()) {
    throw cdwork::ConfigError("give either a config file or --preset, not both");
  }
  std::string text;
  if (!preset_name.empty()) {
    text = cdwork::serialize_config(cdwork::preset(preset_name));
  } else if (!config_path.empty()) {
    text = slurp(config_path);
  } else {
    throw cdwork::ConfigError("give a config file or --preset NAME");
  }
  if (!overrides.empty()) text = cdwork::apply_overrides(text, overrides);
  const cdwork::ScenarioConfig cfg = cdwork::parse_config(text);
  if (dump_only) {
    std::cout << cdwork::serialize_config(cfg);
    return 0;
  }
  const cdwork::RunResult result = cdwork::run_scenario(cfg);
  cdwork::write_outputs(result, out_dir);
  if (result.tables.empty()) {
    std::cout << "run '" << cfg.label << "' completed; no outputs requested\n";
    return 0;
  }
  for (const cdwork::Table& t : result.tables) {
    std::cout << out_dir << "/" << cfg.label << "_" << t.name << ".csv  ("
              << t.rows.size() << " rows)\n";
    std::cout << out_dir << "/" << cfg.label << "_" << t.name << ".svg\n";
  }
  std::cout << out_dir << "/run_meta.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Counterdiabatic driving workbench for the two-level avoided crossing"};
  app.name("cdwork");
  app.set_version_flag("--version", std::string(cdwork::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string preset_name;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  bool dump_only = false;

  CLI::App* run =
      app.add_subcommand("run", "Execute a scenario and write its tables");
  run->add_option("config", config_path, "Scenario config file (JSON)");
  run->add_option("--preset", preset_name,
                  "Start from a named preset instead of a file");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--override", overrides,
                  "key=value patch applied before parsing; dotted paths reach "
                  "into objects (tau.count=40)")
      ->type_size(1);
  run->add_flag("--dump-config", dump_only,
                "Print the resolved config and exit without running");

  CLI::App* presets = app.add_subcommand("presets", "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (presets->parsed()) {
      for (const std::string& name : cdwork::preset_names()) {
        std::cout << name << "\n";
      }
      return 0;
    }
    return run_command(config_path, preset_name, out_dir, overrides, dump_only);
  } catch (const cdwork::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cdwork::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
