#pragma once

#include <string>
#include <vector>

#include "cdwork/counterdiabatic.hpp"
#include "cdwork/protocols.hpp"

namespace cdwork {

enum class OutputKind { timeseries, qsl, work, spectra };

std::string output_kind_name(OutputKind k);
OutputKind output_kind_from_name(const std::string& name);

enum class SweepSpacing { linear, log };

// One protocol duration, a list of them, or a generated sweep.  Resolution
// always yields a strictly ascending list; that ordering is also the row
// ordering of every emitted table.
struct TauSpec {
  enum class Kind { scalar, list, sweep };
  Kind kind = Kind::scalar;
  double scalar = 0.1;
  std::vector<double> list;
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  SweepSpacing spacing = SweepSpacing::linear;
};

std::vector<double> resolve_tau_values(const TauSpec& tau);

// Flat scenario description, one JSON object.  tau_d either tracks the swept
// tau (follows_tau) or freezes the transitionless intensity at a number.
struct ScenarioConfig {
  std::string label = "run";
  std::string model = "lz";
  double j = 5.0;
  double b_initial = -50.0;
  double b_final = 50.0;
  ProtocolKind protocol = ProtocolKind::smoothstep;
  CdMode cd = CdMode::standard;
  TauSpec tau;
  bool tau_d_follows_tau = true;
  double tau_d = 0.0;
  int steps = 4000;
  bool certify = true;
  double convergence_tol = 1e-8;
  bool compare_protocols = false;
  std::vector<OutputKind> outputs;
};

ScenarioConfig parse_config(const std::string& text);

// Canonical form: every key present, fixed order, 2-space indent, trailing
// newline.  serialize(parse(text)) is a fixed point.
std::string serialize_config(const ScenarioConfig& config);

// Patches the raw JSON document before parsing.  Each entry is key=value with
// dotted paths for nested fields (tau.start=0.02); values are parsed as JSON
// when possible and fall back to strings.
std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides);

ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct Cell {
  enum class Kind { number, text, empty };
  Kind kind = Kind::empty;
  double number = 0.0;
  std::string text;

  static Cell num(double v) { return {Kind::number, v, {}}; }
  static Cell str(std::string s) { return {Kind::text, 0.0, std::move(s)}; }
  static Cell na() { return {}; }
};

// Column-named result table plus the hints the plot emitter needs.  Empty
// cells mean not-applicable and render as empty CSV fields.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  int x_column = 0;
  bool log_x = false;
  std::vector<int> y_columns;
  std::vector<int> group_columns;
};

struct RunResult {
  ScenarioConfig config;
  std::vector<Table> tables;
  std::string meta_json;  // provenance document, rendered
};

// Executes every (tau, protocol) cell of the scenario, digests the records
// into tables, and checks the documented monotonicity features of the figure
// presets.  Deterministic for a fixed config and version.
RunResult run_scenario(const ScenarioConfig& config);

}  // namespace cdwork
