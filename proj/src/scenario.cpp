#include "cdwork/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <future>
#include <thread>
#include <utility>

#include "json.hpp"

#include "cdwork/energetics.hpp"
#include "cdwork/lz_model.hpp"
#include "cdwork/propagation.hpp"
#include "cdwork/qsl.hpp"
#include "cdwork/version.hpp"

namespace cdwork {

using ojson = nlohmann::ordered_json;

std::string output_kind_name(OutputKind k) {
  switch (k) {
    case OutputKind::timeseries: return "timeseries";
    case OutputKind::qsl: return "qsl";
    case OutputKind::work: return "work";
    case OutputKind::spectra: return "spectra";
  }
  throw ConfigError("unhandled output kind");
}

OutputKind output_kind_from_name(const std::string& name) {
  if (name == "timeseries") return OutputKind::timeseries;
  if (name == "qsl") return OutputKind::qsl;
  if (name == "work") return OutputKind::work;
  if (name == "spectra") return OutputKind::spectra;
  throw ConfigError("unknown output kind '" + name +
                    "' (known: timeseries, qsl, work, spectra)");
}

std::vector<double> resolve_tau_values(const TauSpec& tau) {
  std::vector<double> out;
  switch (tau.kind) {
    case TauSpec::Kind::scalar:
      out.push_back(tau.scalar);
      break;
    case TauSpec::Kind::list:
      out = tau.list;
      break;
    case TauSpec::Kind::sweep: {
      if (tau.count < 1) throw ConfigError("tau sweep count must be >= 1");
      if (tau.count == 1) {
        out.push_back(tau.start);
        break;
      }
      const bool log_spaced = tau.spacing == SweepSpacing::log;
      const double a = log_spaced ? std::log(tau.start) : tau.start;
      const double b = log_spaced ? std::log(tau.stop) : tau.stop;
      for (int i = 0; i < tau.count; ++i) {
        const double f = static_cast<double>(i) / (tau.count - 1);
        const double v = a + (b - a) * f;
        out.push_back(log_spaced ? std::exp(v) : v);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  for (double v : out) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("every tau value must be a positive finite number");
    }
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] == out[i - 1]) {
      throw ConfigError("tau values must be distinct");
    }
  }
  return out;
}

namespace {

const char* const kKnownKeys[] = {
    "label", "model",   "J",       "B_i",
    "B_f",   "protocol", "cd",     "tau",
    "tau_d", "steps",   "certify", "convergence_tol",
    "compare_protocols", "outputs"};

double as_number(const ojson& v, const char* key) {
  if (!v.is_number()) {
    throw ConfigError(std::string("'") + key + "' must be a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw ConfigError(std::string("'") + key + "' must be finite");
  }
  return x;
}

double as_positive(const ojson& v, const char* key) {
  const double x = as_number(v, key);
  if (!(x > 0.0)) {
    throw ConfigError(std::string("'") + key + "' must be positive");
  }
  return x;
}

bool as_bool(const ojson& v, const char* key) {
  if (!v.is_boolean()) {
    throw ConfigError(std::string("'") + key + "' must be true or false");
  }
  return v.get<bool>();
}

std::string as_string(const ojson& v, const char* key) {
  if (!v.is_string()) {
    throw ConfigError(std::string("'") + key + "' must be a string");
  }
  return v.get<std::string>();
}

TauSpec parse_tau(const ojson& v) {
  TauSpec t;
  if (v.is_number()) {
    t.kind = TauSpec::Kind::scalar;
    t.scalar = as_positive(v, "tau");
    return t;
  }
  if (v.is_array()) {
    if (v.empty()) throw ConfigError("'tau' list must not be empty");
    t.kind = TauSpec::Kind::list;
    for (const auto& e : v) t.list.push_back(as_positive(e, "tau"));
    return t;
  }
  if (v.is_object()) {
    t.kind = TauSpec::Kind::sweep;
    for (const auto& item : v.items()) {
      const std::string& k = item.key();
      if (k != "start" && k != "stop" && k != "count" && k != "spacing") {
        throw ConfigError("unknown tau sweep key '" + k +
                          "' (known: start, stop, count, spacing)");
      }
    }
    if (!v.contains("start") || !v.contains("stop") || !v.contains("count")) {
      throw ConfigError("tau sweep needs start, stop and count");
    }
    t.start = as_positive(v.at("start"), "tau.start");
    t.stop = as_positive(v.at("stop"), "tau.stop");
    if (!v.at("count").is_number_integer()) {
      throw ConfigError("'tau.count' must be an integer");
    }
    t.count = v.at("count").get<int>();
    if (t.count < 1) throw ConfigError("'tau.count' must be >= 1");
    if (v.contains("spacing")) {
      const std::string sp = as_string(v.at("spacing"), "tau.spacing");
      if (sp == "linear") {
        t.spacing = SweepSpacing::linear;
      } else if (sp == "log") {
        t.spacing = SweepSpacing::log;
      } else {
        throw ConfigError("'tau.spacing' must be \"linear\" or \"log\"");
      }
    }
    if (t.count > 1 && t.start == t.stop) {
      throw ConfigError("tau sweep endpoints must differ when count > 1");
    }
    return t;
  }
  throw ConfigError(
      "'tau' must be a number, an array of numbers, or "
      "{start, stop, count, spacing}");
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  for (const auto& item : doc.items()) {
    const std::string& k = item.key();
    if (std::none_of(std::begin(kKnownKeys), std::end(kKnownKeys),
                     [&k](const char* known) { return k == known; })) {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }

  ScenarioConfig cfg;
  bool tau_d_present = false;

  if (doc.contains("label")) {
    cfg.label = as_string(doc.at("label"), "label");
    if (cfg.label.empty()) throw ConfigError("'label' must not be empty");
    for (char c : cfg.label) {
      const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '_' || c == '-';
      if (!ok) {
        throw ConfigError(
            "'label' may use letters, digits, '_' and '-' (it names files)");
      }
    }
  }
  if (doc.contains("model")) {
    cfg.model = as_string(doc.at("model"), "model");
    if (cfg.model != "lz") {
      throw ConfigError("unknown model '" + cfg.model + "' (supported: lz)");
    }
  }
  if (doc.contains("J")) cfg.j = as_positive(doc.at("J"), "J");
  if (doc.contains("B_i")) cfg.b_initial = as_number(doc.at("B_i"), "B_i");
  if (doc.contains("B_f")) cfg.b_final = as_number(doc.at("B_f"), "B_f");
  if (doc.contains("protocol")) {
    cfg.protocol = protocol_kind_from_name(as_string(doc.at("protocol"), "protocol"));
  }
  if (doc.contains("cd")) {
    cfg.cd = cd_mode_from_name(as_string(doc.at("cd"), "cd"));
  }
  if (doc.contains("tau")) cfg.tau = parse_tau(doc.at("tau"));
  if (doc.contains("tau_d")) {
    tau_d_present = true;
    const ojson& v = doc.at("tau_d");
    if (v.is_string()) {
      if (v.get<std::string>() != "tau") {
        throw ConfigError(
            "'tau_d' must be a positive number or the string \"tau\"");
      }
      cfg.tau_d_follows_tau = true;
    } else {
      cfg.tau_d = as_positive(v, "tau_d");
      cfg.tau_d_follows_tau = false;
    }
  }
  if (doc.contains("steps")) {
    if (!doc.at("steps").is_number_integer()) {
      throw ConfigError("'steps' must be an integer");
    }
    cfg.steps = doc.at("steps").get<int>();
    if (cfg.steps < 100) throw ConfigError("'steps' must be >= 100");
  }
  if (doc.contains("certify")) cfg.certify = as_bool(doc.at("certify"), "certify");
  if (doc.contains("convergence_tol")) {
    cfg.convergence_tol = as_positive(doc.at("convergence_tol"), "convergence_tol");
  }
  if (doc.contains("compare_protocols")) {
    cfg.compare_protocols = as_bool(doc.at("compare_protocols"), "compare_protocols");
  }
  if (doc.contains("outputs")) {
    const ojson& v = doc.at("outputs");
    if (!v.is_array()) {
      throw ConfigError("'outputs' must be an array of output kind names");
    }
    bool requested[4] = {false, false, false, false};
    for (const auto& e : v) {
      requested[static_cast<int>(
          output_kind_from_name(as_string(e, "outputs")))] = true;
    }
    cfg.outputs.clear();
    for (OutputKind k : {OutputKind::timeseries, OutputKind::qsl,
                         OutputKind::work, OutputKind::spectra}) {
      if (requested[static_cast<int>(k)]) cfg.outputs.push_back(k);
    }
  }

  const std::vector<double> taus = resolve_tau_values(cfg.tau);
  if (cfg.cd == CdMode::tau_d_fixed && taus.size() > 1 && !tau_d_present) {
    throw ConfigError(
        "'tau_d' is required when cd = tau_d_fixed and tau sweeps; give a "
        "number, or \"tau\" to track the sweep");
  }
  return cfg;
}

std::string serialize_config(const ScenarioConfig& config) {
  ojson o;
  o["label"] = config.label;
  o["model"] = config.model;
  o["J"] = config.j;
  o["B_i"] = config.b_initial;
  o["B_f"] = config.b_final;
  o["protocol"] = protocol_kind_name(config.protocol);
  o["cd"] = cd_mode_name(config.cd);
  switch (config.tau.kind) {
    case TauSpec::Kind::scalar:
      o["tau"] = config.tau.scalar;
      break;
    case TauSpec::Kind::list:
      o["tau"] = config.tau.list;
      break;
    case TauSpec::Kind::sweep: {
      ojson sweep;
      sweep["start"] = config.tau.start;
      sweep["stop"] = config.tau.stop;
      sweep["count"] = config.tau.count;
      sweep["spacing"] =
          config.tau.spacing == SweepSpacing::log ? "log" : "linear";
      o["tau"] = std::move(sweep);
      break;
    }
  }
  if (config.tau_d_follows_tau) {
    o["tau_d"] = "tau";
  } else {
    o["tau_d"] = config.tau_d;
  }
  o["steps"] = config.steps;
  o["certify"] = config.certify;
  o["convergence_tol"] = config.convergence_tol;
  o["compare_protocols"] = config.compare_protocols;
  ojson outs = ojson::array();
  for (OutputKind k : config.outputs) outs.push_back(output_kind_name(k));
  o["outputs"] = std::move(outs);
  return o.dump(2) + "\n";
}

std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  for (const std::string& ov : overrides) {
    const std::size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + ov + "' must look like key=value");
    }
    const std::string path = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);

    std::vector<std::string> segments;
    std::size_t pos = 0;
    while (true) {
      const std::size_t dot = path.find('.', pos);
      segments.push_back(path.substr(pos, dot - pos));
      if (segments.back().empty()) {
        throw ConfigError("override '" + ov + "' has an empty path segment");
      }
      if (dot == std::string::npos) break;
      pos = dot + 1;
    }

    ojson value;
    try {
      value = ojson::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      value = raw;  // bare words are strings (protocol=linear, tau_d=tau)
    }

    ojson* cur = &doc;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
      ojson& next = (*cur)[segments[i]];
      if (next.is_null()) next = ojson::object();
      if (!next.is_object()) {
        throw ConfigError("override '" + ov + "' cannot descend into '" +
                          segments[i] + "' (not an object)");
      }
      cur = &next;
    }
    (*cur)[segments.back()] = std::move(value);
  }
  return doc.dump(2) + "\n";
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"};
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.label = name;
  if (name == "fig1") {
    // Ground-state probability of the driven operator dips mid-protocol.
    c.tau.kind = TauSpec::Kind::list;
    c.tau.list = {0.05, 0.1, 0.5};
    c.steps = 40000;
    c.outputs = {OutputKind::timeseries};
  } else if (name == "fig2") {
    // Speed-limit estimates across two decades of duration, linear ramp.
    c.protocol = ProtocolKind::linear;
    c.tau.kind = TauSpec::Kind::sweep;
    c.tau.start = 0.02;
    c.tau.stop = 2.0;
    c.tau.count = 20;
    c.tau.spacing = SweepSpacing::log;
    c.steps = 960000;
    c.outputs = {OutputKind::qsl};
  } else if (name == "fig3") {
    // Time-averaged excess work against duration, both ramp shapes.  The
    // grid is sized for the slowest drive: the saturated minimal-time bound
    // sits on its validity edge, and the integration residual grows as
    // (tau/steps)^2.
    c.cd = CdMode::tau_d_fixed;
    c.compare_protocols = true;
    c.tau.kind = TauSpec::Kind::sweep;
    c.tau.start = 0.05;
    c.tau.stop = 1.0;
    c.tau.count = 10;
    c.tau.spacing = SweepSpacing::linear;
    c.steps = 480000;
    c.outputs = {OutputKind::qsl};
  } else if (name == "fig4") {
    // Eigenvalue branches of both operators along one drive.
    c.tau.kind = TauSpec::Kind::scalar;
    c.tau.scalar = 0.1;
    c.steps = 16000;
    c.outputs = {OutputKind::spectra};
  } else if (name == "fig5") {
    // Control-field amplitude for several durations.
    c.tau.kind = TauSpec::Kind::list;
    c.tau.list = {0.05, 0.1, 0.5};
    c.steps = 40000;
    c.outputs = {OutputKind::spectra};
  } else if (name == "fig6") {
    // Ground-energy gap between driven and reference operators at frozen
    // control intensity.
    c.cd = CdMode::tau_d_fixed;
    c.tau_d_follows_tau = false;
    c.tau_d = 0.1;
    c.tau.kind = TauSpec::Kind::scalar;
    c.tau.scalar = 0.1;
    c.steps = 16000;
    c.outputs = {OutputKind::spectra};
  } else {
    throw ConfigError("unknown preset '" + name +
                      "' (known: fig1, fig2, fig3, fig4, fig5, fig6)");
  }
  return c;
}

namespace {

struct Job {
  double tau = 0.0;
  ProtocolKind protocol = ProtocolKind::smoothstep;
};

struct RunDigest {
  std::vector<std::vector<Cell>> timeseries;
  std::vector<std::vector<Cell>> work;
  std::vector<std::vector<Cell>> spectra;
  std::vector<std::vector<Cell>> qsl;
  ojson meta_entry;
};

bool wants(const ScenarioConfig& cfg, OutputKind k) {
  return std::find(cfg.outputs.begin(), cfg.outputs.end(), k) !=
         cfg.outputs.end();
}

ProtocolKind mirrored(ProtocolKind k) {
  return k == ProtocolKind::linear ? ProtocolKind::smoothstep
                                   : ProtocolKind::linear;
}

CDConvention convention_for(const ScenarioConfig& cfg, double tau) {
  switch (cfg.cd) {
    case CdMode::off:
      return {CdMode::off, 0.0};
    case CdMode::standard:
      return {CdMode::standard, 0.0};
    case CdMode::tau_d_fixed:
      return {CdMode::tau_d_fixed,
              cfg.tau_d_follows_tau ? tau : cfg.tau_d};
  }
  throw ConfigError("unhandled cd mode");
}

// Bookkeeping family for the speed-limit quantities.  The inequality chain
// manipulates the spectrum the state actually evolved under, so a standard
// run is booked with its own duration as the frozen intensity clock; with the
// drive off, the reference family is the driven family.
CDConvention qsl_bookkeeping(const ScenarioConfig& cfg,
                             const CDConvention& conv, double tau) {
  if (cfg.cd == CdMode::off) return {CdMode::standard, 0.0};
  if (cfg.cd == CdMode::standard) return {CdMode::tau_d_fixed, tau};
  return conv;
}

Cell opt_cell(const std::optional<double>& v) {
  return v ? Cell::num(*v) : Cell::na();
}

RunDigest execute_job(const ScenarioConfig& cfg, const Job& job) {
  const LZParams params(cfg.j,
                        Protocol{job.protocol, cfg.b_initial, cfg.b_final});
  const CDConvention conv = convention_for(cfg, job.tau);
  PropagateOptions opts;
  opts.steps = cfg.steps;
  opts.certify = cfg.certify;
  opts.convergence_tol = cfg.convergence_tol;
  const EvolutionRecord rec = propagate(params, conv, job.tau, opts);

  RunDigest d;
  const std::string proto_name = protocol_kind_name(job.protocol);
  const bool with_proto = cfg.compare_protocols;
  const int pts = rec.points();
  const int top = rec.dim() - 1;

  if (wants(cfg, OutputKind::timeseries)) {
    const Eigen::MatrixXd ph = transition_probabilities(rec, Basis::h0);
    const Eigen::MatrixXd pt = transition_probabilities(rec, Basis::total);
    d.timeseries.reserve(pts);
    for (int k = 0; k < pts; ++k) {
      std::vector<Cell> row;
      row.push_back(Cell::num(rec.s_at(k)));
      row.push_back(Cell::num(job.tau));
      if (with_proto) row.push_back(Cell::str(proto_name));
      row.push_back(Cell::num(ph(0, k)));
      row.push_back(Cell::num(pt(0, k)));
      d.timeseries.push_back(std::move(row));
    }
  }

  if (wants(cfg, OutputKind::work)) {
    const CDConvention wconv =
        cfg.cd == CdMode::off ? CDConvention{CdMode::standard, 0.0} : conv;
    const Basis family =
        wconv.mode == CdMode::tau_d_fixed ? Basis::total : Basis::h0;
    const WorkSeries ws = work_series(rec, family, wconv);
    d.work.reserve(pts);
    for (int k = 0; k < pts; ++k) {
      std::vector<Cell> row;
      row.push_back(Cell::num(rec.s_at(k)));
      row.push_back(Cell::num(job.tau));
      if (with_proto) row.push_back(Cell::str(proto_name));
      row.push_back(Cell::num(ws.mean_energy[k]));
      row.push_back(Cell::num(ws.work[k]));
      row.push_back(Cell::num(ws.work_adiabatic[k]));
      row.push_back(Cell::num(ws.work_excess[k]));
      d.work.push_back(std::move(row));
    }
  }

  if (wants(cfg, OutputKind::spectra)) {
    const Eigen::MatrixXd& e0 = rec.h0_eigenvalues();
    const Eigen::MatrixXd& et = rec.total_eigenvalues();
    const double intensity = rec.meta().intensity_time;
    d.spectra.reserve(pts);
    for (int k = 0; k < pts; ++k) {
      const double s = rec.s_at(k);
      std::vector<Cell> row;
      row.push_back(Cell::num(s));
      row.push_back(Cell::num(job.tau));
      if (with_proto) row.push_back(Cell::str(proto_name));
      row.push_back(Cell::num(e0(0, k)));
      row.push_back(Cell::num(e0(top, k)));
      row.push_back(Cell::num(et(0, k)));
      row.push_back(Cell::num(et(top, k)));
      row.push_back(Cell::num(
          intensity > 0.0 ? lz_cd_amplitude(params, s, intensity) : 0.0));
      d.spectra.push_back(std::move(row));
    }
  }

  if (wants(cfg, OutputKind::qsl)) {
    const CDConvention book = qsl_bookkeeping(cfg, conv, job.tau);
    const QSLReport rep = qsl_report(rec, book);
    const TimeAveragedCosts costs = time_averaged_costs(rec, book);
    const QslChain chain = chain_diagnostics(rec, book);
    std::vector<Cell> row;
    row.push_back(Cell::num(job.tau));
    row.push_back(cfg.cd == CdMode::off ? Cell::na() : Cell::num(book.tau_d));
    row.push_back(Cell::str(proto_name));
    row.push_back(Cell::num(rep.bures_angle));
    row.push_back(opt_cell(rep.tau_mt));
    row.push_back(opt_cell(rep.tau_wex));
    row.push_back(opt_cell(rep.tau_ml));
    row.push_back(Cell::num(rep.ordering_ok ? 1.0 : 0.0));
    row.push_back(Cell::num(costs.avg_max_gap));
    row.push_back(Cell::num(costs.avg_excess_work));
    row.push_back(Cell::num(chain.bd_margin_min));
    row.push_back(Cell::num(chain.cs_margin));
    d.qsl.push_back(std::move(row));
  }

  ojson me;
  me["tau"] = job.tau;
  if (cfg.cd == CdMode::off) {
    me["tau_d"] = nullptr;
  } else {
    me["tau_d"] = rec.meta().intensity_time;
  }
  me["protocol"] = proto_name;
  me["steps"] = rec.meta().steps;
  me["certified"] = rec.meta().certified;
  if (rec.meta().certified) {
    me["halving_difference"] = rec.meta().halving_difference;
  } else {
    me["halving_difference"] = nullptr;
  }
  me["h1_nonzero_at_boundary"] = rec.meta().h1_nonzero_at_boundary;
  d.meta_entry = std::move(me);
  return d;
}

Table table_shell(OutputKind kind, const ScenarioConfig& cfg,
                  std::size_t tau_count) {
  const bool with_proto = cfg.compare_protocols;
  Table t;
  t.name = output_kind_name(kind);
  auto push = [&t](const char* name) {
    t.columns.emplace_back(name);
    return static_cast<int>(t.columns.size()) - 1;
  };
  if (kind == OutputKind::qsl) {
    const int tau_col = push("tau");
    push("tau_d");
    const int proto_col = push("protocol");
    push("bures_angle");
    const int mt = push("tau_mt");
    const int wex = push("tau_wex");
    const int ml = push("tau_ml");
    push("ordering_ok");
    push("avg_max_gap");
    const int avg_wex = push("avg_excess_work");
    push("bd_chain_slack");
    push("cs_chain_slack");
    t.x_column = tau_col;
    t.log_x = tau_count > 2;
    t.group_columns = {proto_col};
    t.y_columns = {tau_col, mt, wex, ml, avg_wex};
    return t;
  }
  const int s_col = push("s");
  const int tau_col = push("tau");
  t.x_column = s_col;
  t.group_columns = {tau_col};
  if (with_proto) t.group_columns.push_back(push("protocol"));
  switch (kind) {
    case OutputKind::timeseries:
      t.y_columns = {push("p_minus_h0"), push("p_minus_total")};
      break;
    case OutputKind::work:
      push("mean_energy");
      t.y_columns = {push("work"), push("work_adiabatic"), push("work_excess")};
      break;
    case OutputKind::spectra:
      t.y_columns = {push("E_minus_h0"), push("E_plus_h0"),
                     push("E_minus_total"), push("E_plus_total"),
                     push("cd_amplitude")};
      break;
    default:
      break;
  }
  return t;
}

const Table* find_table(const RunResult& res, const std::string& name) {
  for (const Table& t : res.tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

int column_index(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  return it == t.columns.end()
             ? -1
             : static_cast<int>(it - t.columns.begin());
}

// fig1 feature: the mid-drive dip of the driven-operator ground probability
// gets shallower as the drive slows.
void check_fig1_dips(const RunResult& res) {
  const Table* t = find_table(res, "timeseries");
  if (t == nullptr) return;
  const int tau_col = column_index(*t, "tau");
  const int p_col = column_index(*t, "p_minus_total");
  std::vector<std::pair<double, double>> min_by_tau;  // (tau, min p)
  for (const auto& row : t->rows) {
    const double tau = row[tau_col].number;
    const double p = row[p_col].number;
    if (min_by_tau.empty() || min_by_tau.back().first != tau) {
      min_by_tau.emplace_back(tau, p);
    } else {
      min_by_tau.back().second = std::min(min_by_tau.back().second, p);
    }
  }
  for (std::size_t i = 1; i < min_by_tau.size(); ++i) {
    const double prev_depth = 1.0 - min_by_tau[i - 1].second;
    const double depth = 1.0 - min_by_tau[i].second;
    if (!(depth < prev_depth)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "dip depth is not decreasing with tau: depth(%.6g)=%.6g, "
                    "depth(%.6g)=%.6g",
                    min_by_tau[i - 1].first, prev_depth, min_by_tau[i].first,
                    depth);
      throw NumericalError(buf);
    }
  }
}

// fig3 feature: the averaged excess work decays with duration for every ramp.
void check_fig3_decay(const RunResult& res) {
  const Table* t = find_table(res, "qsl");
  if (t == nullptr) return;
  const int tau_col = column_index(*t, "tau");
  const int proto_col = column_index(*t, "protocol");
  const int wex_col = column_index(*t, "avg_excess_work");
  std::vector<std::pair<std::string, std::pair<double, double>>> last;
  for (const auto& row : t->rows) {
    const std::string& proto = row[proto_col].text;
    const double tau = row[tau_col].number;
    const double wex = row[wex_col].number;
    auto it = std::find_if(last.begin(), last.end(),
                           [&proto](const auto& e) { return e.first == proto; });
    if (it == last.end()) {
      last.push_back({proto, {tau, wex}});
      continue;
    }
    if (!(wex < it->second.second)) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "averaged excess work is not decreasing for the %s ramp: "
                    "value(%.6g)=%.6g, value(%.6g)=%.6g",
                    proto.c_str(), it->second.first, it->second.second, tau,
                    wex);
      throw NumericalError(buf);
    }
    it->second = {tau, wex};
  }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
  if (config.model != "lz") {
    throw ConfigError("unknown model '" + config.model + "' (supported: lz)");
  }
  const std::vector<double> taus = resolve_tau_values(config.tau);
  if (config.cd == CdMode::tau_d_fixed && !config.tau_d_follows_tau &&
      !(config.tau_d > 0.0)) {
    throw ConfigError("'tau_d' must be positive");
  }

  std::vector<Job> jobs;
  for (double tau : taus) {
    jobs.push_back({tau, config.protocol});
    if (config.compare_protocols) {
      jobs.push_back({tau, mirrored(config.protocol)});
    }
  }

  unsigned window = std::min(std::thread::hardware_concurrency(), 4u);
  if (window == 0) window = 1;
  if (config.steps > 200000) window = std::max(1u, window / 2);

  std::vector<RunDigest> digests(jobs.size());
  if (window <= 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      digests[i] = execute_job(config, jobs[i]);
    }
  } else {
    std::deque<std::pair<std::size_t, std::future<RunDigest>>> inflight;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      inflight.emplace_back(
          i, std::async(std::launch::async, [&config, job = jobs[i]] {
            return execute_job(config, job);
          }));
      if (inflight.size() == window) {
        digests[inflight.front().first] = inflight.front().second.get();
        inflight.pop_front();
      }
    }
    while (!inflight.empty()) {
      digests[inflight.front().first] = inflight.front().second.get();
      inflight.pop_front();
    }
  }

  RunResult res;
  res.config = config;
  for (OutputKind kind : config.outputs) {
    Table t = table_shell(kind, config, taus.size());
    for (RunDigest& d : digests) {
      std::vector<std::vector<Cell>>* rows = nullptr;
      switch (kind) {
        case OutputKind::timeseries: rows = &d.timeseries; break;
        case OutputKind::work: rows = &d.work; break;
        case OutputKind::spectra: rows = &d.spectra; break;
        case OutputKind::qsl: rows = &d.qsl; break;
      }
      for (auto& row : *rows) t.rows.push_back(std::move(row));
      rows->clear();
    }
    res.tables.push_back(std::move(t));
  }

  if (config.label == "fig1") check_fig1_dips(res);
  if (config.label == "fig3") check_fig3_decay(res);

  ojson meta;
  meta["version"] = kVersion;
  meta["label"] = config.label;
  meta["config"] = ojson::parse(serialize_config(config));
  meta["grid"]["steps"] = config.steps;
  meta["tolerances"]["convergence_tol"] = config.convergence_tol;
  ojson runs = ojson::array();
  for (RunDigest& d : digests) runs.push_back(std::move(d.meta_entry));
  meta["runs"] = std::move(runs);
  res.meta_json = meta.dump(2) + "\n";
  return res;
}

}  // namespace cdwork
