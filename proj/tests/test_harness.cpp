#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdwork/lz_model.hpp"
#include "cdwork/report.hpp"
#include "cdwork/scenario.hpp"

using namespace cdwork;
namespace fs = std::filesystem;

namespace {

const Table* table_named(const RunResult& res, const std::string& name) {
  for (const Table& t : res.tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

int col(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.label = "digest";
  cfg.tau.kind = TauSpec::Kind::list;
  cfg.tau.list = {0.1, 0.2};
  cfg.steps = 400;
  cfg.certify = false;
  cfg.outputs = {OutputKind::timeseries, OutputKind::qsl, OutputKind::work,
                 OutputKind::spectra};
  return cfg;
}

}  // namespace

TEST_CASE("config text round-trips through its canonical form") {
  const std::string text = R"({
    "label": "sweep-demo",
    "protocol": "linear",
    "cd": "tau_d_fixed",
    "tau": {"start": 0.02, "stop": 2.0, "count": 20, "spacing": "log"},
    "tau_d": "tau",
    "steps": 1200,
    "certify": false,
    "outputs": ["qsl", "timeseries"]
  })";
  ScenarioConfig cfg = parse_config(text);
  CHECK(cfg.label == "sweep-demo");
  CHECK(cfg.protocol == ProtocolKind::linear);
  CHECK(cfg.cd == CdMode::tau_d_fixed);
  CHECK(cfg.tau.kind == TauSpec::Kind::sweep);
  CHECK(cfg.tau.count == 20);
  CHECK(cfg.tau.spacing == SweepSpacing::log);
  CHECK(cfg.tau_d_follows_tau);
  CHECK_FALSE(cfg.certify);
  REQUIRE(cfg.outputs.size() == 2);
  CHECK(cfg.outputs[0] == OutputKind::timeseries);  // canonical kind order
  CHECK(cfg.outputs[1] == OutputKind::qsl);

  const std::string canon = serialize_config(cfg);
  CHECK(serialize_config(parse_config(canon)) == canon);
  CHECK(canon.back() == '\n');

  // Defaults survive the same loop.
  const std::string plain = serialize_config(ScenarioConfig{});
  CHECK(serialize_config(parse_config(plain)) == plain);
}

TEST_CASE("configs that lie about their shape are refused") {
  auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  };
  bad("not json");
  bad("[1, 2]");
  bad(R"({"voltage": 3})");
  bad(R"({"label": ""})");
  bad(R"({"label": "has spaces"})");
  bad(R"({"model": "ising"})");
  bad(R"({"J": 0})");
  bad(R"({"J": "five"})");
  bad(R"({"tau": 0})");
  bad(R"({"tau": []})");
  bad(R"({"tau": [0.1, -0.2]})");
  bad(R"({"tau": {"start": 0.1, "stop": 1.0}})");
  bad(R"({"tau": {"start": 0.1, "stop": 1.0, "count": 0}})");
  bad(R"({"tau": {"start": 0.1, "stop": 1.0, "count": 2.5}})");
  bad(R"({"tau": {"start": 0.1, "stop": 0.1, "count": 5}})");
  bad(R"({"tau": {"start": -1.0, "stop": 1.0, "count": 5, "spacing": "log"}})");
  bad(R"({"tau": {"start": 0.1, "stop": 1.0, "count": 5, "spacing": "cubic"}})");
  bad(R"({"tau": {"start": 0.1, "stop": 1.0, "count": 5, "step": 0.1}})");
  bad(R"({"protocol": "cubic"})");
  bad(R"({"cd": "adiabatic"})");
  bad(R"({"tau_d": 0})");
  bad(R"({"tau_d": "taus"})");
  bad(R"({"steps": 50})");
  bad(R"({"steps": 100.5})");
  bad(R"({"certify": "yes"})");
  bad(R"({"convergence_tol": 0})");
  bad(R"({"outputs": "qsl"})");
  bad(R"({"outputs": ["qsl", "plots"]})");

  // A swept duration with a frozen transitionless clock needs the clock
  // spelled out; a scalar duration does not.
  bad(R"({"cd": "tau_d_fixed", "tau": [0.1, 0.2]})");
  CHECK_NOTHROW(parse_config(R"({"cd": "tau_d_fixed", "tau": 0.1})"));
  CHECK_NOTHROW(
      parse_config(R"({"cd": "tau_d_fixed", "tau": [0.1, 0.2], "tau_d": 0.1})"));
}

TEST_CASE("duration lists resolve ascending and distinct") {
  TauSpec scalar;
  CHECK(resolve_tau_values(scalar) == std::vector<double>{0.1});

  TauSpec list;
  list.kind = TauSpec::Kind::list;
  list.list = {0.5, 0.1, 0.3};
  CHECK(resolve_tau_values(list) == std::vector<double>({0.1, 0.3, 0.5}));
  list.list = {0.1, 0.1};
  CHECK_THROWS_AS(resolve_tau_values(list), ConfigError);

  TauSpec lin;
  lin.kind = TauSpec::Kind::sweep;
  lin.start = 1.0;
  lin.stop = 2.0;
  lin.count = 3;
  CHECK(resolve_tau_values(lin) == std::vector<double>({1.0, 1.5, 2.0}));
  lin.count = 1;
  CHECK(resolve_tau_values(lin) == std::vector<double>{1.0});

  TauSpec logs;
  logs.kind = TauSpec::Kind::sweep;
  logs.start = 0.01;
  logs.stop = 1.0;
  logs.count = 3;
  logs.spacing = SweepSpacing::log;
  const std::vector<double> got = resolve_tau_values(logs);
  REQUIRE(got.size() == 3);
  CHECK(std::abs(got[0] - 0.01) < 1e-15);
  CHECK(std::abs(got[1] - 0.1) < 1e-15);
  CHECK(std::abs(got[2] - 1.0) < 1e-15);
}

TEST_CASE("overrides patch the document before parsing") {
  const std::string base = serialize_config(ScenarioConfig{});
  ScenarioConfig cfg = parse_config(apply_overrides(
      base, {"steps=1200", "protocol=linear", "cd=off", "label=patched"}));
  CHECK(cfg.steps == 1200);
  CHECK(cfg.protocol == ProtocolKind::linear);
  CHECK(cfg.cd == CdMode::off);
  CHECK(cfg.label == "patched");

  // Dotted paths reach into the tau sweep; bare words fall back to strings.
  std::string swept = apply_overrides(
      base, {"tau={\"start\":0.1,\"stop\":1.0,\"count\":4}", "tau.count=8",
             "tau_d=tau", "cd=tau_d_fixed"});
  ScenarioConfig scfg = parse_config(swept);
  CHECK(scfg.tau.kind == TauSpec::Kind::sweep);
  CHECK(scfg.tau.count == 8);
  CHECK(scfg.tau_d_follows_tau);

  CHECK_THROWS_AS(apply_overrides(base, {"steps"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"=5"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"steps..x=5"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(base, {"label.inner=5"}), ConfigError);
}

TEST_CASE("presets carry the published grids") {
  CHECK(preset_names() ==
        std::vector<std::string>({"fig1", "fig2", "fig3", "fig4", "fig5",
                                  "fig6"}));
  CHECK_THROWS_AS(preset("fig7"), ConfigError);

  ScenarioConfig f1 = preset("fig1");
  CHECK(f1.tau.list == std::vector<double>({0.05, 0.1, 0.5}));
  CHECK(f1.steps == 40000);
  CHECK(f1.outputs == std::vector<OutputKind>{OutputKind::timeseries});

  ScenarioConfig f2 = preset("fig2");
  CHECK(f2.protocol == ProtocolKind::linear);
  CHECK(f2.tau.kind == TauSpec::Kind::sweep);
  CHECK(f2.tau.count == 20);
  CHECK(f2.tau.spacing == SweepSpacing::log);
  CHECK(f2.steps == 960000);

  ScenarioConfig f3 = preset("fig3");
  CHECK(f3.cd == CdMode::tau_d_fixed);
  CHECK(f3.tau_d_follows_tau);
  CHECK(f3.compare_protocols);
  CHECK(f3.steps == 480000);

  CHECK(preset("fig4").steps == 16000);
  CHECK(preset("fig5").tau.kind == TauSpec::Kind::list);

  ScenarioConfig f6 = preset("fig6");
  CHECK(f6.cd == CdMode::tau_d_fixed);
  CHECK_FALSE(f6.tau_d_follows_tau);
  CHECK(f6.tau_d == 0.1);

  // Every preset parses back from its own canonical text.
  for (const std::string& name : preset_names()) {
    const std::string canon = serialize_config(preset(name));
    CHECK(serialize_config(parse_config(canon)) == canon);
  }
}

TEST_CASE("a small scenario digests into the documented tables") {
  RunResult res = run_scenario(small_config());
  REQUIRE(res.tables.size() == 4);
  CHECK(res.tables[0].name == "timeseries");
  CHECK(res.tables[1].name == "qsl");
  CHECK(res.tables[2].name == "work");
  CHECK(res.tables[3].name == "spectra");

  const Table& ts = *table_named(res, "timeseries");
  CHECK(ts.columns ==
        std::vector<std::string>({"s", "tau", "p_minus_h0", "p_minus_total"}));
  REQUIRE(ts.rows.size() == 2 * 401);
  CHECK(ts.rows[0][col(ts, "s")].number == 0.0);
  CHECK(std::abs(ts.rows[0][col(ts, "p_minus_h0")].number - 1.0) < 1e-12);
  for (const auto& row : ts.rows) {
    CHECK(row[col(ts, "p_minus_h0")].number >= -1e-12);
    CHECK(row[col(ts, "p_minus_h0")].number <= 1.0 + 1e-12);
  }
  // Rows group by ascending duration.
  CHECK(ts.rows[0][col(ts, "tau")].number == 0.1);
  CHECK(ts.rows[401][col(ts, "tau")].number == 0.2);

  const Table& wk = *table_named(res, "work");
  const int wc = col(wk, "work"), mc = col(wk, "mean_energy");
  const int ac = col(wk, "work_adiabatic"), xc = col(wk, "work_excess");
  const double e_start = wk.rows[0][mc].number;
  for (std::size_t i = 0; i < 401; ++i) {
    const auto& row = wk.rows[i];
    CHECK(std::abs(row[wc].number - (row[mc].number - e_start)) < 1e-12);
    CHECK(std::abs(row[xc].number - (row[wc].number - row[ac].number)) <
          1e-12);
  }

  const Table& sp = *table_named(res, "spectra");
  LZParams lz;
  for (std::size_t i : {0ul, 100ul, 250ul, 400ul}) {
    const auto& row = sp.rows[i];
    const double s = row[col(sp, "s")].number;
    const LzSpectrumH0 h0 = lz_spectrum_h0(lz, s);
    const LzSpectrumTotal tot = lz_spectrum_total(lz, s, 0.1);
    CHECK(std::abs(row[col(sp, "E_minus_h0")].number - h0.e_minus) < 1e-10);
    CHECK(std::abs(row[col(sp, "E_plus_h0")].number - h0.e_plus) < 1e-10);
    CHECK(std::abs(row[col(sp, "E_minus_total")].number - tot.e_minus) <
          1e-10);
    CHECK(std::abs(row[col(sp, "E_plus_total")].number - tot.e_plus) < 1e-10);
    CHECK(std::abs(row[col(sp, "cd_amplitude")].number -
                   lz_cd_amplitude(lz, s, 0.1)) < 1e-12);
  }

  const Table& q = *table_named(res, "qsl");
  REQUIRE(q.rows.size() == 2);
  CHECK(q.rows[0][col(q, "tau")].number == 0.1);
  CHECK(q.rows[1][col(q, "tau")].number == 0.2);
  // A run driven in the standard convention is booked against the frozen
  // clock matching its own duration, so the excess-work bound is populated.
  CHECK(q.rows[0][col(q, "tau_d")].number == 0.1);
  CHECK(q.rows[0][col(q, "tau_wex")].kind == Cell::Kind::number);
  for (const auto& row : q.rows) {
    CHECK(row[col(q, "bd_chain_slack")].number >= -1e-9);
    CHECK(row[col(q, "cs_chain_slack")].number >= -1e-9);
  }

  nlohmann::json meta = nlohmann::json::parse(res.meta_json);
  CHECK(meta.at("label") == "digest");
  CHECK(meta.at("grid").at("steps") == 400);
  REQUIRE(meta.at("runs").size() == 2);
  CHECK(meta.at("runs")[0].at("certified") == false);
  CHECK(meta.at("runs")[0].at("halving_difference").is_null());
  CHECK(meta.at("config").at("label") == "digest");
}

TEST_CASE("the digest is deterministic") {
  RunResult a = run_scenario(small_config());
  RunResult b = run_scenario(small_config());
  REQUIRE(a.tables.size() == b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    CHECK(render_csv(a.tables[i]) == render_csv(b.tables[i]));
  }
  CHECK(a.meta_json == b.meta_json);
}

TEST_CASE("protocol comparison interleaves a mirrored ramp") {
  ScenarioConfig cfg = small_config();
  cfg.tau.kind = TauSpec::Kind::scalar;
  cfg.tau.scalar = 0.1;
  cfg.compare_protocols = true;
  cfg.outputs = {OutputKind::qsl, OutputKind::work};
  RunResult res = run_scenario(cfg);

  const Table& q = *table_named(res, "qsl");
  REQUIRE(q.rows.size() == 2);
  CHECK(q.rows[0][col(q, "protocol")].text == "smoothstep");
  CHECK(q.rows[1][col(q, "protocol")].text == "linear");

  const Table& wk = *table_named(res, "work");
  const int pc = col(wk, "protocol");
  REQUIRE(pc >= 0);
  CHECK(wk.rows.size() == 2 * 401);
  CHECK(wk.rows[0][pc].text == "smoothstep");
  CHECK(wk.rows[401][pc].text == "linear");
  bool grouped = false;
  for (int g : wk.group_columns) grouped = grouped || g == pc;
  CHECK(grouped);
}

TEST_CASE("an effectively sudden quench keeps the departure occupation") {
  ScenarioConfig cfg;
  cfg.label = "sudden";
  cfg.cd = CdMode::off;
  cfg.tau.kind = TauSpec::Kind::scalar;
  cfg.tau.scalar = 1e-6;
  cfg.steps = 400;
  cfg.certify = false;
  cfg.outputs = {OutputKind::timeseries};
  RunResult res = run_scenario(cfg);
  const Table& ts = *table_named(res, "timeseries");
  // Frozen state against the final ground state: overlap^2 = J^2/(B^2+J^2).
  const double expect = 25.0 / 2525.0;
  CHECK(std::abs(ts.rows.back()[col(ts, "p_minus_h0")].number - expect) <
        2e-3);
}

TEST_CASE("figure labels switch on their feature guards") {
  ScenarioConfig dips = preset("fig1");
  dips.tau.list = {0.1, 0.5};
  dips.steps = 2000;
  dips.certify = false;
  CHECK_NOTHROW(run_scenario(dips));

  ScenarioConfig decay = preset("fig3");
  decay.tau.kind = TauSpec::Kind::list;
  decay.tau.list = {0.1, 0.2};
  decay.steps = 400;
  decay.certify = false;
  CHECK_NOTHROW(run_scenario(decay));

  // Freezing the transitionless clock makes the averaged excess work
  // duration-independent, which the decay guard must flag.
  decay.tau_d_follows_tau = false;
  decay.tau_d = 0.1;
  CHECK_THROWS_AS(run_scenario(decay), NumericalError);
}

TEST_CASE("numbers render decimal, twelve digits, no negative zero") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-12.5) == "-12.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK_THROWS_AS(format_number(std::nan("")), NumericalError);
  CHECK_THROWS_AS(format_number(HUGE_VAL), NumericalError);
}

TEST_CASE("tables render as comma separated lines") {
  Table t;
  t.name = "demo";
  t.columns = {"s", "who", "value"};
  t.rows.push_back({Cell::num(0.25), Cell::str("linear"), Cell::num(-0.0)});
  t.rows.push_back({Cell::num(0.5), Cell::na(), Cell::num(1.0 / 3.0)});
  const std::string csv = render_csv(t);
  CHECK(csv ==
        "s,who,value\n"
        "0.25,linear,0\n"
        "0.5,,0.333333333333\n");
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("plots carry one polyline per series") {
  ScenarioConfig cfg = small_config();
  cfg.outputs = {OutputKind::timeseries};
  RunResult res = run_scenario(cfg);
  const std::string svg = render_svg(res.tables[0], "demo");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.rfind("</svg>") != std::string::npos);
  std::size_t series = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++series;
    pos += 9;
  }
  // Two y-columns split over two durations.
  CHECK(series == 4);
}

TEST_CASE("outputs land on disk under the scenario label") {
  const fs::path dir = fs::temp_directory_path() / "cdwork_harness_out";
  fs::remove_all(dir);

  ScenarioConfig cfg = small_config();
  cfg.outputs = {OutputKind::qsl};
  RunResult res = run_scenario(cfg);
  write_outputs(res, dir.string());
  CHECK(fs::exists(dir / "digest_qsl.csv"));
  CHECK(fs::exists(dir / "digest_qsl.svg"));
  CHECK(fs::exists(dir / "run_meta.json"));

  std::ifstream in(dir / "digest_qsl.csv", std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text == render_csv(res.tables[0]));

  // No requested outputs: nothing is created, not even the directory.
  const fs::path none = fs::temp_directory_path() / "cdwork_harness_none";
  fs::remove_all(none);
  RunResult empty = res;
  empty.config.outputs.clear();
  empty.tables.clear();
  write_outputs(empty, none.string());
  CHECK_FALSE(fs::exists(none));

  // A file where the directory should go is an I/O failure, not silence.
  const fs::path blocker = fs::temp_directory_path() / "cdwork_harness_file";
  std::ofstream(blocker.string()) << "x";
  CHECK_THROWS_AS(write_outputs(res, (blocker / "sub").string()), IoError);

  fs::remove_all(dir);
  fs::remove(blocker);
}
