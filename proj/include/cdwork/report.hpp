#pragma once

#include <string>

#include "cdwork/scenario.hpp"

namespace cdwork {

// Decimal notation, 12 significant digits, negative zero folded into zero.
// Non-finite values are a caller bug and throw.
std::string format_number(double v);

// Header row plus data rows, comma separated, LF endings.
std::string render_csv(const Table& table);

// Plain multi-series line plot: axes, ticks, legend, nothing else.  Series
// are the table's y-columns split by its group columns.
std::string render_svg(const Table& table, const std::string& title);

// <label>_<kind>.csv and .svg per table, plus run_meta.json.  Writes nothing
// when the scenario requested no outputs.
void write_outputs(const RunResult& result, const std::string& out_dir);

}  // namespace cdwork
