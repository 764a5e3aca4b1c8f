#include "cdwork/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <utility>
#include <vector>

namespace cdwork {

namespace {

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) {
    throw NumericalError("refusing to format a non-finite value");
  }
  if (v == 0.0) v = 0.0;  // folds -0 into 0
  return fmt("%.12g", v);
}

std::string render_csv(const Table& table) {
  std::string out;
  out.reserve(32 + table.rows.size() * table.columns.size() * 16);
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      switch (row[i].kind) {
        case Cell::Kind::number:
          out += format_number(row[i].number);
          break;
        case Cell::Kind::text:
          out += row[i].text;
          break;
        case Cell::Kind::empty:
          break;
      }
    }
    out += '\n';
  }
  return out;
}

namespace {

constexpr const char* kPalette[] = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#17becf", "#e377c2", "#bcbd22", "#7f7f7f"};
constexpr int kPaletteSize = 10;

// Plots stay readable and small with a couple thousand vertices; the CSV
// keeps the full grid.
constexpr std::size_t kMaxPointsPerSeries = 2000;

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> pts;
};

std::string group_label(const Table& t, const std::vector<Cell>& row) {
  std::string label;
  for (int gc : t.group_columns) {
    const Cell& c = row[gc];
    std::string part;
    if (c.kind == Cell::Kind::number) {
      part = t.columns[gc] + "=" + fmt("%.6g", c.number);
    } else if (c.kind == Cell::Kind::text) {
      part = c.text;
    } else {
      continue;
    }
    if (!label.empty()) label += ' ';
    label += part;
  }
  return label;
}

}  // namespace

std::string render_svg(const Table& table, const std::string& title) {
  const double ml = 70.0, mt = 46.0, pw = 640.0, ph = 420.0;
  const double width = ml + pw + 190.0, height = mt + ph + 54.0;
  const std::size_t ny = table.y_columns.size();

  std::vector<std::string> groups;
  std::vector<Series> series;
  for (const auto& row : table.rows) {
    const std::string key = group_label(table, row);
    auto git = std::find(groups.begin(), groups.end(), key);
    if (git == groups.end()) {
      groups.push_back(key);
      git = groups.end() - 1;
      for (std::size_t yi = 0; yi < ny; ++yi) series.push_back({});
    }
    const std::size_t gi = static_cast<std::size_t>(git - groups.begin());
    const Cell& xc = row[table.x_column];
    if (xc.kind != Cell::Kind::number) continue;
    double x = xc.number;
    if (table.log_x) {
      if (!(x > 0.0)) continue;
      x = std::log10(x);
    }
    for (std::size_t yi = 0; yi < ny; ++yi) {
      const Cell& yc = row[table.y_columns[yi]];
      if (yc.kind != Cell::Kind::number) continue;
      if (!std::isfinite(x) || !std::isfinite(yc.number)) continue;
      series[gi * ny + yi].pts.push_back({x, yc.number});
    }
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t yi = 0; yi < ny; ++yi) {
      std::string name = table.columns[table.y_columns[yi]];
      if (groups.size() > 1 && !groups[gi].empty()) {
        name += ' ';
        name += groups[gi];
      }
      series[gi * ny + yi].name = std::move(name);
    }
  }

  double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
  bool any = false;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.pts) {
      if (!any) {
        xlo = xhi = x;
        ylo = yhi = y;
        any = true;
      } else {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
      }
    }
  }
  auto widen = [](double& lo, double& hi) {
    if (hi > lo) {
      const double pad = 0.02 * (hi - lo);
      lo -= pad;
      hi += pad;
    } else {
      const double pad = std::max(0.5, std::abs(lo) * 0.1);
      lo -= pad;
      hi += pad;
    }
  };
  widen(xlo, xhi);
  widen(ylo, yhi);

  auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ylo) / (yhi - ylo) * ph; };

  std::string svg;
  svg.reserve(4096);
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt("%.0f", width) + "\" height=\"" + fmt("%.0f", height) +
         "\" viewBox=\"0 0 " + fmt("%.0f", width) + " " + fmt("%.0f", height) +
         "\">\n";
  svg += "<rect width=\"" + fmt("%.0f", width) + "\" height=\"" +
         fmt("%.0f", height) + "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt("%.0f", ml) +
         "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" + title +
         "</text>\n";

  svg += "<line x1=\"" + fmt("%.1f", ml) + "\" y1=\"" + fmt("%.1f", mt) +
         "\" x2=\"" + fmt("%.1f", ml) + "\" y2=\"" + fmt("%.1f", mt + ph) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt("%.1f", ml) + "\" y1=\"" + fmt("%.1f", mt + ph) +
         "\" x2=\"" + fmt("%.1f", ml + pw) + "\" y2=\"" + fmt("%.1f", mt + ph) +
         "\" stroke=\"black\"/>\n";
  for (int i = 0; i < 5; ++i) {
    const double fx = xlo + (xhi - xlo) * i / 4.0;
    const double fy = ylo + (yhi - ylo) * i / 4.0;
    const double tx = px(fx);
    const double ty = py(fy);
    svg += "<line x1=\"" + fmt("%.1f", tx) + "\" y1=\"" + fmt("%.1f", mt + ph) +
           "\" x2=\"" + fmt("%.1f", tx) + "\" y2=\"" +
           fmt("%.1f", mt + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", tx) + "\" y=\"" + fmt("%.1f", mt + ph + 18) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">" +
           fmt("%.4g", table.log_x ? std::pow(10.0, fx) : fx) + "</text>\n";
    svg += "<line x1=\"" + fmt("%.1f", ml - 5) + "\" y1=\"" + fmt("%.1f", ty) +
           "\" x2=\"" + fmt("%.1f", ml) + "\" y2=\"" + fmt("%.1f", ty) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", ml - 8) + "\" y=\"" + fmt("%.1f", ty + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">" +
           fmt("%.4g", fy) + "</text>\n";
  }

  svg += "<text x=\"" + fmt("%.1f", ml + pw / 2) + "\" y=\"" +
         fmt("%.1f", height - 10) +
         "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">" +
         table.columns[table.x_column] + "</text>\n";
  const std::string ylabel =
      ny == 1 ? table.columns[table.y_columns[0]] : std::string("value");
  svg += "<text transform=\"translate(16 " + fmt("%.1f", mt + ph / 2) +
         ") rotate(-90)\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">" +
         ylabel + "</text>\n";

  double legend_y = mt + 8.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    if (s.pts.empty()) continue;
    const char* color = kPalette[i % kPaletteSize];
    const std::size_t stride =
        std::max<std::size_t>(1, s.pts.size() / kMaxPointsPerSeries);
    std::string pts;
    pts.reserve(16 * (s.pts.size() / stride + 2));
    for (std::size_t k = 0; k < s.pts.size(); k += stride) {
      pts += fmt("%.2f", px(s.pts[k].first)) + "," +
             fmt("%.2f", py(s.pts[k].second)) + " ";
    }
    if ((s.pts.size() - 1) % stride != 0) {
      pts += fmt("%.2f", px(s.pts.back().first)) + "," +
             fmt("%.2f", py(s.pts.back().second)) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";

    const double lx = ml + pw + 16.0;
    svg += "<line x1=\"" + fmt("%.1f", lx) + "\" y1=\"" + fmt("%.1f", legend_y) +
           "\" x2=\"" + fmt("%.1f", lx + 22) + "\" y2=\"" +
           fmt("%.1f", legend_y) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", lx + 28) + "\" y=\"" +
           fmt("%.1f", legend_y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + s.name +
           "</text>\n";
    legend_y += 17.0;
  }

  svg += "</svg>\n";
  return svg;
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
  if (result.config.outputs.empty()) return;
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + out_dir +
                  "': " + ec.message());
  }
  const auto write_file = [](const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open '" + p.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write failed for '" + p.string() + "'");
  };
  for (const Table& t : result.tables) {
    const std::string base = result.config.label + "_" + t.name;
    write_file(fs::path(out_dir) / (base + ".csv"), render_csv(t));
    write_file(fs::path(out_dir) / (base + ".svg"),
               render_svg(t, result.config.label + " " + t.name));
  }
  write_file(fs::path(out_dir) / "run_meta.json", result.meta_json);
}

}  // namespace cdwork
