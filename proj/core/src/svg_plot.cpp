#include "thinfilm/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "thinfilm/errors.hpp"
#include "thinfilm/scenario.hpp"

namespace thinfilm {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Classic 1-2-5 tick placement.
std::vector<double> nice_ticks(double lo, double hi, int target) {
  std::vector<double> ticks;
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const double first = std::ceil(lo / step) * step;
  for (double v = first; v <= hi + 0.5 * step; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return ticks;
}

constexpr const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read CSV file '" + path + "'");
  CsvTable table;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line);
      std::string hash_mark, word, value;
      ls >> hash_mark >> word >> value;
      if (word == "manifest") table.manifest = value;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!have_header) {
      table.columns = fields;
      table.data.resize(fields.size());
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": ragged CSV row");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(fields[i].c_str(), &end);
      table.data[i].push_back(end == fields[i].c_str() ? std::nan("") : v);
    }
  }
  if (!have_header) throw ConfigError(path + ": no CSV header found");
  return table;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return data[i];
  }
  throw ConfigError("unknown column '" + name + "'");
}

PlotSpec PlotSpec::from_file(const std::string& path) {
  const KeyValueFile kv = KeyValueFile::parse_file(path);
  PlotSpec spec;
  std::string cols = kv.get_string("plot.columns");
  for (auto& c : cols) {
    if (c == ',') c = ' ';
  }
  std::istringstream cs(cols);
  std::string col;
  while (cs >> col) spec.columns.push_back(col);
  if (spec.columns.empty()) throw ConfigError(path + ": plot.columns is empty");
  spec.x_column = kv.get_string("plot.x", "t");
  spec.log_y = kv.get_bool("plot.logy", false);
  spec.title = kv.get_string("plot.title", "");
  spec.output = kv.get_string("plot.output", "");
  return spec;
}

std::string render_line_chart(const CsvTable& table, const PlotSpec& spec,
                              const std::string& manifest_hash) {
  const auto& xs = table.column(spec.x_column);
  std::vector<const std::vector<double>*> series;
  series.reserve(spec.columns.size());
  for (const auto& name : spec.columns) series.push_back(&table.column(name));

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i], y = (*series[s])[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (spec.log_y && y <= 0.0) continue;
      const double yv = spec.log_y ? std::log10(y) : y;
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = yv;
        any = true;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, yv);
        ymax = std::max(ymax, yv);
      }
    }
  }
  if (!any) {
    // nothing plottable (e.g. all-zero series on a log axis)
    xmin = 0, xmax = 1;
    ymin = spec.log_y ? -16 : 0;
    ymax = spec.log_y ? 0 : 1;
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax == ymin) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  if (spec.log_y) {
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax == ymin) ymax += 1.0;
  }

  constexpr double W = 880, H = 520, ml = 72, mr = 16, mt = 40, mb = 48;
  const double pw = W - ml - mr, ph = H - mt - mb;
  const auto sx = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
  const auto sy = [&](double yv) { return mt + ph * (1.0 - (yv - ymin) / (ymax - ymin)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  svg << "<!-- manifest " << (manifest_hash.empty() ? "none" : manifest_hash) << " -->\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
      << "\" fill=\"#ffffff\"/>\n";
  if (!spec.title.empty()) {
    svg << "<text class=\"title\" x=\"" << fmt2(W / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << xml_escape(spec.title) << "</text>\n";
  }

  // axes
  svg << "<line x1=\"" << fmt2(ml) << "\" y1=\"" << fmt2(mt + ph) << "\" x2=\"" << fmt2(ml + pw)
      << "\" y2=\"" << fmt2(mt + ph) << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << fmt2(ml) << "\" y1=\"" << fmt2(mt) << "\" x2=\"" << fmt2(ml)
      << "\" y2=\"" << fmt2(mt + ph) << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

  for (double tx : nice_ticks(xmin, xmax, 6)) {
    const double px = sx(tx);
    svg << "<line x1=\"" << fmt2(px) << "\" y1=\"" << fmt2(mt + ph) << "\" x2=\"" << fmt2(px)
        << "\" y2=\"" << fmt2(mt + ph + 5) << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg << "<text class=\"xtick\" x=\"" << fmt2(px) << "\" y=\"" << fmt2(mt + ph + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << fmt_label(tx) << "</text>\n";
  }
  if (spec.log_y) {
    for (int k = static_cast<int>(std::ceil(ymin)); k <= static_cast<int>(std::floor(ymax)); ++k) {
      const double py = sy(k);
      svg << "<line x1=\"" << fmt2(ml - 5) << "\" y1=\"" << fmt2(py) << "\" x2=\"" << fmt2(ml)
          << "\" y2=\"" << fmt2(py) << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
      svg << "<text class=\"ytick\" x=\"" << fmt2(ml - 8) << "\" y=\"" << fmt2(py + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e" << k
          << "</text>\n";
    }
  } else {
    for (double ty : nice_ticks(ymin, ymax, 6)) {
      const double py = sy(ty);
      svg << "<line x1=\"" << fmt2(ml - 5) << "\" y1=\"" << fmt2(py) << "\" x2=\"" << fmt2(ml)
          << "\" y2=\"" << fmt2(py) << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
      svg << "<text class=\"ytick\" x=\"" << fmt2(ml - 8) << "\" y=\"" << fmt2(py + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
          << fmt_label(ty) << "</text>\n";
    }
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << kPalette[s % 6]
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i], y = (*series[s])[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (spec.log_y && y <= 0.0) continue;
      const double yv = spec.log_y ? std::log10(y) : y;
      if (!first) svg << ' ';
      svg << fmt2(sx(x)) << ',' << fmt2(sy(yv));
      first = false;
    }
    svg << "\"/>\n";
    svg << "<text class=\"legend\" x=\"" << fmt2(ml + pw - 8) << "\" y=\""
        << fmt2(mt + 16 + 16 * static_cast<double>(s)) << "\" text-anchor=\"end\" "
           "font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << kPalette[s % 6] << "\">" << xml_escape(spec.columns[s]) << "</text>\n";
  }

  svg << "<text class=\"xlabel\" x=\"" << fmt2(ml + pw / 2) << "\" y=\"" << fmt2(H - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(spec.x_column) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_plot(const std::string& csv_path, const PlotSpec& spec) {
  const CsvTable table = CsvTable::read_file(csv_path);
  const std::string out_path = spec.output.empty() ? csv_path + ".svg" : spec.output;
  const std::string manifest =
      table.manifest.empty() ? to_hex64(fnv1a64(csv_path)) : table.manifest;
  const std::string content = render_line_chart(table, spec, manifest);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write SVG file '" + out_path + "'");
  out << content;
}

}  // namespace thinfilm
