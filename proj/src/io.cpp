#include "ctbg/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ctbg {

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("csv_table: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_float(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

JsonObject& JsonObject::field(const std::string& key, double v) {
  items_.emplace_back(key, format_float(v));
  return *this;
}

JsonObject& JsonObject::field(const std::string& key, long v) {
  items_.emplace_back(key, std::to_string(v));
  return *this;
}

JsonObject& JsonObject::field(const std::string& key, const std::string& v) {
  items_.emplace_back(key, json_quote(v));
  return *this;
}

JsonObject& JsonObject::field_bool(const std::string& key, bool v) {
  items_.emplace_back(key, v ? "true" : "false");
  return *this;
}

JsonObject& JsonObject::field_raw(const std::string& key,
                                  const std::string& json) {
  items_.emplace_back(key, json);
  return *this;
}

std::string JsonObject::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) out += ',';
    out += json_quote(items_[i].first);
    out += ':';
    out += items_[i].second;
  }
  out += "}";
  return out;
}

std::string json_array(const std::vector<std::string>& elements) {
  std::string out = "[";
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i) out += ',';
    out += elements[i];
  }
  out += "]";
  return out;
}

namespace {

// Nine anchors from dark violet to yellow, interpolated linearly in RGB.
constexpr int ramp[9][3] = {{68, 1, 84},    {71, 45, 123},  {59, 82, 139},
                            {44, 114, 142}, {33, 145, 140}, {40, 174, 128},
                            {94, 201, 98},  {173, 220, 48}, {253, 231, 37}};

std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0) * 8.0;
  const int lo = std::min(7, int(t));
  const double f = t - lo;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                int(std::lround(ramp[lo][0] + f * (ramp[lo + 1][0] - ramp[lo][0]))),
                int(std::lround(ramp[lo][1] + f * (ramp[lo + 1][1] - ramp[lo][1]))),
                int(std::lround(ramp[lo][2] + f * (ramp[lo + 1][2] - ramp[lo][2]))));
  return std::string(buf);
}

}  // namespace

std::string svg_heatmap(const Eigen::MatrixXd& field,
                        const std::string& title) {
  const int rows = int(field.rows());
  const int cols = int(field.cols());
  const int cell = 10, margin = 24;
  const int w = cols * cell + 2 * margin;
  const int h = rows * cell + 2 * margin;
  double lo = std::numeric_limits<double>::max();
  double hi = -std::numeric_limits<double>::max();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      lo = std::min(lo, field(i, j));
      hi = std::max(hi, field(i, j));
    }
  const double span = (hi > lo) ? (hi - lo) : 1.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  svg << "<title>" << title << "</title>\n";
  svg << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\"/>\n";
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double t = (field(i, j) - lo) / span;
      // row index i runs upward in the figure
      const int x = margin + i * cell;
      const int y = margin + (cols - 1 - j) * cell;
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"" << ramp_color(t)
          << "\"/>\n";
    }
  svg << "<text x=\"" << margin << "\" y=\"" << (margin - 8)
      << "\" font-size=\"12\" font-family=\"monospace\">" << title
      << " [" << format_float(lo) << ", " << format_float(hi)
      << "]</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string svg_lines(const std::vector<double>& x,
                      const std::vector<std::vector<double>>& ys,
                      const std::string& title) {
  const int w = 640, h = 420, margin = 40;
  double xlo = std::numeric_limits<double>::max(), xhi = -xlo;
  for (double v : x) {
    xlo = std::min(xlo, v);
    xhi = std::max(xhi, v);
  }
  double ylo = std::numeric_limits<double>::max(), yhi = -ylo;
  for (const auto& col : ys)
    for (double v : col) {
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  const double xs = (xhi > xlo) ? (xhi - xlo) : 1.0;
  const double yspan = (yhi > ylo) ? (yhi - ylo) : 1.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\">\n";
  svg << "<title>" << title << "</title>\n";
  svg << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\"/>\n";
  const char* palette[6] = {"#440154", "#2c728e", "#28ae80",
                            "#addc30", "#b04a4a", "#555555"};
  for (std::size_t c = 0; c < ys.size(); ++c) {
    svg << "<polyline fill=\"none\" stroke=\"" << palette[c % 6]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < ys[c].size(); ++i) {
      const double px = margin + (x[i] - xlo) / xs * (w - 2 * margin);
      const double py = h - margin - (ys[c][i] - ylo) / yspan * (h - 2 * margin);
      svg << format_float(px) << ',' << format_float(py) << ' ';
    }
    svg << "\"/>\n";
  }
  svg << "<text x=\"" << margin << "\" y=\"" << (margin - 12)
      << "\" font-size=\"12\" font-family=\"monospace\">" << title
      << " [" << format_float(ylo) << ", " << format_float(yhi)
      << "]</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string error_json(const std::string& command,
                       const std::string& message) {
  JsonObject obj;
  obj.field("command", command).field("error", message);
  return obj.str() + "\n";
}

}  // namespace ctbg
