#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace ctbg {

// 17 significant digits; round-trips every double and keeps output
// byte-reproducible across runs.
std::string format_float(double v);

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

// Minimal JSON emitters preserving insertion order.
class JsonObject {
 public:
  JsonObject& field(const std::string& key, double v);
  JsonObject& field(const std::string& key, long v);
  JsonObject& field(const std::string& key, int v) { return field(key, long(v)); }
  JsonObject& field(const std::string& key, const std::string& v);
  JsonObject& field_bool(const std::string& key, bool v);
  JsonObject& field_raw(const std::string& key, const std::string& json);
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

std::string json_array(const std::vector<std::string>& elements);
std::string json_quote(const std::string& s);

// Square-cell heatmap with the 9-stop dark-violet-to-yellow ramp described
// in the README; row index runs upward.
std::string svg_heatmap(const Eigen::MatrixXd& field, const std::string& title);

// Polyline chart of columns ys[c] against x; one path per column.
std::string svg_lines(const std::vector<double>& x,
                      const std::vector<std::vector<double>>& ys,
                      const std::string& title);

void write_text_file(const std::string& path, const std::string& content);

std::string error_json(const std::string& command, const std::string& message);

}  // namespace ctbg
