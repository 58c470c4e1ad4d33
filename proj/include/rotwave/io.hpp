#pragma once

// Field snapshots (JSON header line plus three CSV blocks), CSV helpers,
// atomic file writes and summary JSON with 15 significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotwave/discretization.hpp"
#include "rotwave/error.hpp"
#include "rotwave/model.hpp"

namespace rotwave {

using json = nlohmann::json;

/// Shortest representation of v that survives rounding to 15 significant digits.
[[nodiscard]] inline double round15(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

[[nodiscard]] inline std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Recursively rounds every floating value in a JSON document.
[[nodiscard]] inline json rounded(json j) {
  if (j.is_number_float()) return round15(j.get<double>());
  if (j.is_array() || j.is_object())
    for (auto& v : j) v = rounded(v);
  return j;
}

/// Writes `content` to `path` via a temporary sibling and a rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open '" + tmp.string() + "' for writing");
    os << content;
    os.flush();
    if (!os) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

[[nodiscard]] inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

[[nodiscard]] inline json params_json(const ModelParams& p) {
  return json{{"mu", p.mu}, {"beta", p.beta}, {"alpha", p.alpha}, {"gamma", p.gamma}, {"omega", p.omega},
              {"bc", std::string(to_string(p.bc))}};
}

[[nodiscard]] inline ModelParams params_from_json(const json& j) {
  ModelParams p;
  p.mu = j.at("mu").get<double>();
  p.beta = j.at("beta").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.omega = j.at("omega").get<double>();
  p.bc = parse_bc(j.at("bc").get<std::string>());
  return p;
}

// ---------------------------------------------------------------------------
// Snapshots

struct SnapshotFile {
  double time = 0.0;
  ModelParams params;
  TriField field;
};

/// Header line `{"n_r":..,"n_theta":..,"time":..,"params":{..}}`, then for each component a `# u<i>` line
/// and n_r CSV rows of n_theta values (row = fixed radius).
[[nodiscard]] inline std::string format_snapshot(const TriField& f, double time, const ModelParams& p) {
  json header{{"n_r", f.grid.n_r}, {"n_theta", f.grid.n_theta}, {"time", time}, {"params", params_json(p)}};
  std::string out = header.dump() + "\n";
  for (int c = 0; c < 3; ++c) {
    out += "# u" + std::to_string(c + 1) + "\n";
    for (int j = 0; j < f.grid.n_r; ++j) {
      for (int m = 0; m < f.grid.n_theta; ++m) {
        if (m > 0) out += ',';
        out += format17(f.at(c, j, m));
      }
      out += '\n';
    }
  }
  return out;
}

inline void write_snapshot(const std::filesystem::path& path, const TriField& f, double time, const ModelParams& p) {
  write_atomic(path, format_snapshot(f, time, p));
}

[[nodiscard]] inline SnapshotFile parse_snapshot(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("snapshot: empty input");
  const json header = json::parse(line);
  SnapshotFile s;
  s.time = header.at("time").get<double>();
  s.params = params_from_json(header.at("params"));
  s.field = TriField(build_grid(header.at("n_r").get<int>(), header.at("n_theta").get<int>()));
  const PolarGrid& g = s.field.grid;
  for (int c = 0; c < 3; ++c) {
    if (!std::getline(is, line) || line != "# u" + std::to_string(c + 1))
      throw InvalidArgument("snapshot: missing block marker for u" + std::to_string(c + 1));
    for (int j = 0; j < g.n_r; ++j) {
      if (!std::getline(is, line)) throw InvalidArgument("snapshot: truncated block");
      std::istringstream row(line);
      std::string cell;
      int m = 0;
      while (std::getline(row, cell, ',')) {
        if (m >= g.n_theta) throw InvalidArgument("snapshot: too many values in a row");
        s.field.at(c, j, m++) = std::stod(cell);
      }
      if (m != g.n_theta) throw InvalidArgument("snapshot: too few values in a row");
    }
  }
  return s;
}

[[nodiscard]] inline SnapshotFile read_snapshot(const std::filesystem::path& path) {
  return parse_snapshot(read_file(path));
}

// ---------------------------------------------------------------------------
// CSV

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { add_row(header); }

  void add_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  [[nodiscard]] const std::string& str() const noexcept { return text_; }
  void save(const std::filesystem::path& path) const { write_atomic(path, text_); }

 private:
  std::string text_;
};

[[nodiscard]] inline std::string cell(double v) { return format17(v); }
[[nodiscard]] inline std::string cell(int v) { return std::to_string(v); }
[[nodiscard]] inline std::string cell(std::string_view v) { return std::string(v); }

}  // namespace rotwave
