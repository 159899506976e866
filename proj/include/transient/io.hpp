#pragma once

// CSV output: comma separated, '#' comment header, 17 significant digits.
// Files are written to a temporary sibling and renamed into place.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <unistd.h>

#include "transient/distribution.hpp"
#include "transient/errors.hpp"

namespace transient::io {

inline constexpr std::string_view kVersion = "transient-scatter 1.0.0";

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Short form for file names, e.g. 2.731 -> "2.731".
inline std::string format_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("cannot write " + tmp.string());
    os << content;
    if (!os.flush()) throw InputError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void comment(std::string_view line) {
    header_ += "# ";
    header_ += line;
    header_ += '\n';
  }

  void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) throw InputError("csv: row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) body_ += ',';
      body_ += format_double(values[i]);
    }
    body_ += '\n';
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

  std::string str() const {
    std::string out = header_;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i) out += ',';
      out += columns_[i];
    }
    out += '\n';
    return out + body_;
  }

  void save(const std::filesystem::path& path) const { write_atomic(path, str()); }

 private:
  std::vector<std::string> columns_;
  std::string header_;
  std::string body_;
  std::size_t rows_ = 0;
};

/// Minimal reader for files produced by CsvWriter: skips comments, returns
/// the header names and numeric rows.
/// Snapshot export of a momentum distribution: columns t, p, density.
inline CsvWriter snapshot_csv(const MomentumDistribution& d) {
  CsvWriter w({"t", "p", "density"});
  w.comment(kVersion);
  for (std::size_t k = 0; k < d.size(); ++k) w.row({d.t, d.p[k], d.density[k]});
  return w;
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read " + path.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      if (i == s.size() || s[i] == ',') {
        out.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    }
    return out;
  };
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.columns.empty()) {
      t.columns = split(line);
      continue;
    }
    std::vector<double> r;
    for (const auto& cell : split(line)) r.push_back(std::stod(cell));
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace transient::io
