#include "nsfsa/io/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace nsfsa {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(first, end, v);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(v);
}

}  // namespace

Dataset parse_csv(const std::string& text, int dims, bool has_header, bool value_column, const std::string& source) {
  if (dims < 1 || dims > kMaxDim) throw ConfigError("dims must be 1, 2 or 3 (got " + std::to_string(dims) + ")");
  Dataset ds;
  ds.dims = dims;
  const int lead = dims + (value_column ? 1 : 0);
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  int ncol = -1;
  std::vector<std::vector<double>> extra_rows;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split_row(t);
    if (ncol < 0 && has_header) {
      ncol = static_cast<int>(cells.size());
      if (ncol < lead) {
        throw ConfigError(source + " line " + std::to_string(lineno) + ": header has " + std::to_string(ncol) +
                          " columns, need at least " + std::to_string(lead));
      }
      for (int c = lead; c < ncol; ++c) ds.extra_names.push_back(cells[c]);
      continue;
    }
    if (ncol < 0) {
      ncol = static_cast<int>(cells.size());
      if (ncol < lead) {
        throw ConfigError(source + " line " + std::to_string(lineno) + ": expected at least " + std::to_string(lead) +
                          " columns");
      }
      for (int c = lead; c < ncol; ++c) ds.extra_names.push_back("x" + std::to_string(c - lead + 1));
    }
    if (static_cast<int>(cells.size()) != ncol) {
      throw ConfigError(source + " line " + std::to_string(lineno) + ": expected " + std::to_string(ncol) +
                        " columns, found " + std::to_string(cells.size()));
    }
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], vals[c])) {
        throw ConfigError(source + " line " + std::to_string(lineno) + ": column " + std::to_string(c + 1) +
                          " is not a finite number ('" + cells[c] + "')");
      }
    }
    Location s(dims);
    for (int d = 0; d < dims; ++d) s(d) = vals[d];
    ds.locs.push_back(s);
    if (value_column) extra_rows.push_back({vals[dims]});
    std::vector<double> ex(vals.begin() + lead, vals.end());
    if (value_column) {
      extra_rows.back().insert(extra_rows.back().end(), ex.begin(), ex.end());
    } else {
      extra_rows.push_back(ex);
    }
  }
  if (ds.locs.empty()) throw ConfigError(source + ": no observations");

  const Eigen::Index n = static_cast<Eigen::Index>(ds.locs.size());
  const Eigen::Index ne = static_cast<Eigen::Index>(ds.extra_names.size());
  ds.z = Eigen::VectorXd::Zero(value_column ? n : 0);
  ds.extra.resize(n, ne);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = extra_rows[static_cast<std::size_t>(i)];
    std::size_t k = 0;
    if (value_column) ds.z(i) = row[k++];
    for (Eigen::Index c = 0; c < ne; ++c) ds.extra(i, c) = row[k++];
  }

  std::map<std::vector<double>, int> seen;
  for (const auto& s : ds.locs) {
    std::vector<double> key(s.data(), s.data() + s.size());
    if (seen[key]++ > 0) ++ds.duplicate_locations;
  }
  return ds;
}

Dataset ingest_csv(const std::string& path, int dims, bool has_header, bool value_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), dims, has_header, value_column, path);
}

Trend parse_trend(const std::string& name) {
  if (name == "intercept") return Trend::intercept;
  if (name == "coords") return Trend::coords;
  throw ConfigError("trend must be 'intercept' or 'coords' (got '" + name + "')");
}

Location coordinate_center(const LocationList& locs) {
  if (locs.empty()) throw ConfigError("no locations");
  Location c = Location::Zero(locs.front().size());
  for (const auto& s : locs) c += s;
  return c / static_cast<double>(locs.size());
}

Eigen::MatrixXd design_matrix(const LocationList& locs, const Eigen::MatrixXd& extra, Trend trend,
                              const Location& center) {
  const Eigen::Index n = static_cast<Eigen::Index>(locs.size());
  const Eigen::Index d = n > 0 ? locs.front().size() : 0;
  const Eigen::Index nt = trend == Trend::coords ? d : 0;
  if (extra.rows() != n) throw ConfigError("covariate rows do not match locations");
  Eigen::MatrixXd x(n, 1 + nt + extra.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index c = 0; c < nt; ++c) x(i, 1 + c) = locs[static_cast<std::size_t>(i)](c) - center(c);
  }
  if (extra.cols() > 0) x.rightCols(extra.cols()) = extra;
  return x;
}

}  // namespace nsfsa
