#include "nsfsa/sampler/chain_record.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace nsfsa {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("chain file line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

const char* move_name(MoveType m) {
  switch (m) {
    case MoveType::none:
      return "none";
    case MoveType::add:
      return "add";
    case MoveType::remove:
      return "delete";
    case MoveType::move:
      return "move";
  }
  return "none";
}

MoveType parse_move(const std::string& name) {
  if (name == "none") return MoveType::none;
  if (name == "add") return MoveType::add;
  if (name == "delete") return MoveType::remove;
  if (name == "move") return MoveType::move;
  throw ConfigError("unknown move type '" + name + "'");
}

std::vector<std::string> sv_field_names(int dim) {
  std::vector<std::string> out{"sigma", "smooth"};
  for (int j = 1; j <= dim; ++j) out.push_back("scale" + std::to_string(j));
  for (int j = 1; j < dim; ++j) out.push_back("angle" + std::to_string(j));
  return out;
}

ChainRecord ChainRecord::with_layout(const ParentCovParams& tmpl, int p) {
  ChainRecord rec;
  rec.dim = tmpl.dim;
  for (int j = 0; j < p; ++j) rec.beta_names.push_back("beta" + std::to_string(j));
  const auto names = sv_field_names(tmpl.dim);
  const auto fields = tmpl.fields();
  for (std::size_t f = 0; f < fields.size(); ++f) rec.offset_names.push_back(names[f] + "_offset");
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (fields[f]->stationary()) continue;
    for (Eigen::Index j = 0; j < fields[f]->coeffs.size(); ++j) {
      rec.coeff_names.push_back(names[f] + "_eta" + std::to_string(j + 1));
    }
  }
  return rec;
}

double ChainRecord::mean_r() const {
  if (rows.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& row : rows) acc += row.r();
  return acc / static_cast<double>(rows.size());
}

void ChainRecord::write_csv(std::ostream& out) const {
  out << "iter,r";
  for (const auto& n : beta_names) out << ',' << n;
  for (const auto& n : offset_names) out << ',' << n;
  for (const auto& n : coeff_names) out << ',' << n;
  out << ",loglik,move,accepted,theta_accepted,knots\n";
  for (const auto& row : rows) {
    out << row.iter << ',' << row.r();
    for (Eigen::Index j = 0; j < row.beta.size(); ++j) out << ',' << fmt(row.beta(j));
    for (Eigen::Index j = 0; j < row.offsets.size(); ++j) out << ',' << fmt(row.offsets(j));
    for (Eigen::Index j = 0; j < row.coeffs.size(); ++j) out << ',' << fmt(row.coeffs(j));
    out << ',' << fmt(row.loglik) << ',' << move_name(row.move) << ',' << (row.accepted ? 1 : 0) << ','
        << (row.theta_accepted ? 1 : 0) << ',';
    for (int k = 0; k < row.r(); ++k) {
      if (k > 0) out << ';';
      const Location& s = row.knots.knots[k];
      for (Eigen::Index c = 0; c < s.size(); ++c) {
        if (c > 0) out << ' ';
        out << fmt(s(c));
      }
    }
    out << '\n';
  }
}

ChainRecord ChainRecord::read_csv(std::istream& in, int dim) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("spatial dimension must be 1, 2 or 3");
  ChainRecord rec;
  rec.dim = dim;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("chain file is empty");
  const auto header = split(line, ',');
  const std::size_t ncol = header.size();
  if (ncol < 7 || header[0] != "iter" || header[1] != "r" || header[ncol - 1] != "knots") {
    throw ConfigError("chain file has an unrecognized header");
  }
  std::size_t c = 2;
  for (; c < ncol && header[c].rfind("beta", 0) == 0; ++c) rec.beta_names.push_back(header[c]);
  for (; c < ncol && header[c].ends_with("_offset"); ++c) rec.offset_names.push_back(header[c]);
  for (; c < ncol && header[c].find("_eta") != std::string::npos; ++c) rec.coeff_names.push_back(header[c]);
  if (c + 5 != ncol || header[c] != "loglik") throw ConfigError("chain file has an unrecognized header");

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (cells.size() != ncol) {
      throw ConfigError("chain file line " + std::to_string(lineno) + ": expected " +
                        std::to_string(ncol) + " fields");
    }
    ChainRow row;
    row.iter = static_cast<long>(to_double(cells[0], lineno));
    const int r = static_cast<int>(to_double(cells[1], lineno));
    std::size_t k = 2;
    auto read_vec = [&](std::size_t count) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(count));
      for (std::size_t j = 0; j < count; ++j) v(static_cast<Eigen::Index>(j)) = to_double(cells[k++], lineno);
      return v;
    };
    row.beta = read_vec(rec.beta_names.size());
    row.offsets = read_vec(rec.offset_names.size());
    row.coeffs = read_vec(rec.coeff_names.size());
    row.loglik = to_double(cells[k++], lineno);
    row.move = parse_move(cells[k++]);
    row.accepted = cells[k++] == "1";
    row.theta_accepted = cells[k++] == "1";
    const std::string& kn = cells[k];
    if (!kn.empty()) {
      for (const auto& knot : split(kn, ';')) {
        const auto coords = split(knot, ' ');
        if (static_cast<int>(coords.size()) != dim) {
          throw ConfigError("chain file line " + std::to_string(lineno) + ": knot has wrong dimension");
        }
        Location s(dim);
        for (int d = 0; d < dim; ++d) s(d) = to_double(coords[d], lineno);
        row.knots.knots.push_back(s);
      }
    }
    if (row.r() != r) throw ConfigError("chain file line " + std::to_string(lineno) + ": r does not match knots");
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

void store_params(const ParentCovParams& params, ChainRow& row) {
  const auto fields = params.fields();
  row.offsets.resize(static_cast<Eigen::Index>(fields.size()));
  Eigen::Index nc = 0;
  for (const auto* f : fields) {
    if (!f->stationary()) nc += f->coeffs.size();
  }
  row.coeffs.resize(nc);
  Eigen::Index k = 0;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    row.offsets(static_cast<Eigen::Index>(f)) = fields[f]->offset;
    if (fields[f]->stationary()) continue;
    row.coeffs.segment(k, fields[f]->coeffs.size()) = fields[f]->coeffs;
    k += fields[f]->coeffs.size();
  }
}

ParentCovParams params_from_row(const ParentCovParams& tmpl, const ChainRow& row) {
  ParentCovParams out = tmpl;
  auto fields = out.fields();
  if (row.offsets.size() != static_cast<Eigen::Index>(fields.size())) {
    throw ConfigError("chain row does not match the parameter layout (offsets)");
  }
  Eigen::Index k = 0;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    fields[f]->offset = row.offsets(static_cast<Eigen::Index>(f));
    if (fields[f]->stationary()) continue;
    const Eigen::Index m = fields[f]->coeffs.size();
    if (k + m > row.coeffs.size()) throw ConfigError("chain row does not match the parameter layout (coefficients)");
    fields[f]->coeffs = row.coeffs.segment(k, m);
    k += m;
  }
  if (k != row.coeffs.size()) throw ConfigError("chain row does not match the parameter layout (coefficients)");
  return out;
}

}  // namespace nsfsa
