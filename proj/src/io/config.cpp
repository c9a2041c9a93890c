#include "nsfsa/io/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nsfsa {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* first = v.data();
  if (!v.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
  return out;
}

const std::string kRequired = "";

}  // namespace

const std::vector<std::pair<std::string, std::string>>& RunConfig::known_keys() {
  // Key, default. An empty default marks a required key or an optional key
  // with a data-driven fallback (see get()).
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"dims", kRequired},
      {"noise_var", kRequired},
      {"taper_length", kRequired},
      {"has_header", "true"},
      {"trend", "intercept"},
      {"transform", "none"},
      {"transform_shift", "160"},
      {"knot_mode", "random"},
      {"knots", ""},
      {"knot_grid", ""},
      {"domain_expansion", "0.02"},
      {"proposal_domain", ""},
      {"min_knot_separation", "1e-6"},
      {"sv_centers", ""},
      {"sv_scale", "1"},
      {"mu_sigma", ""},
      {"mu_gamma", ""},
      {"sigma_var", "0.25"},
      {"smooth_mean", "0"},
      {"smooth_var", "1"},
      {"scale_var", "0.25"},
      {"angle_mean", "0"},
      {"angle_var", "1"},
      {"tau2", "0.0625"},
      {"n_iter", "10000"},
      {"n_burn", "5000"},
      {"thin", "10"},
      {"seed", "1"},
      {"chains", "1"},
      {"check_every", "100"},
      {"credible_level", "0.95"},
      {"keep_every", "10"},
      {"add_noise", "false"},
      {"keep_draws", "false"},
      {"threads", "1"},
  };
  return keys;
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + " line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (cfg.values_.count(key)) {
      throw ConfigError(source + " line " + std::to_string(lineno) + ": key '" + key + "' given twice");
    }
    try {
      cfg.set(key, trim(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  bool known = false;
  for (const auto& kv : known_keys()) known = known || kv.first == key;
  if (!known) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0 && !values_.at(key).empty(); }

std::string RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  for (const auto& kv : known_keys()) {
    if (kv.first == key) return kv.second;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

double RunConfig::get_double(const std::string& key) const {
  const std::string v = get(key);
  if (v.empty()) throw ConfigError("config key '" + key + "' is required");
  return to_double(key, v);
}

long RunConfig::get_long(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<long>(v);
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "' must be true or false");
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

int RunConfig::dims() const {
  const long d = get_long("dims");
  if (d < 1 || d > kMaxDim) throw ConfigError("dims must be 1, 2 or 3");
  return static_cast<int>(d);
}

double RunConfig::noise_var() const {
  if (!has("noise_var")) throw ConfigError("noise_var is required: the measurement-error variance is fixed and known");
  const double v = get_double("noise_var");
  if (!(v > 0.0)) throw ConfigError("noise_var must be positive");
  return v;
}

TaperSpec RunConfig::taper() const {
  const double l = get_double("taper_length");
  if (!(l > 0.0)) throw ConfigError("taper_length must be positive");
  return TaperSpec{l};
}

Trend RunConfig::trend() const { return parse_trend(get("trend")); }

std::uint64_t RunConfig::seed() const {
  const std::string v = get("seed");
  std::uint64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("seed must be a non-negative integer");
  }
  return out;
}

std::string RunConfig::transform() const {
  const std::string t = get("transform");
  if (t != "none" && t != "shift_log") throw ConfigError("transform must be 'none' or 'shift_log'");
  return t;
}

LocationList parse_points(const std::string& text, int dims, const std::string& key) {
  LocationList out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    std::stringstream cs(item);
    std::vector<double> coords;
    std::string tok;
    while (cs >> tok) coords.push_back(to_double(key, tok));
    if (static_cast<int>(coords.size()) != dims) {
      throw ConfigError("config key '" + key + "': point '" + item + "' does not have " + std::to_string(dims) +
                        " coordinates");
    }
    Location s(dims);
    for (int d = 0; d < dims; ++d) s(d) = coords[static_cast<std::size_t>(d)];
    out.push_back(s);
  }
  return out;
}

SvBasis RunConfig::sv_basis() const {
  SvBasis b;
  b.centers = parse_points(get("sv_centers"), dims(), "sv_centers");
  b.scale = get_double("sv_scale");
  if (!(b.scale > 0.0)) throw ConfigError("sv_scale must be positive");
  return b;
}

ParentCovParams RunConfig::initial_params(const ModelData& data) const {
  CovPriorSettings pr;
  if (has("mu_sigma")) {
    pr.mu_sigma = get_double("mu_sigma");
  } else {
    const double mean = data.z.mean();
    const double var = (data.z.array() - mean).square().mean();
    pr.mu_sigma = 0.5 * std::log(std::max(var, 1e-300));
  }
  if (has("mu_gamma")) {
    pr.mu_gamma = get_double("mu_gamma");
  } else {
    // Squared scale of a tenth of the data extent.
    const ProposalDomain box = ProposalDomain::expanded_bbox(data.locs, 0.0);
    const double ext = std::max(0.1 * box.diameter(), 1e-12);
    pr.mu_gamma = 2.0 * std::log(ext);
  }
  pr.sigma_var = get_double("sigma_var");
  pr.smooth_mean = get_double("smooth_mean");
  pr.smooth_var = get_double("smooth_var");
  pr.scale_var = get_double("scale_var");
  pr.angle_mean = get_double("angle_mean");
  pr.angle_var = get_double("angle_var");
  pr.coeff_var = get_double("tau2");
  for (double v : {pr.sigma_var, pr.smooth_var, pr.scale_var, pr.angle_var}) {
    if (!(v > 0.0)) throw ConfigError("prior variances must be positive");
  }
  if (!(pr.coeff_var >= 0.0)) throw ConfigError("tau2 must be non-negative");
  return ParentCovParams::with_priors(dims(), sv_basis(), pr);
}

KnotMode RunConfig::knot_mode() const {
  const std::string m = get("knot_mode");
  if (m == "random") return KnotMode::random;
  if (m == "fixed" || m == "grid") return KnotMode::fixed;
  throw ConfigError("knot_mode must be random, fixed or grid");
}

KnotSet RunConfig::initial_knots(const ProposalDomain& domain) const {
  const std::string m = get("knot_mode");
  if (m == "random") return KnotSet{};
  if (m == "fixed") {
    KnotSet k{parse_points(get("knots"), dims(), "knots")};
    if (k.empty()) throw ConfigError("knot_mode = fixed needs a non-empty 'knots' list");
    return k;
  }
  // Regular grid over the proposal domain, counts per axis.
  std::stringstream ss(get("knot_grid"));
  std::vector<long> counts;
  std::string tok;
  while (ss >> tok) counts.push_back(static_cast<long>(to_double("knot_grid", tok)));
  if (counts.size() == 1) counts.assign(static_cast<std::size_t>(dims()), counts[0]);
  if (static_cast<int>(counts.size()) != dims()) throw ConfigError("knot_grid needs one count or one per dimension");
  for (long c : counts) {
    if (c < 1) throw ConfigError("knot_grid counts must be positive");
  }
  KnotSet k;
  std::vector<long> idx(counts.size(), 0);
  while (true) {
    Location s(dims());
    for (int d = 0; d < dims(); ++d) {
      const long c = counts[static_cast<std::size_t>(d)];
      const double frac = c == 1 ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(d)]) / (c - 1);
      s(d) = domain.lo(d) + frac * (domain.hi(d) - domain.lo(d));
    }
    k.knots.push_back(s);
    int d = 0;
    for (; d < dims(); ++d) {
      if (++idx[static_cast<std::size_t>(d)] < counts[static_cast<std::size_t>(d)]) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
    if (d == dims()) break;
  }
  return k;
}

ProposalDomain RunConfig::proposal_domain(const LocationList& locs) const {
  if (has("proposal_domain")) {
    const LocationList pts = parse_points(get("proposal_domain"), dims(), "proposal_domain");
    if (pts.size() != 2) throw ConfigError("proposal_domain must be 'lo coords; hi coords'");
    ProposalDomain dom{pts[0], pts[1]};
    if ((dom.hi.array() < dom.lo.array()).any()) throw ConfigError("proposal_domain: lo exceeds hi");
    return dom;
  }
  return ProposalDomain::expanded_bbox(locs, get_double("domain_expansion"));
}

ChainConfig RunConfig::chain_config(const LocationList& locs) const {
  ChainConfig c;
  c.n_iter = get_long("n_iter");
  c.n_burn = get_long("n_burn");
  c.thin = get_long("thin");
  c.seed = seed();
  c.noise_var = noise_var();
  c.taper = taper();
  c.knot_mode = knot_mode();
  c.proposal_domain = proposal_domain(locs);
  c.check_every = get_long("check_every");
  c.min_knot_separation = get_double("min_knot_separation");
  c.validate();
  return c;
}

PredictOptions RunConfig::predict_options() const {
  PredictOptions o;
  o.keep_every = get_long("keep_every");
  o.level = get_double("credible_level");
  o.add_noise = get_bool("add_noise");
  o.keep_draws = get_bool("keep_draws");
  o.seed = derive_seed(seed(), 0x70726564ULL);
  o.threads = static_cast<int>(get_long("threads"));
  if (o.keep_every < 1) throw ConfigError("keep_every must be at least 1");
  if (!(o.level > 0.0 && o.level < 1.0)) throw ConfigError("credible_level must lie in (0, 1)");
  if (o.threads < 1) throw ConfigError("threads must be at least 1");
  return o;
}

void RunConfig::validate() const {
  dims();
  noise_var();
  taper();
  trend();
  transform();
  transform_shift();
  knot_mode();
  if (has("proposal_domain")) proposal_domain({});
  if (get("knot_mode") != "random") {
    const Location origin = Location::Zero(dims());
    initial_knots(ProposalDomain{origin, origin});
  }
  has_header();
  seed();
  sv_basis();
  if (get_long("chains") < 1) throw ConfigError("chains must be at least 1");
  predict_options();
  const long n_iter = get_long("n_iter");
  const long n_burn = get_long("n_burn");
  if (n_burn < 0 || n_burn >= n_iter) throw ConfigError("need 0 <= n_burn < n_iter");
  if (get_long("thin") < 1) throw ConfigError("thin must be at least 1");
  if (get_long("check_every") < 1) throw ConfigError("check_every must be at least 1");
}

}  // namespace nsfsa
