#include "nsfsa/io/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Cholesky>

#include "nsfsa/harness/scores.hpp"
#include "nsfsa/harness/study.hpp"
#include "nsfsa/harness/truth.hpp"
#include "nsfsa/io/config.hpp"
#include "nsfsa/io/dataset.hpp"
#include "nsfsa/io/manifest.hpp"
#include "nsfsa/io/transform.hpp"
#include "nsfsa/kernels/nonstationary.hpp"
#include "nsfsa/predictor/predictor.hpp"
#include "nsfsa/sampler/sampler.hpp"

namespace nsfsa {
namespace {

namespace fs = std::filesystem;

// Shortest text that reads back to the same double.
std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Files are written as <name>.partial and renamed only once every output of
// the command is complete; anything left uncommitted is removed.
class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw ConfigError("cannot create output directory '" + dir + "'");
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir() {
    if (committed_) return;
    for (auto& s : streams_) s->close();
    for (const auto& name : names_) {
      std::error_code ec;
      fs::remove(partial(name), ec);
    }
  }

  std::ofstream& open(const std::string& name) {
    streams_.push_back(std::make_unique<std::ofstream>(partial(name), std::ios::binary | std::ios::trunc));
    names_.push_back(name);
    if (!*streams_.back()) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
    return *streams_.back();
  }

  /// Close everything opened so far and return their hashes.
  std::vector<ManifestFile> close_all() {
    std::vector<ManifestFile> out;
    for (std::size_t k = 0; k < names_.size(); ++k) {
      streams_[k]->flush();
      if (!*streams_[k]) throw ConfigError("write failed for '" + (dir_ / names_[k]).string() + "'");
      streams_[k]->close();
      out.push_back({"output", names_[k], file_hash(partial(names_[k]).string())});
    }
    return out;
  }

  void commit() {
    for (auto& s : streams_) {
      if (s->is_open()) s->close();
    }
    for (const auto& name : names_) fs::rename(partial(name), dir_ / name);
    committed_ = true;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path partial(const std::string& name) const { return dir_ / (name + ".partial"); }

  fs::path dir_;
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<std::ofstream>> streams_;
  bool committed_ = false;
};

void finish(OutputDir& out, Manifest manifest) {
  manifest.outputs = out.close_all();
  std::ofstream& m = out.open("manifest.json");
  m << manifest.to_json().dump(2) << '\n';
  out.close_all();
  out.commit();
}

ManifestFile input_file(const std::string& role, const std::string& path) { return {role, path, file_hash(path)}; }

RunConfig load_config(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig cfg = RunConfig::load(path);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

struct FitInputs {
  Dataset ds;
  ModelData md;
  Location center;
  ParentCovParams tmpl;
};

FitInputs prepare_fit(const RunConfig& cfg, const std::string& data_path) {
  FitInputs f;
  f.ds = ingest_csv(data_path, cfg.dims(), cfg.has_header());
  f.md.locs = f.ds.locs;
  f.md.z = f.ds.z;
  if (cfg.transform() == "shift_log") {
    for (Eigen::Index i = 0; i < f.md.z.size(); ++i) f.md.z(i) = shift_log_transform(f.md.z(i), cfg.transform_shift());
  }
  f.center = coordinate_center(f.md.locs);
  f.md.x = design_matrix(f.md.locs, f.ds.extra, cfg.trend(), f.center);
  f.md.validate();
  f.tmpl = cfg.initial_params(f.md);
  return f;
}

// ---------------------------------------------------------------- simulate

LocalCovParams soil_local(const Location& s) {
  LocalCovParams lp;
  lp.sigma = 0.35;
  lp.smooth = 1.0;
  const double scales[2] = {150.0 * 150.0, 50.0 * 50.0};
  const double angle[1] = {0.2 + 0.9 * s(0) / 1000.0};
  lp.aniso = anisotropy_matrix(scales, angle);
  lp.log_det_aniso = std::log(scales[0]) + std::log(scales[1]);
  return lp;
}

}  // namespace

SoilLikeData make_soil_like(int n, std::uint64_t seed) {
  if (n < 10) throw ConfigError("synthetic soil data needs at least 10 locations");
  Rng rng(derive_seed(seed, 1));
  SoilLikeData d;
  d.holdout_lo = make_location({600.0, 200.0});
  d.holdout_hi = make_location({800.0, 400.0});
  for (int i = 0; i < n; ++i) d.locs.push_back(make_location({rng.uniform(0.0, 1000.0), rng.uniform(0.0, 600.0)}));
  std::vector<LocalCovParams> lp;
  for (const auto& s : d.locs) lp.push_back(soil_local(s));
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i) {
    c(i, i) = lp[i].sigma * lp[i].sigma + 1e-10;
    for (int j = 0; j < i; ++j) c(i, j) = c(j, i) = parent_cov(d.locs[i], lp[i], d.locs[j], lp[j]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw NumericalError("synthetic soil covariance is not positive definite");
  const Eigen::VectorXd field = llt.matrixL() * rng.normal_vector(n);
  d.tc.resize(n);
  d.held_out.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Location& s = d.locs[i];
    const double y = 5.5 + 4e-4 * (s(0) - 500.0) - 3e-4 * (s(1) - 300.0) + field(i);
    d.tc(i) = inverse_shift_log(y + 0.1 * rng.normal());
    d.held_out[static_cast<std::size_t>(i)] = (s.array() >= d.holdout_lo.array()).all() &&
                                              (s.array() <= d.holdout_hi.array()).all();
  }
  return d;
}

namespace {

struct SimulateOptions {
  std::string study;
  std::uint64_t seed = 1;
  int replicate = 0;
  int n = 1000;
  std::string out;
};

void run_simulate(const SimulateOptions& o, const std::vector<std::string>& args, std::ostream& log) {
  OutputDir out(o.out);
  Manifest man;
  man.command = "simulate";
  man.args = args;
  man.seed = o.seed;
  if (o.study == "soil") {
    const SoilLikeData d = make_soil_like(o.n, o.seed);
    auto& train = out.open("train.csv");
    auto& test = out.open("test.csv");
    auto& test_locs = out.open("test_locations.csv");
    train << "x,y,tc\n";
    test << "x,y,tc\n";
    test_locs << "x,y\n";
    int n_test = 0;
    for (std::size_t i = 0; i < d.locs.size(); ++i) {
      const std::string coords = fmt(d.locs[i](0)) + "," + fmt(d.locs[i](1));
      if (d.held_out[i]) {
        test << coords << ',' << fmt(d.tc(static_cast<Eigen::Index>(i))) << '\n';
        test_locs << coords << '\n';
        ++n_test;
      } else {
        train << coords << ',' << fmt(d.tc(static_cast<Eigen::Index>(i))) << '\n';
      }
    }
    auto& grid = out.open("grid_locations.csv");
    grid << "x,y\n";
    for (int gy = 0; gy <= 30; ++gy) {
      for (int gx = 0; gx <= 50; ++gx) grid << fmt(20.0 * gx) << ',' << fmt(20.0 * gy) << '\n';
    }
    auto& cfg = out.open("model.cfg");
    cfg << "# synthetic soil-style survey (coordinates in metres)\n"
        << "dims = 2\n"
        << "noise_var = 0.01\n"
        << "taper_length = 60\n"
        << "transform = shift_log\n"
        << "transform_shift = 160\n"
        << "trend = coords\n"
        << "sv_centers = 150 100; 500 100; 850 100; 150 500; 500 500; 850 500\n"
        << "sv_scale = 350\n"
        << "mu_gamma = " << fmt(2.0 * std::log(100.0)) << "\n"
        << "knot_mode = random\n";
    man.summary = {{"n", o.n}, {"n_test", n_test}};
    log << "wrote " << o.n - n_test << " training and " << n_test << " held-out rows to " << o.out << '\n';
  } else {
    const StudyKind kind = parse_study_kind(o.study);
    if (o.replicate < 0) throw ConfigError("replicate must be non-negative");
    const ReplicateData rd = make_replicate(kind, o.seed, o.replicate);
    auto& data = out.open("data.csv");
    data << "s,z\n";
    for (int i : rd.design.obs) data << fmt(rd.design.grid[i](0)) << ',' << fmt(rd.z(i)) << '\n';
    auto& truth = out.open("truth.csv");
    truth << "s,value,group\n";
    std::vector<std::string> group(rd.design.grid.size(), "OBS");
    for (int i : rd.design.mar) group[static_cast<std::size_t>(i)] = "MAR";
    for (int i : rd.design.mbd) group[static_cast<std::size_t>(i)] = "MBD";
    for (std::size_t i = 0; i < rd.design.grid.size(); ++i) {
      truth << fmt(rd.design.grid[i](0)) << ',' << fmt(rd.truth(static_cast<Eigen::Index>(i))) << ',' << group[i]
            << '\n';
    }
    auto& grid = out.open("grid.csv");
    grid << "s\n";
    for (const auto& s : rd.design.grid) grid << fmt(s(0)) << '\n';
    const ParentCovParams p = study_params(kind, true);
    auto& cfg = out.open("model.cfg");
    cfg << "dims = 1\n"
        << "noise_var = " << fmt(rd.noise_var) << "\n"
        << "taper_length = 6.5\n"
        << "sv_centers = 64; 192; 320; 448\n"
        << "sv_scale = 74\n"
        << "mu_sigma = " << fmt(p.sigma.prior_mean) << "\n"
        << "mu_gamma = " << fmt(p.scales[0].prior_mean) << "\n"
        << "proposal_domain = -9; 522\n"
        << "knot_mode = random\n";
    man.summary = {{"study", o.study}, {"replicate", o.replicate}, {"n_obs", rd.design.obs.size()}};
    log << "wrote " << o.study << " replicate " << o.replicate << " (" << rd.design.obs.size() << " observations) to "
        << o.out << '\n';
  }
  finish(out, man);
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string config;
  std::string data;
  std::vector<std::string> sets;
  std::string out;
};

void run_fit(const FitOptions& o, const std::vector<std::string>& args, std::ostream& log) {
  const RunConfig cfg = load_config(o.config, o.sets);
  const FitInputs in = prepare_fit(cfg, o.data);
  const ChainConfig base = cfg.chain_config(in.md.locs);
  const KnotSet knots = cfg.initial_knots(base.proposal_domain);
  const int chains = static_cast<int>(cfg.get_long("chains"));
  const int threads = std::max(1, std::min(chains, static_cast<int>(cfg.get_long("threads"))));
  if (in.ds.duplicate_locations > 0) {
    log << "note: " << in.ds.duplicate_locations << " rows repeat an earlier location exactly\n";
  }

  std::vector<ChainRecord> records(static_cast<std::size_t>(chains));
  std::vector<ChainStats> stats(static_cast<std::size_t>(chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  auto run_one = [&](int c) {
    ChainConfig cc = base;
    cc.seed = chains == 1 ? base.seed : derive_seed(base.seed, static_cast<std::uint64_t>(c + 1));
    try {
      records[static_cast<std::size_t>(c)] = run_chain(in.md, in.tmpl, knots, cc, &stats[static_cast<std::size_t>(c)]);
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };
  if (threads == 1) {
    for (int c = 0; c < chains; ++c) run_one(c);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int c = t; c < chains; c += threads) run_one(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  OutputDir out(o.out);
  nlohmann::json chain_summary = nlohmann::json::array();
  for (int c = 0; c < chains; ++c) {
    const std::string name = chains == 1 ? "chain.csv" : "chain_" + std::to_string(c + 1) + ".csv";
    records[static_cast<std::size_t>(c)].write_csv(out.open(name));
    const ChainStats& s = stats[static_cast<std::size_t>(c)];
    chain_summary.push_back({{"file", name},
                             {"kept_draws", records[static_cast<std::size_t>(c)].size()},
                             {"posterior_mean_r", records[static_cast<std::size_t>(c)].mean_r()},
                             {"theta_accept_rate", s.theta_accept_rate()},
                             {"knot_accept_rate", s.knot_accept_rate()},
                             {"failed_proposals", s.failed_proposals},
                             {"max_loglik_audit_error", s.max_audit_error}});
    log << name << ": " << records[static_cast<std::size_t>(c)].size() << " draws, mean r "
        << records[static_cast<std::size_t>(c)].mean_r() << ", theta acceptance " << s.theta_accept_rate() << '\n';
  }
  Manifest man;
  man.command = "fit";
  man.args = args;
  man.config_text = cfg.canonical();
  man.seed = cfg.seed();
  man.inputs = {input_file("config", o.config), input_file("data", o.data)};
  man.summary = {{"n", in.md.size()},
                 {"p", in.md.x.cols()},
                 {"duplicate_locations", in.ds.duplicate_locations},
                 {"chains", chain_summary}};
  finish(out, man);
}

// ---------------------------------------------------------------- predict

struct PredictCmdOptions {
  std::string config;
  std::string data;
  std::vector<std::string> chains;
  std::string locations;
  std::vector<std::string> sets;
  std::string out;
};

void write_field(std::ostream& os, const PosteriorField& f, const Eigen::VectorXd* transformed_mean) {
  const int d = f.locations.empty() ? 1 : static_cast<int>(f.locations.front().size());
  for (int c = 1; c <= d; ++c) os << 's' << c << ',';
  os << "mean,sd,lower,upper";
  if (transformed_mean) os << ",transformed_mean";
  os << '\n';
  for (int i = 0; i < f.size(); ++i) {
    for (int c = 0; c < d; ++c) os << fmt(f.locations[i](c)) << ',';
    os << fmt(f.mean(i)) << ',' << fmt(f.sd(i)) << ',' << fmt(f.lower(i)) << ',' << fmt(f.upper(i));
    if (transformed_mean) os << ',' << fmt((*transformed_mean)(i));
    os << '\n';
  }
}

void run_predict(const PredictCmdOptions& o, const std::vector<std::string>& args, std::ostream& log) {
  const RunConfig cfg = load_config(o.config, o.sets);
  const FitInputs in = prepare_fit(cfg, o.data);
  ChainRecord chain;
  for (const auto& path : o.chains) {
    std::ifstream cin(path);
    if (!cin) throw ConfigError("cannot open chain file '" + path + "'");
    ChainRecord part = ChainRecord::read_csv(cin, cfg.dims());
    if (chain.rows.empty()) {
      chain = std::move(part);
    } else {
      for (auto& r : part.rows) chain.rows.push_back(std::move(r));
    }
  }
  const Dataset loc = ingest_csv(o.locations, cfg.dims(), cfg.has_header(), false);
  if (loc.extra.cols() != in.ds.extra.cols()) {
    throw ConfigError("prediction locations must carry the same " + std::to_string(in.ds.extra.cols()) +
                      " covariate column(s) as the data");
  }
  const PredictionSet pset = PredictionSet::build(
      loc.locs, design_matrix(loc.locs, loc.extra, cfg.trend(), in.center), in.md.locs);
  PredictOptions popt = cfg.predict_options();
  const bool back = cfg.transform() == "shift_log";
  const bool keep = popt.keep_draws;
  popt.keep_draws = keep || back;
  const PosteriorField field = predict_field(chain, in.md, pset, in.tmpl, cfg.taper(), cfg.noise_var(), popt);

  OutputDir out(o.out);
  write_field(out.open("prediction.csv"), field, nullptr);
  if (back) {
    const double shift = cfg.transform_shift();
    const Eigen::MatrixXd orig = field.draws.unaryExpr([shift](double y) { return inverse_shift_log(y, shift); });
    const PosteriorField of = summarize_draws(field.locations, orig, field.level);
    const Eigen::VectorXd tmean = field.mean.unaryExpr([shift](double y) { return inverse_shift_log(y, shift); });
    write_field(out.open("prediction_original.csv"), of, &tmean);
  }
  if (keep) {
    write_draws_binary(field.draws, out.open("draws.bin"));
    nlohmann::json layout = {{"rows", field.draws.rows()},
                             {"cols", field.draws.cols()},
                             {"dtype", "float64"},
                             {"byte_order", "little"},
                             {"layout", "row-major; row = location (prediction.csv order), column = draw"}};
    out.open("draws.json") << layout.dump(2) << '\n';
  }
  Manifest man;
  man.command = "predict";
  man.args = args;
  man.config_text = cfg.canonical();
  man.seed = cfg.seed();
  man.inputs = {input_file("config", o.config), input_file("data", o.data), input_file("locations", o.locations)};
  for (const auto& c : o.chains) man.inputs.push_back(input_file("chain", c));
  man.summary = {{"locations", pset.size()},
                 {"draws", field.draws.cols() > 0 ? field.draws.cols() : static_cast<Eigen::Index>(
                                                                             (chain.size() + popt.keep_every - 1) /
                                                                             popt.keep_every)},
                 {"credible_level", popt.level}};
  finish(out, man);
  log << "predicted " << pset.size() << " locations\n";
}

// ---------------------------------------------------------------- score

struct ScoreOptions {
  std::string prediction;
  std::string truth;
  double level = 0.95;
  bool heldout = false;
  std::string out;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const std::string& path) {
  std::stringstream in(read_file(path));
  Table t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) {
      c.erase(0, c.find_first_not_of(" \t\r"));
      c.erase(c.find_last_not_of(" \t\r") + 1);
      cells.push_back(c);
    }
    return cells;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    t.rows.push_back(split(line));
    if (t.rows.back().size() != t.header.size()) {
      throw ConfigError(path + ": row " + std::to_string(t.rows.size() + 1) + " has the wrong number of columns");
    }
  }
  if (t.rows.empty()) throw ConfigError(path + ": no rows");
  return t;
}

double cell_number(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(path + ": '" + s + "' is not a number");
  }
}

void run_score(const ScoreOptions& o, const std::vector<std::string>& args, std::ostream& log) {
  const Table pred = read_table(o.prediction);
  const Table truth = read_table(o.truth);
  auto col = [](const Table& t, const std::string& name) {
    auto it = std::find(t.header.begin(), t.header.end(), name);
    return it == t.header.end() ? -1 : static_cast<int>(it - t.header.begin());
  };
  const int c_mean = col(pred, "mean");
  const int c_lo = col(pred, "lower");
  const int c_hi = col(pred, "upper");
  if (c_mean < 1 || c_lo < 0 || c_hi < 0) throw ConfigError(o.prediction + ": expected columns s..., mean, lower, upper");
  const int d = c_mean;
  const int c_group = col(truth, "group");
  if (static_cast<int>(truth.header.size()) < d + 1) throw ConfigError(o.truth + ": expected coordinates then a value");
  if (pred.rows.size() != truth.rows.size()) {
    throw ConfigError("prediction and truth files have different numbers of rows");
  }
  const std::size_t n = pred.rows.size();
  Eigen::VectorXd mean(n), lo(n), hi(n), x(n);
  std::map<std::string, std::vector<int>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) {
      const double a = cell_number(pred.rows[i][static_cast<std::size_t>(c)], o.prediction);
      const double b = cell_number(truth.rows[i][static_cast<std::size_t>(c)], o.truth);
      if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
        throw ConfigError("row " + std::to_string(i + 1) + ": prediction and truth locations differ");
      }
    }
    const auto e = static_cast<Eigen::Index>(i);
    mean(e) = cell_number(pred.rows[i][static_cast<std::size_t>(c_mean)], o.prediction);
    lo(e) = cell_number(pred.rows[i][static_cast<std::size_t>(c_lo)], o.prediction);
    hi(e) = cell_number(pred.rows[i][static_cast<std::size_t>(c_hi)], o.prediction);
    x(e) = cell_number(truth.rows[i][static_cast<std::size_t>(d)], o.truth);
    groups["ALL"].push_back(static_cast<int>(i));
    if (c_group >= 0) groups[truth.rows[i][static_cast<std::size_t>(c_group)]].push_back(static_cast<int>(i));
  }
  const std::string metric = o.heldout ? "asd" : "mspe";
  const double alpha = 1.0 - o.level;
  std::ostringstream csv;
  csv << "group,n," << metric << ",is,coverage\n";
  std::vector<std::string> order{"ALL"};
  for (const auto& [g, idx] : groups) {
    if (g != "ALL") order.push_back(g);
  }
  log << "group        n  " << (o.heldout ? "ASD" : "MSPE") << "            IS              coverage\n";
  for (const auto& g : order) {
    const auto& idx = groups[g];
    const double m = mspe(mean, x, idx);
    const double s = interval_score(lo, hi, x, idx, alpha);
    const double cov = coverage(lo, hi, x, idx);
    csv << g << ',' << idx.size() << ',' << fmt(m) << ',' << fmt(s) << ',' << fmt(cov) << '\n';
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %5zu  %-14.6g  %-14.6g  %.3f\n", g.c_str(), idx.size(), m, s, cov);
    log << buf;
  }
  if (!o.out.empty()) {
    OutputDir out(o.out);
    out.open("scores.csv") << csv.str();
    Manifest man;
    man.command = "score";
    man.args = args;
    man.inputs = {input_file("prediction", o.prediction), input_file("truth", o.truth)};
    finish(out, man);
  }
}

// ---------------------------------------------------------------- study

struct StudyOptions {
  std::string study;
  int replicates = 10;
  std::uint64_t seed = 1;
  std::string variants;
  long n_iter = 10000;
  long n_burn = 5000;
  long thin = 10;
  long keep_every = 1;
  int threads = 1;
  bool paper_scale = false;
  std::string out;
};

void run_study_cmd(const StudyOptions& o, const std::vector<std::string>& args, std::ostream& log) {
  StudySettings st;
  st.kind = parse_study_kind(o.study);
  st.replicates = o.paper_scale ? 100 : o.replicates;
  st.seed = o.seed;
  st.n_iter = o.n_iter;
  st.n_burn = o.n_burn;
  st.thin = o.thin;
  st.keep_every = o.keep_every;
  st.threads = o.threads;
  if (st.n_burn < 0 || st.n_burn >= st.n_iter || st.thin < 1) throw ConfigError("need 0 <= n_burn < n_iter and thin >= 1");
  if (!o.variants.empty()) {
    st.variants.clear();
    std::stringstream ss(o.variants);
    std::string v;
    while (std::getline(ss, v, ',')) st.variants.push_back(Variant::parse(v));
  }
  const ScoreTable table = run_study(st);
  OutputDir out(o.out);
  table.write_csv(out.open("scores.csv"));
  table.write_text(out.open("scores.txt"));
  table.write_raw_csv(out.open("raw_scores.csv"));
  table.write_timing_csv(out.open("timing.csv"));
  Manifest man;
  man.command = "study";
  man.args = args;
  man.seed = o.seed;
  finish(out, man);
  table.write_text(log);
}

std::vector<std::string> strip_out(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out" || args[i] == "-o") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonstationary full-scale approximation of Gaussian processes with random knots", "nsfsa"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "write a synthetic dataset (sim1, sim2, sim3 or soil)");
  c_sim->add_option("--study", sim.study, "sim1 | sim2 | sim3 | soil")->required();
  c_sim->add_option("--seed", sim.seed, "random seed");
  c_sim->add_option("--replicate", sim.replicate, "replicate index for the simulation studies");
  c_sim->add_option("--n", sim.n, "number of locations for the soil-style dataset");
  c_sim->add_option("--out,-o", sim.out, "output directory")->required();

  FitOptions fit;
  auto* c_fit = app.add_subcommand("fit", "run the reversible-jump MCMC and write the chain");
  c_fit->add_option("--config,-c", fit.config, "configuration file")->required();
  c_fit->add_option("--data,-d", fit.data, "CSV: coordinates, value, optional covariates")->required();
  c_fit->add_option("--set", fit.sets, "override a config key (key=value)");
  c_fit->add_option("--out,-o", fit.out, "output directory")->required();

  PredictCmdOptions pred;
  auto* c_pred = app.add_subcommand("predict", "posterior prediction at new locations");
  c_pred->add_option("--config,-c", pred.config, "configuration file used for the fit")->required();
  c_pred->add_option("--data,-d", pred.data, "data file used for the fit")->required();
  c_pred->add_option("--chain", pred.chains, "chain CSV (repeat to pool chains)")->required();
  c_pred->add_option("--locations,-l", pred.locations, "CSV of prediction coordinates (plus covariates)")->required();
  c_pred->add_option("--set", pred.sets, "override a config key (key=value)");
  c_pred->add_option("--out,-o", pred.out, "output directory")->required();

  ScoreOptions sc;
  auto* c_score = app.add_subcommand("score", "MSPE / ASD and interval score of a prediction file");
  c_score->add_option("--prediction,-p", sc.prediction, "prediction CSV")->required();
  c_score->add_option("--truth,-t", sc.truth, "CSV: coordinates, value, optional group column")->required();
  c_score->add_option("--level", sc.level, "credible level of the intervals");
  c_score->add_flag("--heldout", sc.heldout, "values are held-out observations (reports ASD)");
  c_score->add_option("--out,-o", sc.out, "output directory for scores.csv");

  StudyOptions so;
  auto* c_study = app.add_subcommand("study", "run a simulation study and tabulate scores");
  c_study->add_option("--study", so.study, "sim1 | sim2 | sim3")->required();
  c_study->add_option("--replicates", so.replicates, "number of simulated datasets");
  c_study->add_flag("--paper-scale", so.paper_scale, "use 100 replicates");
  c_study->add_option("--seed", so.seed, "random seed");
  c_study->add_option("--variants", so.variants, "comma-separated, e.g. random-NPC,fixed14-SPC (default: all six)");
  c_study->add_option("--n-iter", so.n_iter, "MCMC iterations per chain");
  c_study->add_option("--n-burn", so.n_burn, "burn-in iterations");
  c_study->add_option("--thin", so.thin, "thinning interval");
  c_study->add_option("--keep-every", so.keep_every, "predict on every k-th kept draw");
  c_study->add_option("--threads", so.threads, "parallel jobs");
  c_study->add_option("--out,-o", so.out, "output directory")->required();

  std::string manifest_path;
  std::string rerun_out;
  auto* c_rerun = app.add_subcommand("rerun", "repeat a run recorded in a manifest");
  c_rerun->add_option("--manifest,-m", manifest_path, "manifest.json of the earlier run")->required();
  c_rerun->add_option("--out,-o", rerun_out, "output directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }

  if (*c_rerun) {
    const Manifest m = Manifest::load(manifest_path);
    m.verify_inputs();
    std::vector<std::string> again{m.command};
    again.insert(again.end(), m.args.begin(), m.args.end());
    again.push_back("--out");
    again.push_back(rerun_out);
    return dispatch(again, out, err);
  }

  const std::vector<std::string> recorded = strip_out(std::vector<std::string>(args.begin() + 1, args.end()));
  if (*c_sim) run_simulate(sim, recorded, out);
  if (*c_fit) run_fit(fit, recorded, out);
  if (*c_pred) run_predict(pred, recorded, out);
  if (*c_score) run_score(sc, recorded, out);
  if (*c_study) run_study_cmd(so, recorded, out);
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace nsfsa
