#include "nsfsa/harness/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "nsfsa/harness/scores.hpp"
#include "nsfsa/harness/truth.hpp"
#include "nsfsa/predictor/predictor.hpp"

namespace nsfsa {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

LocationList linspace_locations(double lo, double hi, int n) {
  LocationList out;
  for (int i = 0; i < n; ++i) out.push_back(make_location({lo + (hi - lo) * i / (n - 1)}));
  return out;
}

}  // namespace

StudyKind parse_study_kind(const std::string& name) {
  if (name == "sim1") return StudyKind::sim1;
  if (name == "sim2") return StudyKind::sim2;
  if (name == "sim3") return StudyKind::sim3;
  throw ConfigError("unknown study '" + name + "' (expected sim1, sim2 or sim3)");
}

const char* study_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::sim1:
      return "sim1";
    case StudyKind::sim2:
      return "sim2";
    case StudyKind::sim3:
      return "sim3";
  }
  return "?";
}

std::string Variant::name() const {
  std::string k = knots == KnotVariant::random ? "random" : knots == KnotVariant::fixed8 ? "fixed8" : "fixed14";
  return k + (npc ? "-NPC" : "-SPC");
}

Variant Variant::parse(const std::string& name) {
  for (const auto& v : standard_variants()) {
    if (v.name() == name) return v;
  }
  throw ConfigError("unknown model variant '" + name + "'");
}

std::vector<Variant> standard_variants() {
  std::vector<Variant> out;
  for (KnotVariant k : {KnotVariant::random, KnotVariant::fixed8, KnotVariant::fixed14}) {
    out.push_back({k, true});
    out.push_back({k, false});
  }
  return out;
}

double study_noise_var(StudyKind kind) { return kind == StudyKind::sim1 ? 0.004 : 0.45; }

ReplicateData make_replicate(StudyKind kind, std::uint64_t study_seed, int replicate) {
  const std::uint64_t rep_seed = derive_seed(study_seed, static_cast<std::uint64_t>(replicate));
  Rng design_rng(derive_seed(rep_seed, 3));
  ReplicateData rd;
  rd.design = make_design(DesignSpec{}, design_rng);
  rd.noise_var = study_noise_var(kind);
  const auto& grid = rd.design.grid;
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  if (kind == StudyKind::sim1) {
    rd.truth.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) rd.truth(i) = sim1_truth(grid[i](0));
  } else {
    std::vector<SvTruth> params;
    for (const auto& s : grid) params.push_back(kind == StudyKind::sim2 ? sim2_params(s(0)) : sim3_params(s(0)));
    rd.truth = gen_gp_truth(grid, params, derive_seed(rep_seed, 1));
  }
  rd.z = simulate_data(rd.truth, rd.noise_var, derive_seed(rep_seed, 2));
  return rd;
}

SvBasis study_sv_basis() {
  SvBasis b;
  for (double c : {64.0, 192.0, 320.0, 448.0}) b.centers.push_back(make_location({c}));
  b.scale = 74.0;
  return b;
}

ParentCovParams study_params(StudyKind kind, bool npc) {
  CovPriorSettings pr;
  if (kind == StudyKind::sim1) {
    Eigen::VectorXd truth(512);
    for (int s = 1; s <= 512; ++s) truth(s - 1) = sim1_truth(s);
    pr.mu_sigma = std::log(std::sqrt(empirical_variance(truth)));
    pr.mu_gamma = std::log(3000.0);
  } else {
    pr.mu_sigma = std::log(3.0);
    pr.mu_gamma = std::log(600.0);
  }
  if (!npc) pr.coeff_var = 0.0;
  return ParentCovParams::with_priors(1, study_sv_basis(), pr);
}

KnotSet fixed_knots(KnotVariant variant) {
  switch (variant) {
    case KnotVariant::fixed8:
      return KnotSet{linspace_locations(-10.0, 522.0, 8)};
    case KnotVariant::fixed14:
      return KnotSet{linspace_locations(-4.0, 516.0, 14)};
    case KnotVariant::random:
      break;
  }
  return KnotSet{};
}

ChainConfig study_chain_config(const StudySettings& settings, const Variant& variant, std::uint64_t seed,
                               double noise_var) {
  ChainConfig cfg;
  cfg.n_iter = settings.n_iter;
  cfg.n_burn = settings.n_burn;
  cfg.thin = settings.thin;
  cfg.seed = seed;
  cfg.noise_var = noise_var;
  cfg.taper = TaperSpec{settings.taper_length};
  cfg.proposal_domain.lo = make_location({-9.0});
  cfg.proposal_domain.hi = make_location({522.0});
  cfg.knot_mode = variant.knots == KnotVariant::random ? KnotMode::random : KnotMode::fixed;
  return cfg;
}

VariantResult run_replicate(const StudySettings& settings, const Variant& variant, const ReplicateData& data,
                            int replicate) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t rep_seed = derive_seed(settings.seed, static_cast<std::uint64_t>(replicate));
  const auto& obs = data.design.obs;

  ModelData md;
  md.locs = data.design.locations(obs);
  md.z.resize(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) md.z(static_cast<Eigen::Index>(i)) = data.z(obs[i]);
  md.x = Eigen::MatrixXd::Ones(md.z.size(), 1);

  const ParentCovParams init = study_params(settings.kind, variant.npc);
  const ChainConfig cfg = study_chain_config(settings, variant,
                                             derive_seed(rep_seed, 10 + static_cast<std::uint64_t>(variant.code())),
                                             data.noise_var);
  ChainStats stats;
  const ChainRecord chain = run_chain(md, init, fixed_knots(variant.knots), cfg, &stats);

  const auto& grid = data.design.grid;
  const PredictionSet pset =
      PredictionSet::build(grid, Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(grid.size()), 1), md.locs);
  PredictOptions popt;
  popt.keep_every = settings.keep_every;
  popt.level = settings.level;
  popt.seed = derive_seed(rep_seed, 20 + static_cast<std::uint64_t>(variant.code()));
  const PosteriorField field = predict_field(chain, md, pset, init, cfg.taper, data.noise_var, popt);

  VariantResult res;
  res.variant = variant;
  res.replicate = replicate;
  const double alpha = 1.0 - settings.level;
  for (std::size_t g = 0; g < kAllGroups.size(); ++g) {
    const auto& idx = data.design.group(kAllGroups[g]);
    res.mspe[g] = mspe(field.mean, data.truth, idx);
    res.is[g] = interval_score(field.lower, field.upper, data.truth, idx, alpha);
  }
  res.coverage_all = coverage(field.lower, field.upper, data.truth, data.design.all);
  res.mean_r = chain.mean_r();
  res.theta_accept = stats.theta_accept_rate();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

VariantSummary ScoreTable::summary(std::size_t variant_index) const {
  VariantSummary s;
  s.variant = variants.at(variant_index);
  int count = 0;
  for (const auto& r : raw) {
    if (r.variant.code() != s.variant.code()) continue;
    for (std::size_t g = 0; g < 4; ++g) {
      s.mspe[g] += r.mspe[g];
      s.is[g] += r.is[g];
    }
    s.coverage_all += r.coverage_all;
    s.mean_r += r.mean_r;
    s.theta_accept += r.theta_accept;
    s.seconds += r.seconds;
    ++count;
  }
  if (count > 0) {
    const double c = count;
    for (std::size_t g = 0; g < 4; ++g) {
      s.mspe[g] /= c;
      s.is[g] /= c;
    }
    s.coverage_all /= c;
    s.mean_r /= c;
    s.theta_accept /= c;
    s.seconds /= c;
  }
  return s;
}

std::vector<VariantSummary> ScoreTable::summaries() const {
  std::vector<VariantSummary> out;
  for (std::size_t v = 0; v < variants.size(); ++v) out.push_back(summary(v));
  return out;
}

std::optional<VariantSummary> ScoreTable::find(const std::string& variant_name) const {
  for (std::size_t v = 0; v < variants.size(); ++v) {
    if (variants[v].name() == variant_name) return summary(v);
  }
  return std::nullopt;
}

void ScoreTable::write_csv(std::ostream& out) const {
  out << "variant";
  for (auto g : kAllGroups) out << ",mspe_" << group_name(g);
  for (auto g : kAllGroups) out << ",is_" << group_name(g);
  out << ",coverage_ALL,mean_r,theta_accept,replicates\n";
  for (const auto& s : summaries()) {
    out << s.variant.name();
    for (double v : s.mspe) out << ',' << fmt(v);
    for (double v : s.is) out << ',' << fmt(v);
    out << ',' << fmt(s.coverage_all) << ',' << fmt(s.mean_r) << ',' << fmt(s.theta_accept) << ',' << replicates
        << '\n';
  }
}

void ScoreTable::write_raw_csv(std::ostream& out) const {
  out << "variant,replicate";
  for (auto g : kAllGroups) out << ",mspe_" << group_name(g);
  for (auto g : kAllGroups) out << ",is_" << group_name(g);
  out << ",coverage_ALL,mean_r,theta_accept\n";
  for (const auto& r : raw) {
    out << r.variant.name() << ',' << r.replicate;
    for (double v : r.mspe) out << ',' << fmt(v);
    for (double v : r.is) out << ',' << fmt(v);
    out << ',' << fmt(r.coverage_all) << ',' << fmt(r.mean_r) << ',' << fmt(r.theta_accept) << '\n';
  }
}

void ScoreTable::write_timing_csv(std::ostream& out) const {
  out << "variant,replicate,seconds\n";
  for (const auto& r : raw) out << r.variant.name() << ',' << r.replicate << ',' << fmt(r.seconds) << '\n';
}

void ScoreTable::write_text(std::ostream& out) const {
  const auto sums = summaries();
  constexpr int kLabel = 24;
  constexpr int kCol = 13;
  out << "Results of " << study_name(kind) << " (" << replicates << " replicates)\n";
  out << std::left << std::setw(kLabel) << "" << std::right;
  for (const auto& s : sums) out << std::setw(kCol) << s.variant.name();
  out << '\n';
  auto row = [&](const std::string& label, auto value) {
    out << std::left << std::setw(kLabel) << label << std::right;
    for (const auto& s : sums) out << std::setw(kCol) << value(s);
    out << '\n';
  };
  auto num = [](double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
  };
  for (std::size_t g = 0; g < 4; ++g) {
    row(std::string("MSPE (") + group_name(kAllGroups[g]) + ") x 100",
        [&](const VariantSummary& s) { return num(100.0 * s.mspe[g]); });
  }
  for (std::size_t g = 0; g < 4; ++g) {
    row(std::string("IS (") + group_name(kAllGroups[g]) + ") x 100",
        [&](const VariantSummary& s) { return num(100.0 * s.is[g]); });
  }
  row("Posterior mean of r", [&](const VariantSummary& s) {
    return s.variant.knots == KnotVariant::random ? num(s.mean_r) : "(" + std::to_string(std::lround(s.mean_r)) + ")";
  });
  row("Time per chain (s)", [&](const VariantSummary& s) { return num(s.seconds); });
}

ScoreTable run_study(const StudySettings& settings) {
  if (settings.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (settings.variants.empty()) throw ConfigError("no model variants selected");
  ScoreTable table;
  table.kind = settings.kind;
  table.variants = settings.variants;
  table.replicates = settings.replicates;

  std::vector<ReplicateData> data;
  for (int rep = 0; rep < settings.replicates; ++rep) data.push_back(make_replicate(settings.kind, settings.seed, rep));

  const std::size_t nv = settings.variants.size();
  const std::size_t jobs = nv * static_cast<std::size_t>(settings.replicates);
  table.raw.resize(jobs);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t v = j / static_cast<std::size_t>(settings.replicates);
      const int rep = static_cast<int>(j % static_cast<std::size_t>(settings.replicates));
      try {
        table.raw[j] = run_replicate(settings, settings.variants[v], data[static_cast<std::size_t>(rep)], rep);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(settings.threads, static_cast<int>(jobs)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return table;
}

}  // namespace nsfsa
