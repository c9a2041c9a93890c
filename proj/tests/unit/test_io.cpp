#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <string>

#include "nsfsa/common.hpp"
#include "nsfsa/io/config.hpp"
#include "nsfsa/io/dataset.hpp"
#include "nsfsa/io/manifest.hpp"
#include "nsfsa/io/transform.hpp"

using namespace nsfsa;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kMinimalConfig = "dims = 1\nnoise_var = 0.004\ntaper_length = 6.5\n";

}  // namespace

TEST_CASE("csv: coordinates, value and covariates") {
  const Dataset ds = parse_csv("x,y,z,elev\n0,0,1.5,10\n1,0,2.5,11\n0,1,3.5,12\n", 2, true);
  REQUIRE(ds.size() == 3);
  CHECK(ds.dims == 2);
  CHECK(ds.locs[2](1) == 1.0);
  CHECK(ds.z(1) == 2.5);
  REQUIRE(ds.extra.cols() == 1);
  CHECK(ds.extra(2, 0) == 12.0);
  CHECK(ds.extra_names.at(0) == "elev");
  CHECK(ds.duplicate_locations == 0);
}

TEST_CASE("csv: location-only files") {
  const Dataset ds = parse_csv("1\n2\n3\n", 1, false, false);
  CHECK(ds.size() == 3);
  CHECK(ds.locs[1](0) == 2.0);
}

TEST_CASE("csv: errors carry the line number") {
  const std::string bad = error_of([] { parse_csv("s,z\n1,2\n2,abc\n", 1, true, true, "d.csv"); });
  CHECK(bad.find("d.csv line 3") != std::string::npos);
  const std::string ragged = error_of([] { parse_csv("1,2\n2,3,4\n", 1, false); });
  CHECK(ragged.find("line 2") != std::string::npos);
  CHECK(error_of([] { parse_csv("s,z\n", 1, true); }).find("no observations") != std::string::npos);
  CHECK(error_of([] { parse_csv("", 1, false); }).find("no observations") != std::string::npos);
  CHECK(error_of([] { parse_csv("1,2\n", 4, false); }).find("dims") != std::string::npos);
  CHECK(error_of([] { parse_csv("1,2\n", 0, false); }).find("dims") != std::string::npos);
  CHECK_FALSE(error_of([] { ingest_csv("/nonexistent/file.csv", 1, false); }).empty());
}

TEST_CASE("csv: non-finite values are rejected") {
  CHECK_FALSE(error_of([] { parse_csv("1,nan\n", 1, false); }).empty());
  CHECK_FALSE(error_of([] { parse_csv("inf,1\n", 1, false); }).empty());
}

TEST_CASE("csv: duplicate locations are counted") {
  const Dataset ds = parse_csv("1,1,0.5\n1,1,0.7\n2,1,0.1\n1,1,0.2\n", 2, false);
  CHECK(ds.size() == 4);
  CHECK(ds.duplicate_locations == 2);
}

TEST_CASE("design matrix: intercept, centered coordinates, covariates") {
  const Dataset ds = parse_csv("0,0,1,5\n2,0,1,6\n4,6,1,7\n", 2, false);
  const Location c = coordinate_center(ds.locs);
  CHECK(c(0) == doctest::Approx(2.0));
  CHECK(c(1) == doctest::Approx(2.0));
  const Eigen::MatrixXd X = design_matrix(ds.locs, ds.extra, Trend::coords, c);
  REQUIRE(X.rows() == 3);
  REQUIRE(X.cols() == 4);
  CHECK(X.col(0).isOnes());
  CHECK(X.col(1).sum() == doctest::Approx(0.0));
  CHECK(X.col(2).sum() == doctest::Approx(0.0));
  CHECK(X(2, 2) == doctest::Approx(4.0));
  CHECK(X(1, 3) == 6.0);
  const Eigen::MatrixXd X0 = design_matrix(ds.locs, Eigen::MatrixXd(3, 0), Trend::intercept, c);
  CHECK(X0.cols() == 1);
  CHECK(parse_trend("coords") == Trend::coords);
  CHECK_THROWS_AS(parse_trend("quadratic"), ConfigError);
}

TEST_CASE("shifted log transform") {
  CHECK(shift_log_transform(0.0) == doctest::Approx(5.0752).epsilon(1e-5));
  CHECK(shift_log_transform(0.0) == doctest::Approx(std::log(160.0)).epsilon(1e-15));
  CHECK(inverse_shift_log(std::log(160.0)) == doctest::Approx(0.0).epsilon(1e-12));
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double tc = std::pow(10.0, 6.0 * i / 2000.0) - 1.0;
    const double back = inverse_shift_log(shift_log_transform(tc));
    worst = std::max(worst, std::abs(back - tc) / std::max(1.0, tc));
  }
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(shift_log_transform(-160.0), ConfigError);
  CHECK_THROWS_AS(shift_log_transform(-200.0), ConfigError);
  CHECK(shift_log_transform(-159.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(shift_log_transform(0.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("config: strict parsing") {
  const RunConfig cfg = RunConfig::parse(std::string("# comment\n") + kMinimalConfig + "\nn_iter = 500\n");
  CHECK(cfg.dims() == 1);
  CHECK(cfg.noise_var() == 0.004);
  CHECK(cfg.get_long("n_iter") == 500);
  CHECK(cfg.has("n_iter"));
  CHECK_FALSE(cfg.has("thin"));
  CHECK(cfg.get_long("thin") >= 1);

  const std::string unknown = error_of([] { RunConfig::parse("dims = 1\nnoise_var = 1\nnoise_variance = 2\n", "m.cfg"); });
  CHECK(unknown.find("m.cfg line 3") != std::string::npos);
  CHECK(unknown.find("noise_variance") != std::string::npos);
  const std::string twice = error_of([] { RunConfig::parse("dims = 1\ndims = 2\n"); });
  CHECK(twice.find("line 2") != std::string::npos);
  CHECK(twice.find("twice") != std::string::npos);
  CHECK(error_of([] { RunConfig::parse("dims 1\n"); }).find("line 1") != std::string::npos);
}

TEST_CASE("config: noise variance is required and positive") {
  const RunConfig missing = RunConfig::parse("dims = 1\n");
  const std::string msg = error_of([&] { missing.validate(); });
  CHECK(msg.find("noise_var") != std::string::npos);
  CHECK_THROWS_AS(RunConfig::parse("dims = 1\nnoise_var = 1\n").validate(), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("dims = 1\nnoise_var = 0\n").validate(), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("dims = 1\nnoise_var = -1\n").validate(), ConfigError);
  CHECK_NOTHROW(RunConfig::parse(kMinimalConfig).validate());
}

TEST_CASE("config: validation of typed values") {
  auto invalid = [](const std::string& extra) {
    return !error_of([&] { RunConfig::parse(std::string(kMinimalConfig) + extra).validate(); }).empty();
  };
  CHECK(invalid("n_iter = 10\nn_burn = 10\n"));
  CHECK(invalid("thin = 0\n"));
  CHECK(invalid("n_iter = 1.5\n"));
  CHECK(invalid("taper_length = 0\n"));
  CHECK(invalid("transform = log\n"));
  CHECK(invalid("knot_mode = fixed\n"));
  CHECK(invalid("knot_mode = sometimes\n"));
  CHECK(invalid("credible_level = 1\n"));
  CHECK(invalid("chains = 0\n"));
  CHECK(invalid("add_noise = maybe\n"));
  CHECK(invalid("proposal_domain = 5; 1\n"));
  CHECK(invalid("sv_centers = 1 2\n"));
  CHECK(invalid("dims = 2\n") == true);
  CHECK_FALSE(invalid("knot_mode = fixed\nknots = 10; 20; 30\n"));
  CHECK_FALSE(invalid("transform = shift_log\n"));
}

TEST_CASE("config: overrides and canonical text") {
  RunConfig cfg = RunConfig::parse(kMinimalConfig);
  cfg.set("n_iter", "2000");
  CHECK(cfg.get_long("n_iter") == 2000);
  CHECK_THROWS_AS(cfg.set("bogus", "1"), ConfigError);
  const std::string canon = cfg.canonical();
  CHECK(canon.find("n_iter = 2000") != std::string::npos);
  CHECK(canon.find("dims = 1") < canon.find("n_iter"));
  const RunConfig again = RunConfig::parse(canon);
  CHECK(again.canonical() == canon);
  int required = 0;
  for (const auto& [key, def] : RunConfig::known_keys()) {
    CHECK_FALSE(key.empty());
    if (key == "dims" || key == "noise_var" || key == "taper_length") {
      CHECK(def.empty());
      ++required;
    }
  }
  CHECK(required == 3);
}

TEST_CASE("config: point lists") {
  const LocationList pts = parse_points("1 2; 3 4 ;5 6", 2, "knots");
  REQUIRE(pts.size() == 3);
  CHECK(pts[2](0) == 5.0);
  CHECK(pts[1](1) == 4.0);
  CHECK(parse_points("", 1, "knots").empty());
  const std::string msg = error_of([] { parse_points("1 2; 3", 2, "knots"); });
  CHECK(msg.find("knots") != std::string::npos);
  CHECK_THROWS_AS(parse_points("1 x", 2, "knots"), ConfigError);
}

TEST_CASE("config: fixed knots and proposal domain") {
  const RunConfig cfg =
      RunConfig::parse(std::string(kMinimalConfig) + "knot_mode = fixed\nknots = 10; 20\nproposal_domain = -9; 522\n");
  cfg.validate();
  CHECK(cfg.knot_mode() == KnotMode::fixed);
  LocationList locs;
  for (int s = 1; s <= 5; ++s) locs.push_back(Location::Constant(1, s));
  const ProposalDomain dom = cfg.proposal_domain(locs);
  CHECK(dom.lo(0) == -9.0);
  CHECK(dom.hi(0) == 522.0);
  const KnotSet k = cfg.initial_knots(dom);
  CHECK(k.size() == 2);
}

TEST_CASE("fnv1a hashes") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
  CHECK(fnv1a_hex("ab") != fnv1a_hex("ba"));
}

TEST_CASE("manifest round trip and input verification") {
  const char* tmp = std::getenv("NSFSA_TEST_TMP");
  const std::string dir = tmp ? tmp : "/tmp";
  std::filesystem::create_directories(dir);
  const std::string input = dir + "/manifest_input.csv";
  {
    std::ofstream f(input);
    f << "1,2\n";
  }
  Manifest m;
  m.command = "fit";
  m.args = {"--config", "a.cfg", "--data", input};
  m.config_text = "dims = 1\n";
  m.seed = 18446744073709551615ULL;
  m.inputs.push_back({"data", input, file_hash(input)});
  m.outputs.push_back({"chain", "chain.csv", "0123456789abcdef"});
  m.summary["n"] = 1;
  const Manifest back = Manifest::from_json(m.to_json());
  CHECK(back.command == m.command);
  CHECK(back.args == m.args);
  CHECK(back.config_text == m.config_text);
  CHECK(back.seed == m.seed);
  REQUIRE(back.inputs.size() == 1);
  CHECK(back.inputs[0].hash == m.inputs[0].hash);
  CHECK(back.outputs[0].path == "chain.csv");
  CHECK(back.summary["n"] == 1);
  CHECK_NOTHROW(back.verify_inputs());
  {
    std::ofstream f(input);
    f << "1,3\n";
  }
  const std::string msg = error_of([&] { back.verify_inputs(); });
  CHECK(msg.find("manifest_input.csv") != std::string::npos);
  std::remove(input.c_str());
  CHECK_FALSE(error_of([&] { back.verify_inputs(); }).empty());
}
