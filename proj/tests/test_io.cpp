#include "carnot/io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

using namespace carnot;

namespace {

namespace fs = std::filesystem;

std::string temp_file(const std::string& name) {
  return (fs::temp_directory_path() / ("carnot_test_" + name)).string();
}

TEST(AlgebraJson, RoundTrip) {
  auto alg = heisenberg_squared_algebra();
  const Json j = algebra_to_json(*alg);
  auto back = algebra_from_json<double>(j);
  EXPECT_EQ(back->dim(), 6);
  EXPECT_EQ(back->horizontal_dim(), 4);
  EXPECT_EQ(back->terms().size(), alg->terms().size());
}

TEST(AlgebraJson, LoadsShippedConfigs) {
  const std::string base = std::string(CARNOT_SOURCE_DIR) + "/configs/";
  EXPECT_EQ(load_algebra<double>(base + "h3.json")->dim(), 3);
  EXPECT_EQ(load_algebra<double>(base + "r_x_h3.json")->horizontal_dim(), 3);
  EXPECT_EQ(load_algebra<Rational>(base + "h3xh3.json")->central_dim(), 2);
}

TEST(AlgebraJson, RejectsBrokenAntisymmetry) {
  const std::string path = std::string(CARNOT_SOURCE_DIR) + "/tests/data/bad_antisym.json";
  try {
    load_algebra<double>(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AntisymmetryViolation);
  }
}

TEST(NormJson, AllVariants) {
  EXPECT_EQ(norm_from_json<double>(Json{{"variant", "l1"}}, 2).kind(), NormD::Kind::L1);
  EXPECT_EQ(norm_from_json<double>(Json{{"variant", "l2"}}, 3).kind(), NormD::Kind::L2);
  EXPECT_EQ(norm_from_json<double>(Json{{"variant", "linf"}}, 2).kind(), NormD::Kind::Linf);
  Json poly = {{"variant", "polytope"},
               {"vertices", Json::array({{1, 0}, {-1, 0}, {0, 1}, {0, -1}})}};
  EXPECT_EQ(norm_from_json<double>(poly, 2).kind(), NormD::Kind::Polytope);
  EXPECT_THROW(norm_from_json<double>(Json{{"variant", "l7"}}, 2), Error);
}

TEST(PathCsv, RoundTrip) {
  auto space = SpaceD::standard(heisenberg_algebra(), NormD::l2(2));
  PathD p(space);
  p.append({1, 0}, 0.5);
  p.append({0.6, 0.8}, 1.25);
  const std::string path = temp_file("path.csv");
  write_path_csv(path, p);
  PathD q = read_path_csv(path, space);
  ASSERT_EQ(q.size(), p.size());
  EXPECT_NEAR(q.length(), p.length(), 1e-14);
  const VecD a = p.endpoint().coords(), b = q.endpoint().coords();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
  std::remove(path.c_str());
}

TEST(ReproHeader, DigestTracksTheConfig) {
  const Json c1 = {{"a", 1}, {"b", "x"}};
  const Json c2 = {{"a", 2}, {"b", "x"}};
  const Json h1 = repro_header(42, c1);
  const Json h1b = repro_header(42, c1);
  const Json h2 = repro_header(42, c2);
  EXPECT_EQ(h1["config_digest"], h1b["config_digest"]);
  EXPECT_NE(h1["config_digest"], h2["config_digest"]);
  EXPECT_EQ(h1["tool"], "carnot");
  EXPECT_EQ(h1["seed"], 42);
}

TEST(ExperimentConfig, ParsesTheShippedFiles) {
  const std::string base = std::string(CARNOT_SOURCE_DIR) + "/configs/experiments/";
  auto h3z = experiment_config_from_json(load_json_file(base + "h3z_standard.json"));
  EXPECT_EQ(h3z.lattice, "h3z");
  EXPECT_EQ(h3z.schedule, (std::vector<int>{8, 12, 16, 20, 24}));
  EXPECT_EQ(h3z.estimator_method, "auto");
  auto skew = experiment_config_from_json(load_json_file(base + "zxh3z_skew.json"));
  EXPECT_EQ(skew.generators, "skew");
  EXPECT_EQ(skew.estimator_method, "solver");
}

TEST(RunExperiment, TaxicabControlReportsExactAgreement) {
  ExperimentConfig cfg;
  cfg.lattice = "z2";
  cfg.generators = "standard";
  cfg.schedule = {4, 8, 12};
  cfg.raw = Json{{"test", "z2"}};
  const std::string dir = temp_file("z2_run");
  auto res = run_experiment(cfg, dir);
  for (const auto& r : res.profile.rows) EXPECT_DOUBLE_EQ(r.discrepancy, 0.0);
  EXPECT_FALSE(res.profile.fit.has_value());
  EXPECT_TRUE(fs::exists(fs::path(dir) / "profile.csv"));
  EXPECT_TRUE(fs::exists(fs::path(dir) / "fit.json"));
  EXPECT_EQ(res.fit_json["alpha"], nullptr);
  fs::remove_all(dir);
}

TEST(RunExperiment, HeisenbergStandardIsBoundedAndReliable) {
  ExperimentConfig cfg;
  cfg.lattice = "h3z";
  cfg.generators = "standard";
  cfg.schedule = {6, 10, 14};
  cfg.sample_cap = 2000;
  cfg.raw = Json{{"test", "h3z"}};
  const std::string dir = temp_file("h3z_run");
  auto res = run_experiment(cfg, dir);
  EXPECT_EQ(res.estimator_used, "closed_form");
  EXPECT_TRUE(res.profile.reliable);
  EXPECT_LE(res.fit_json["max_discrepancy"].get<double>(), 3.0);
  fs::remove_all(dir);
}

TEST(BallCsv, WritesSortedRows) {
  H3ZLattice lat;
  auto sym = symmetrize_generators<H3ZLattice, LatticeElementHash>(lat, lat.standard_generators());
  auto table = bfs_ball(lat, sym, 2);
  const std::string path = temp_file("ball.csv");
  write_ball_csv(path, table);
  std::ifstream in(path);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "c1,c2,c3,word_length");
  EXPECT_EQ(first, "0,0,0,0");
  std::remove(path.c_str());
}

}  // namespace
