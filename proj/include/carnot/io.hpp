#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "carnot/convergence.hpp"

namespace carnot {

using Json = nlohmann::json;

// ---- reproducibility header -------------------------------------------------

inline std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Every artifact carries tool version, seed and a digest of the exact inputs;
// identical seed + config reproduce identical outputs up to the timestamp.
inline Json repro_header(std::uint64_t seed, const Json& config) {
  Json h;
  h["tool"] = "carnot";
  h["version"] = kVersion;
  h["seed"] = seed;
  h["config_digest"] = hex64(fnv1a(config.dump()));
  h["timestamp"] = iso_timestamp();
  return h;
}

// ---- algebra ----------------------------------------------------------------

inline Json algebra_to_json(const AlgebraD& alg) {
  Json j;
  j["n"] = alg.dim();
  j["p"] = alg.horizontal_dim();
  Json brackets = Json::array();
  for (const auto& t : alg.terms())
    if (t.i < t.j)
      brackets.push_back({{"i", t.i + 1}, {"j", t.j + 1}, {"k", t.k + 1}, {"c", t.c}});
  j["brackets"] = brackets;
  if (!alg.names().empty()) j["names"] = alg.names();
  return j;
}

template <class S>
typename NilpotentAlgebra<S>::Handle algebra_from_json(const Json& j) {
  require(j.contains("n") && j.contains("p"), ErrorCode::IoError, "algebra json needs n and p");
  std::vector<BracketEntry> entries;
  if (j.contains("brackets"))
    for (const auto& b : j.at("brackets"))
      entries.push_back({b.at("i").get<int>(), b.at("j").get<int>(), b.at("k").get<int>(),
                         b.at("c").get<double>()});
  std::vector<std::string> names;
  if (j.contains("names")) names = j.at("names").get<std::vector<std::string>>();
  return NilpotentAlgebra<S>::validate(j.at("n").get<int>(), j.at("p").get<int>(), entries,
                                       std::move(names));
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, "invalid json in " + path + ": " + e.what());
  }
  return j;
}

template <class S>
typename NilpotentAlgebra<S>::Handle load_algebra(const std::string& path) {
  return algebra_from_json<S>(load_json_file(path));
}

// ---- norms -------------------------------------------------------------------

template <class S>
Norm<S> norm_from_json(const Json& j, int expected_dim) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "l1") return Norm<S>::l1(expected_dim);
  if (variant == "l2") return Norm<S>::l2(expected_dim);
  if (variant == "linf") return Norm<S>::linf(expected_dim);
  if (variant == "polytope") {
    std::vector<Vector<S>> verts;
    for (const auto& row : j.at("vertices")) {
      Vector<S> v;
      for (const auto& x : row) v.push_back(ScalarOps<S>::from_double(x.get<double>()));
      require(static_cast<int>(v.size()) == expected_dim, ErrorCode::DimensionMismatch,
              "polytope vertex dimension mismatch");
      verts.push_back(std::move(v));
    }
    return Norm<S>::polytope(std::move(verts));
  }
  fail(ErrorCode::IoError, "unknown norm variant: " + variant);
}

template <class S>
Norm<S> load_norm(const std::string& path, int expected_dim) {
  return norm_from_json<S>(load_json_file(path), expected_dim);
}

inline Json norm_to_json(const NormD& n) {
  Json j;
  j["variant"] = n.kind_name();
  if (n.kind() == NormD::Kind::Polytope) j["vertices"] = n.polytope_vertices();
  return j;
}

// ---- CSV artifacts ------------------------------------------------------------

inline void write_path_csv(const std::string& path, const PathD& p) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  const int q = p.space().q();
  for (int i = 0; i < q; ++i) out << "dir" << i + 1 << ",";
  out << "duration\n";
  out << std::setprecision(17);
  for (const auto& seg : p.segments()) {
    for (int i = 0; i < q; ++i) out << seg.direction[static_cast<std::size_t>(i)] << ",";
    out << seg.duration << "\n";
  }
}

inline PathD read_path_csv(const std::string& path, const SpaceD& space) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  PathD p(space);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    VecD row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    require(static_cast<int>(row.size()) == space.q() + 1, ErrorCode::IoError,
            "bad path csv row");
    VecD dir(row.begin(), row.end() - 1);
    p.append(dir, row.back());
  }
  return p;
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  if (traj.points.empty()) return;
  const std::size_t n = traj.points.front().x.size();
  const std::size_t p = traj.points.front().u.size();
  out << "t";
  for (std::size_t i = 0; i < n; ++i) out << ",x" << i + 1;
  for (std::size_t i = 0; i < n; ++i) out << ",xi" << i + 1;
  for (std::size_t i = 0; i < p; ++i) out << ",u" << i + 1;
  out << "\n" << std::setprecision(17);
  for (const auto& pt : traj.points) {
    out << pt.t;
    for (double v : pt.x) out << "," << v;
    for (double v : pt.xi) out << "," << v;
    for (double v : pt.u) out << "," << v;
    out << "\n";
  }
}

template <class Elem, class Hash>
void write_ball_csv(const std::string& path, const BallTable<Elem, Hash>& table) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  std::vector<std::pair<Elem, int>> rows(table.dist.begin(), table.dist.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second, a.first) < std::tie(b.second, b.first);
  });
  bool header = false;
  for (const auto& [elem, d] : rows) {
    if (!header) {
      for (std::size_t i = 0; i < elem.size(); ++i) out << "c" << i + 1 << ",";
      out << "word_length\n";
      header = true;
    }
    for (const auto& c : elem) out << c << ",";
    out << d << "\n";
  }
}

inline void write_profile_csv(const std::string& path, const DiscrepancyProfile& profile) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path);
  out << "n,discrepancy,samples,skipped,method\n" << std::setprecision(17);
  for (const auto& r : profile.rows)
    out << r.n << "," << r.discrepancy << "," << r.samples << "," << r.skipped << ","
        << r.method << "\n";
}

// ---- experiment configuration --------------------------------------------------

struct ExperimentConfig {
  std::string lattice = "h3z";  // h3z | zd | zxh3z
  int zd_dim = 2;
  std::string generators = "standard";  // standard | product | skew | custom
  std::vector<LatticeElement> custom_generators;
  std::vector<int> schedule;
  std::string estimator_method = "auto";  // auto | closed_form | solver
  bool estimator_shooting = false;
  int estimator_segments = 12;
  int estimator_restarts = 2;
  double gap_threshold = 0.5;
  long sample_cap = 10000;
  long sphere_cap = 100000;
  long long element_budget = 200000000;
  std::uint64_t seed = 42;
  bool dump_clouds = false;
  long cloud_cap = 2000;
  Json raw;
};

inline ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig c;
  c.raw = j;
  if (j.contains("lattice")) c.lattice = j.at("lattice").get<std::string>();
  if (j.contains("d")) c.zd_dim = j.at("d").get<int>();
  if (j.contains("generators")) {
    if (j.at("generators").is_string())
      c.generators = j.at("generators").get<std::string>();
    else {
      c.generators = "custom";
      for (const auto& row : j.at("generators"))
        c.custom_generators.push_back(row.get<LatticeElement>());
    }
  }
  require(j.contains("schedule"), ErrorCode::IoError, "experiment config needs a schedule");
  c.schedule = j.at("schedule").get<std::vector<int>>();
  if (j.contains("estimator")) {
    const auto& e = j.at("estimator");
    if (e.contains("method")) c.estimator_method = e.at("method").get<std::string>();
    if (e.contains("shooting")) c.estimator_shooting = e.at("shooting").get<bool>();
    if (e.contains("segments")) c.estimator_segments = e.at("segments").get<int>();
    if (e.contains("restarts")) c.estimator_restarts = e.at("restarts").get<int>();
    if (e.contains("gap_threshold")) c.gap_threshold = e.at("gap_threshold").get<double>();
    if (e.contains("sample_cap")) c.sample_cap = e.at("sample_cap").get<long>();
    if (e.contains("sphere_cap")) c.sphere_cap = e.at("sphere_cap").get<long>();
  }
  if (j.contains("budget")) c.element_budget = j.at("budget").get<long long>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    if (o.contains("clouds")) c.dump_clouds = o.at("clouds").get<bool>();
    if (o.contains("cloud_cap")) c.cloud_cap = o.at("cloud_cap").get<long>();
  }
  return c;
}

struct ExperimentResult {
  DiscrepancyProfile profile;
  Json fit_json;
  std::string estimator_used;
};

namespace io_detail {

template <class L>
ExperimentResult run_experiment_on(const L& lattice,
                                   std::vector<std::decay_t<decltype(std::declval<L>().identity())>> gens,
                                   const ExperimentConfig& cfg, const std::string& out_dir,
                                   unsigned threads) {
  namespace fs = std::filesystem;
  using Elem = std::decay_t<decltype(std::declval<L>().identity())>;
  gens = symmetrize_generators<L, LatticeElementHash>(lattice, std::move(gens));
  int max_n = 0;
  for (int n : cfg.schedule) max_n = std::max(max_n, n);

  BfsOptions bopts;
  bopts.element_budget = cfg.element_budget;
  auto ball = bfs_ball<L>(lattice, gens, max_n, bopts);
  require(ball.complete, ErrorCode::BudgetExceeded,
          "ball of radius " + std::to_string(max_n) + " exceeded the element budget (completed " +
              std::to_string(ball.completed_radius) + ")");

  // Asymptotic-cone metric: standard polarized space with the hull norm.
  NormD cone_norm = cone_norm_from_generators(lattice, gens);
  SpaceD cone(SpaceD::standard(lattice.algebra_d(), cone_norm));

  DistanceOptions dopts;
  dopts.want_witness = false;
  dopts.use_shooting = cfg.estimator_shooting;
  dopts.path.segments = cfg.estimator_segments;
  dopts.path.restarts = cfg.estimator_restarts;
  dopts.shoot.restarts = 8;
  dopts.shoot.seed = cfg.seed;
  dopts.path.seed = cfg.seed + 1;
  DistanceEstimator base(cone, dopts);
  std::string estimator_used;
  if (cfg.estimator_method == "closed_form") {
    require(base.has_closed_form(), ErrorCode::InvalidArgument,
            "closed-form estimator requested but not available for this cone");
    dopts.use_closed_form = true;
    estimator_used = "closed_form";
  } else if (cfg.estimator_method == "auto") {
    dopts.use_closed_form = base.has_closed_form();
    estimator_used = dopts.use_closed_form ? "closed_form" : "solver";
  } else {
    estimator_used = "solver";
  }
  DistanceEstimator estimator(cone, dopts);
  auto eval = [&](const VecD& coords) {
    return estimator.estimate(ElementD(cone.algebra(), coords));
  };

  PointwiseOptions popts;
  popts.sample_cap = cfg.sample_cap;
  popts.full_sphere_cap = cfg.sphere_cap;
  popts.gap_threshold = cfg.gap_threshold;
  popts.seed = cfg.seed;
  popts.threads = threads;

  ExperimentResult result;
  result.estimator_used = estimator_used;
  result.profile = discrepancy_profile<L>(lattice, ball, cfg.schedule, eval, popts);

  fs::create_directories(out_dir);
  write_profile_csv((fs::path(out_dir) / "profile.csv").string(), result.profile);

  if (cfg.dump_clouds) {
    for (int n : cfg.schedule) {
      if (n == 0) continue;
      std::ofstream out((fs::path(out_dir) / ("cloud_" + std::to_string(n) + ".csv")).string());
      out << std::setprecision(17);
      auto sphere = ball.sphere(n);
      Rng rng(cfg.seed + 1000 + static_cast<std::uint64_t>(n));
      long emitted = 0;
      for (const auto& e : sphere) {
        if (emitted >= cfg.cloud_cap) break;
        if (static_cast<long>(sphere.size()) > cfg.cloud_cap &&
            rng.uniform() > static_cast<double>(cfg.cloud_cap) / static_cast<double>(sphere.size()))
          continue;
        VecD coords = vec::to_dbl(lattice.embed(e));
        const VecD scaled = lattice.algebra_d()->dilate(1.0 / n, coords);
        for (std::size_t i = 0; i < scaled.size(); ++i)
          out << scaled[i] << (i + 1 < scaled.size() ? ',' : '\n');
        ++emitted;
      }
    }
  }

  Json fit;
  fit["header"] = repro_header(cfg.seed, cfg.raw);
  fit["estimator"] = estimator_used;
  fit["exclusion_rate"] = result.profile.exclusion_rate;
  fit["reliable"] = result.profile.reliable;
  if (result.profile.fit) {
    fit["alpha"] = result.profile.fit->alpha;
    fit["alpha_stderr"] = result.profile.fit->stderr_alpha;
    fit["used_rows"] = result.profile.fit->used_rows;
    fit["zero_rows"] = result.profile.fit->zero_rows;
  } else {
    fit["alpha"] = nullptr;
    fit["note"] = result.profile.note.empty() ? "no usable rows" : result.profile.note;
  }
  if (result.profile.scaled_fit) {
    fit["scaled_alpha"] = result.profile.scaled_fit->alpha;
    fit["scaled_alpha_stderr"] = result.profile.scaled_fit->stderr_alpha;
  }
  double max_all = 0.0, max_early = 0.0;
  for (std::size_t i = 0; i < result.profile.rows.size(); ++i) {
    max_all = std::max(max_all, result.profile.rows[i].discrepancy);
    if (i < 2) max_early = std::max(max_early, result.profile.rows[i].discrepancy);
  }
  fit["max_discrepancy"] = max_all;
  fit["early_max_discrepancy"] = max_early;
  fit["bounded_increase"] = max_all - max_early;
  result.fit_json = fit;

  std::ofstream out((fs::path(out_dir) / "fit.json").string());
  out << fit.dump(2) << "\n";
  return result;
}

}  // namespace io_detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                       unsigned threads = 1) {
  if (cfg.lattice == "h3z") {
    H3ZLattice lat;
    std::vector<LatticeElement> gens;
    if (cfg.generators == "standard")
      gens = lat.standard_generators();
    else if (cfg.generators == "custom")
      gens = cfg.custom_generators;
    else
      fail(ErrorCode::InvalidArgument, "unknown generator preset for h3z: " + cfg.generators);
    return io_detail::run_experiment_on(lat, gens, cfg, out_dir, threads);
  }
  if (cfg.lattice == "zd" || cfg.lattice == "z2") {
    ZdLattice lat(cfg.lattice == "z2" ? 2 : cfg.zd_dim);
    std::vector<LatticeElement> gens;
    if (cfg.generators == "standard")
      gens = lat.standard_generators();
    else if (cfg.generators == "custom")
      gens = cfg.custom_generators;
    else
      fail(ErrorCode::InvalidArgument, "unknown generator preset for zd: " + cfg.generators);
    return io_detail::run_experiment_on(lat, gens, cfg, out_dir, threads);
  }
  if (cfg.lattice == "zxh3z") {
    ZxH3ZLattice lat;
    std::vector<LatticeElement> gens;
    if (cfg.generators == "product")
      gens = lat.product_generators();
    else if (cfg.generators == "skew")
      gens = lat.skew_generators();
    else if (cfg.generators == "custom")
      gens = cfg.custom_generators;
    else
      fail(ErrorCode::InvalidArgument, "unknown generator preset for zxh3z: " + cfg.generators);
    return io_detail::run_experiment_on(lat, gens, cfg, out_dir, threads);
  }
  fail(ErrorCode::InvalidArgument, "unknown lattice preset: " + cfg.lattice);
}

}  // namespace carnot
