// Command-line front end: every library operation behind one binary with
// file-based configs and machine-readable outputs.
//
// Exit codes: 0 success, 2 domain error, 3 budget exhaustion, 1 unexpected.

#include <CLI11.hpp>
#include <iostream>

#include "carnot/distance.hpp"
#include "carnot/io.hpp"

namespace {

using namespace carnot;

VecD parse_csv_doubles(const std::string& text) {
  VecD out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << std::endl;
  } else {
    std::ofstream out(out_path);
    require(out.good(), ErrorCode::IoError, "cannot write " + out_path);
    out << j.dump(2) << "\n";
  }
}

NormD load_norm_or_default(const std::string& path, int dim) {
  if (path.empty()) return NormD::l2(dim);
  return load_norm<double>(path, dim);
}

Json json_config(const std::vector<std::pair<std::string, Json>>& kv) {
  Json j;
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

struct GlobalFlags {
  std::uint64_t seed = 42;
  unsigned threads = std::thread::hardware_concurrency();
};

int cmd_validate(const std::string& algebra_path, const std::string& out, const GlobalFlags& g) {
  auto alg = load_algebra<double>(algebra_path);
  Json j;
  j["header"] = repro_header(g.seed, json_config({{"algebra", algebra_path}}));
  j["valid"] = true;
  j["algebra"] = algebra_to_json(*alg);
  emit(j, out);
  return 0;
}

int cmd_nonsingular(const std::string& algebra_path, long samples, int restarts,
                    const std::string& out, const GlobalFlags& g) {
  auto alg = load_algebra<double>(algebra_path);
  ClassifyOptions opts;
  opts.samples = samples;
  opts.restarts = restarts;
  opts.seed = g.seed;
  const SingularityReport rep = classify(alg, opts, g.threads);
  Json j;
  j["header"] = repro_header(
      g.seed, json_config({{"algebra", algebra_path}, {"samples", samples}, {"restarts", restarts}}));
  j["verdict"] = rep.verdict_name();
  if (rep.nonsingular() && std::isfinite(rep.epsilon)) j["epsilon"] = rep.epsilon;
  if (rep.singular()) {
    j["witness"] = rep.witness;
    j["covector"] = rep.covector;
    j["residual"] = rep.witness_residual;
  }
  j["observed_min"] = rep.observed_min;
  j["samples"] = rep.samples;
  j["exact"] = rep.exact;
  j["note"] = rep.note;
  emit(j, out);
  return 0;
}

int cmd_abnormal(const std::string& algebra_path, const std::string& norm_path,
                 const std::string& witness_csv, const std::string& covector_csv, int samples,
                 const std::string& path_out, const std::string& out, const GlobalFlags& g) {
  auto alg = load_algebra<double>(algebra_path);
  NormD norm = load_norm_or_default(norm_path, alg->horizontal_dim());
  SpaceD space = SpaceD::standard(alg, norm);
  Json j;
  j["header"] = repro_header(g.seed, json_config({{"algebra", algebra_path}, {"norm", norm_path}}));

  VecD u_star, xi_star;
  if (!witness_csv.empty()) {
    u_star = parse_csv_doubles(witness_csv);
    require(!covector_csv.empty(), ErrorCode::InvalidArgument,
            "--covector is required with --witness");
    xi_star = parse_csv_doubles(covector_csv);
  } else {
    ClassifyOptions copts;
    copts.seed = g.seed;
    const SingularityReport rep = classify(alg, copts, g.threads);
    j["verdict"] = rep.verdict_name();
    if (!rep.singular()) {
      j["abnormal"] = nullptr;
      j["note"] = "group is " + std::string(rep.verdict_name()) +
                  ": only constant abnormal geodesics exist";
      emit(j, out);
      return 0;
    }
    u_star = rep.witness;
    xi_star = rep.covector;
  }

  const AbnormalExtremal ab = abnormal_from_witness(space, u_star, xi_star, samples);
  j["witness"] = ab.control;
  j["covector"] = xi_star;
  j["certification_residual"] = ab.certification_residual;
  j["pmp2_residual"] = ab.pmp2_residual;
  j["pmp3_residual"] = ab.pmp3_residual;
  const AbnormalCheck chk = is_abnormal(*alg, ab.trajectory);
  j["is_abnormal"] = chk.abnormal;
  j["momenta_residual"] = chk.residual;
  if (!path_out.empty()) {
    write_path_csv(path_out, ab.path);
    j["path_csv"] = path_out;
  }
  emit(j, out);
  return 0;
}

int cmd_geodesic(const std::string& algebra_path, const std::string& norm_path,
                 const std::string& xi0_csv, double time, int steps, const std::string& traj_out,
                 const std::string& out, const GlobalFlags& g) {
  auto alg = load_algebra<double>(algebra_path);
  NormD norm = load_norm_or_default(norm_path, alg->horizontal_dim());
  VecD xi0 = parse_csv_doubles(xi0_csv);
  require(static_cast<int>(xi0.size()) == alg->dim(), ErrorCode::DimensionMismatch,
          "--xi0 must have n components");
  ExtremalState s0{vec::zero<double>(alg->dim()), xi0, -1.0, 0.0};
  const Trajectory traj = integrate_extremal(*alg, norm, s0, time, steps);
  Json j;
  j["header"] = repro_header(g.seed, json_config({{"algebra", algebra_path},
                                                  {"norm", norm_path},
                                                  {"xi0", xi0},
                                                  {"time", time},
                                                  {"steps", steps}}));
  j["endpoint"] = traj.points.back().x;
  j["length"] = time;
  j["switches"] = traj.switch_count;
  j["hamiltonian_drift"] = hamiltonian_drift(*alg, norm, traj);
  const AbnormalCheck chk = is_abnormal(*alg, traj);
  j["is_abnormal"] = chk.abnormal;
  j["momenta_residual"] = chk.residual;
  if (!traj_out.empty()) {
    write_trajectory_csv(traj_out, traj);
    j["trajectory_csv"] = traj_out;
  }
  emit(j, out);
  return 0;
}

int cmd_distance(const std::string& algebra_path, const std::string& norm_path,
                 const std::string& target_csv, int segments, int restarts, bool closed_form,
                 bool no_shooting, bool no_paths, const std::string& witness_out,
                 const std::string& out, const GlobalFlags& g) {
  auto alg = load_algebra<double>(algebra_path);
  NormD norm = load_norm_or_default(norm_path, alg->horizontal_dim());
  SpaceD space = SpaceD::standard(alg, norm);
  VecD target = parse_csv_doubles(target_csv);
  require(static_cast<int>(target.size()) == alg->dim(), ErrorCode::DimensionMismatch,
          "--target must have n components");

  DistanceOptions opts;
  opts.use_closed_form = closed_form;
  opts.use_shooting = !no_shooting;
  opts.use_paths = !no_paths;
  opts.path.segments = segments;
  opts.shoot.restarts = restarts;
  opts.shoot.seed = g.seed;
  opts.path.seed = g.seed + 1;
  DistanceEstimator estimator(space, opts);
  const DistanceEstimate est = estimator.estimate(ElementD(alg, target));

  Json j;
  j["header"] = repro_header(g.seed, json_config({{"algebra", algebra_path},
                                                  {"norm", norm_path},
                                                  {"target", target},
                                                  {"segments", segments},
                                                  {"restarts", restarts}}));
  j["target"] = target;
  j["lower"] = est.lower;
  j["upper"] = est.upper;
  j["lower_method"] = est.lower_method;
  j["upper_method"] = est.upper_method;
  j["gap"] = est.gap();
  if (est.lower_clamped) j["lower_clamped"] = true;
  if (est.shooting_covector) j["shooting_covector"] = *est.shooting_covector;
  if (est.witness) {
    j["witness_segments"] = est.witness->size();
    j["witness_length"] = est.witness->length();
    j["endpoint_gap"] = est.witness_endpoint_gap;
    if (!witness_out.empty()) {
      write_path_csv(witness_out, *est.witness);
      j["witness_csv"] = witness_out;
    }
  }
  emit(j, out);
  return 0;
}

int cmd_wordball(const std::string& lattice, int zd_dim, const std::string& gens, int radius,
                 long long budget, const std::string& csv_out, const std::string& out,
                 const GlobalFlags& g) {
  BfsOptions opts;
  opts.element_budget = budget;
  Json j;
  j["header"] = repro_header(g.seed, json_config({{"lattice", lattice},
                                                  {"gens", gens},
                                                  {"radius", radius},
                                                  {"budget", budget}}));
  auto finish = [&](auto& lat, auto& table) -> int {
    j["lattice"] = lat.name();
    j["complete"] = table.complete;
    j["completed_radius"] = table.completed_radius;
    j["sphere_sizes"] = table.sphere_sizes;
    j["ball_size"] = table.ball_size();
    if (table.completed_radius >= 8) {
      j["growth_fit"] = growth_degree_fit(table, std::max(4, table.completed_radius / 2),
                                          table.completed_radius);
    }
    if (!csv_out.empty()) {
      write_ball_csv(csv_out, table);
      j["ball_csv"] = csv_out;
    }
    emit(j, out);
    if (!table.complete) {
      std::cerr << Json({{"error", {{"code", "BudgetExceeded"},
                                    {"message", "ball truncated at radius " +
                                                    std::to_string(table.completed_radius)}}}})
                       .dump()
                << std::endl;
      return 3;
    }
    return 0;
  };

  if (lattice == "h3z") {
    H3ZLattice lat;
    auto sym = symmetrize_generators<H3ZLattice, LatticeElementHash>(lat, lat.standard_generators());
    auto table = bfs_ball(lat, sym, radius, opts);
    return finish(lat, table);
  }
  if (lattice == "zd" || lattice == "z2") {
    ZdLattice lat(lattice == "z2" ? 2 : zd_dim);
    auto sym = symmetrize_generators<ZdLattice, LatticeElementHash>(lat, lat.standard_generators());
    auto table = bfs_ball(lat, sym, radius, opts);
    return finish(lat, table);
  }
  if (lattice == "zxh3z") {
    ZxH3ZLattice lat;
    std::vector<LatticeElement> raw;
    if (gens == "product")
      raw = lat.product_generators();
    else if (gens == "skew")
      raw = lat.skew_generators();
    else
      fail(ErrorCode::InvalidArgument, "zxh3z generators must be 'product' or 'skew'");
    auto sym = symmetrize_generators<ZxH3ZLattice, LatticeElementHash>(lat, raw);
    auto table = bfs_ball(lat, sym, radius, opts);
    return finish(lat, table);
  }
  fail(ErrorCode::InvalidArgument, "unknown lattice preset: " + lattice);
}

int cmd_converge(const std::string& config_path, const std::string& out_dir,
                 const GlobalFlags& g) {
  Json cfg_json = load_json_file(config_path);
  ExperimentConfig cfg = experiment_config_from_json(cfg_json);
  const ExperimentResult res = run_experiment(cfg, out_dir, g.threads);
  std::cout << res.fit_json.dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carnot: subFinsler geometry of 2-step nilpotent groups"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--seed", g.seed, "seed for all randomized components");
  app.add_option("--threads", g.threads, "parallelism cap");

  std::string algebra_path, norm_path, out_path;

  auto* validate = app.add_subcommand("validate", "validate an algebra spec file");
  validate->add_option("--algebra", algebra_path, "algebra json")->required();
  validate->add_option("--out", out_path, "output json path (default stdout)");

  long ns_samples = 100000;
  int ns_restarts = 64;
  auto* nonsingular = app.add_subcommand("nonsingular", "non-singularity verdict");
  nonsingular->add_option("--algebra", algebra_path, "algebra json")->required();
  nonsingular->add_option("--samples", ns_samples, "sphere samples");
  nonsingular->add_option("--restarts", ns_restarts, "local descent restarts");
  nonsingular->add_option("--out", out_path, "output json path");

  std::string witness_csv, covector_csv, path_out;
  int ab_samples = 100;
  auto* abnormal = app.add_subcommand("abnormal", "construct and verify an abnormal extremal");
  abnormal->add_option("--algebra", algebra_path, "algebra json")->required();
  abnormal->add_option("--norm", norm_path, "norm json (default l2)");
  abnormal->add_option("--witness", witness_csv, "witness u* as comma list (default: classify)");
  abnormal->add_option("--covector", covector_csv, "covector xi* as comma list");
  abnormal->add_option("--samples", ab_samples, "verification sample count");
  abnormal->add_option("--path-out", path_out, "write the abnormal path as csv");
  abnormal->add_option("--out", out_path, "output json path");

  std::string xi0_csv, traj_out;
  double geo_time = 1.0;
  int geo_steps = 1024;
  auto* geodesic = app.add_subcommand("geodesic", "integrate a PMP extremal");
  geodesic->add_option("--algebra", algebra_path, "algebra json")->required();
  geodesic->add_option("--norm", norm_path, "norm json (default l2)");
  geodesic->add_option("--xi0", xi0_csv, "initial covector, comma list")->required();
  geodesic->add_option("--time", geo_time, "integration time");
  geodesic->add_option("--steps", geo_steps, "sample steps");
  geodesic->add_option("--traj-out", traj_out, "trajectory csv path");
  geodesic->add_option("--out", out_path, "output json path");

  std::string target_csv, witness_out;
  int d_segments = 64, d_restarts = 32;
  bool d_closed_form = false, d_no_shooting = false, d_no_paths = false;
  auto* distance = app.add_subcommand("distance", "two-sided subFinsler distance estimate");
  distance->add_option("--algebra", algebra_path, "algebra json")->required();
  distance->add_option("--norm", norm_path, "norm json (default l2)");
  distance->add_option("--target", target_csv, "target exponential coordinates")->required();
  distance->add_option("--segments", d_segments, "path segments");
  distance->add_option("--restarts", d_restarts, "shooting restarts");
  distance->add_flag("--closed-form", d_closed_form, "use exact closed forms when available");
  distance->add_flag("--no-shooting", d_no_shooting, "disable the shooting method");
  distance->add_flag("--no-paths", d_no_paths, "disable the path optimizer");
  distance->add_option("--witness-out", witness_out, "witness path csv");
  distance->add_option("--out", out_path, "output json path");

  std::string wb_lattice = "h3z", wb_gens = "standard", wb_csv;
  int wb_radius = 10, wb_zd_dim = 2;
  long long wb_budget = 200000000;
  auto* wordball = app.add_subcommand("wordball", "exact word-metric balls by BFS");
  wordball->add_option("--lattice", wb_lattice, "h3z | zd | z2 | zxh3z");
  wordball->add_option("--d", wb_zd_dim, "dimension for zd");
  wordball->add_option("--gens", wb_gens, "standard | product | skew");
  wordball->add_option("--radius", wb_radius, "ball radius")->required();
  wordball->add_option("--budget", wb_budget, "element budget");
  wordball->add_option("--out", wb_csv, "ball csv path");
  std::string wb_summary;
  wordball->add_option("--summary", wb_summary, "summary json path (default stdout)");

  std::string cfg_path, out_dir = ".";
  auto* converge = app.add_subcommand("converge", "asymptotic-cone convergence experiment");
  converge->add_option("--config", cfg_path, "experiment config json")->required();
  converge->add_option("--out-dir", out_dir, "artifact directory");

  try {
    app.parse(argc, argv);
    if (validate->parsed()) return cmd_validate(algebra_path, out_path, g);
    if (nonsingular->parsed())
      return cmd_nonsingular(algebra_path, ns_samples, ns_restarts, out_path, g);
    if (abnormal->parsed())
      return cmd_abnormal(algebra_path, norm_path, witness_csv, covector_csv, ab_samples, path_out,
                          out_path, g);
    if (geodesic->parsed())
      return cmd_geodesic(algebra_path, norm_path, xi0_csv, geo_time, geo_steps, traj_out,
                          out_path, g);
    if (distance->parsed())
      return cmd_distance(algebra_path, norm_path, target_csv, d_segments, d_restarts,
                          d_closed_form, d_no_shooting, d_no_paths, witness_out, out_path, g);
    if (wordball->parsed())
      return cmd_wordball(wb_lattice, wb_zd_dim, wb_gens, wb_radius, wb_budget, wb_csv, wb_summary,
                          g);
    if (converge->parsed()) return cmd_converge(cfg_path, out_dir, g);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const carnot::Error& e) {
    carnot::Json err;
    err["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    std::cerr << err.dump() << std::endl;
    return e.code() == carnot::ErrorCode::BudgetExceeded ? 3 : 2;
  } catch (const std::exception& e) {
    carnot::Json err;
    err["error"] = {{"code", "Unexpected"}, {"message", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 1;
  }
}
