#pragma once

#include <filesystem>

#include "faultscout/config.hpp"
#include "faultscout/fault2d.hpp"
#include "faultscout/fault3d.hpp"
#include "faultscout/io.hpp"
#include "faultscout/mcda.hpp"
#include "faultscout/scattering.hpp"
#include "faultscout/test_problems.hpp"

namespace faultscout {

struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Demo decision problem: electric / combustion / hybrid vehicle attitudes
/// over five aggregated criteria, with the survey weighting used alongside.
inline PerformanceMatrix demo_vehicle_matrix() {
  PerformanceMatrix pm;
  pm.alternatives = {"BEV", "ICE", "HEV"};
  pm.criteria = {"Ecological", "Economic", "Social", "Comfort", "Other"};
  pm.scores.resize(3, 5);
  pm.scores << 0.5025, 0.2792, 0.6250, 0.1497, 0.1342,
               0.1256, 0.4167, 0.1250, 0.4300, 0.6710,
               0.3719, 0.3042, 0.2500, 0.4202, 0.1948;
  pm.benefit.assign(5, true);
  return pm;
}

inline std::vector<double> demo_vehicle_weights() { return {2.0, 7.0, 0.1, 8.0, 0.0}; }

struct McdaSetup {
  PerformanceMatrix matrix;
  SimplexEmbedding embedding{3, {0, 1, 2}, Eigen::VectorXd::Zero(3)};
  std::array<Vec2, 3> triangle{};  // chart image of the simplex vertices
};

inline McdaSetup make_mcda_setup(const RunConfig& cfg) {
  McdaSetup setup;
  setup.matrix =
      cfg.mcda_matrix.empty() ? demo_vehicle_matrix() : load_performance_matrix(cfg.mcda_matrix);
  std::vector<double> weights = cfg.mcda_weights.empty() ? demo_vehicle_weights()
                                                         : cfg.mcda_weights;
  if (static_cast<int>(weights.size()) != setup.matrix.scores.cols())
    throw ConfigError("mcda_weights: expected one weight per criterion");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0) throw ConfigError("mcda_weights: weights must be nonnegative");
    sum += w;
  }
  if (!(sum > 0)) throw ConfigError("mcda_weights: weights must not all vanish");

  std::vector<std::string> variable = cfg.mcda_variable;
  if (variable.empty()) variable = {"Ecological", "Economic", "Comfort"};
  if (variable.size() != 3)
    throw ConfigError("mcda_variable: 2D decision charts need exactly 3 variable criteria");
  std::vector<int> index;
  for (const auto& name : variable) {
    auto it = std::find(setup.matrix.criteria.begin(), setup.matrix.criteria.end(), name);
    if (it == setup.matrix.criteria.end())
      throw ConfigError("mcda_variable: unknown criterion '" + name + "'");
    index.push_back(static_cast<int>(it - setup.matrix.criteria.begin()));
  }

  Eigen::VectorXd fixed = Eigen::VectorXd::Zero(setup.matrix.scores.cols());
  for (int j = 0; j < fixed.size(); ++j) fixed[j] = weights[j] / sum;
  for (int k : index) fixed[k] = 0.0;
  setup.embedding = SimplexEmbedding(3, index, fixed);

  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd vertex = fixed;
    vertex[index[k]] = setup.embedding.scale();
    const Eigen::VectorXd img = setup.embedding.embed(vertex);
    setup.triangle[k] = Vec2(img[0], img[1]);
  }
  return setup;
}

inline double distance_to_triangle(const Vec2& p, const std::array<Vec2, 3>& tri) {
  auto side = [](const Vec2& a, const Vec2& b, const Vec2& q) {
    return (b - a)[0] * (q - a)[1] - (b - a)[1] * (q - a)[0];
  };
  const double s1 = side(tri[0], tri[1], p), s2 = side(tri[1], tri[2], p),
               s3 = side(tri[2], tri[0], p);
  if ((s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0)) return 0.0;
  return std::min({point_segment_distance(p, tri[0], tri[1]),
                   point_segment_distance(p, tri[1], tri[2]),
                   point_segment_distance(p, tri[2], tri[0])});
}

struct RunArtifacts {
  int dim = 2;
  std::vector<std::string> csv_files;
  std::vector<std::string> ply_files;
  std::string svg_file;
  std::string ledger_file;
  std::string manifest_file;
  EvalLedger ledger;
};

namespace detail {

template <int Dim>
BoxDomain<Dim> config_domain(const RunConfig& cfg, const BoxDomain<Dim>& fallback) {
  if (!cfg.domain_lower && !cfg.domain_upper) return fallback;
  if (!cfg.domain_lower || !cfg.domain_upper)
    throw ConfigError("domain_lower and domain_upper must be given together");
  if (cfg.domain_lower->size() != Dim || cfg.domain_upper->size() != Dim)
    throw ConfigError("domain bounds must have " + std::to_string(Dim) + " entries");
  Vec<Dim> lo, hi;
  for (int d = 0; d < Dim; ++d) {
    lo[d] = (*cfg.domain_lower)[d];
    hi[d] = (*cfg.domain_upper)[d];
  }
  try {
    return BoxDomain<Dim>(lo, hi);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

inline void write_manifest(const std::string& path, const RunConfig& cfg, const Params& params,
                           int dim, const std::vector<double>& lower,
                           const std::vector<double>& upper, std::size_t n_init,
                           const std::vector<int>& class_map,
                           const std::map<FaultKey, std::vector<bool>>& closed_flags) {
  io::KeyValueFile kv;
  kv.set("problem", cfg.problem);
  kv.set("dim", dim);
  kv.set("n_init", n_init);
  kv.set("deterministic", std::string(cfg.deterministic ? "true" : "false"));
  std::ostringstream lo, hi;
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (d) lo << ",";
    lo << io::format_double(lower[d]);
  }
  for (std::size_t d = 0; d < upper.size(); ++d) {
    if (d) hi << ",";
    hi << io::format_double(upper[d]);
  }
  kv.set("domain_lower", lo.str());
  kv.set("domain_upper", hi.str());
  kv.set("eps_b", params.eps_b);
  kv.set("eps_gap", params.eps_gap);
  kv.set("eps_err", params.eps_err);
  kv.set("eps_coarse", params.eps_coarse);
  kv.set("eps_safemin", params.eps_safemin);
  kv.set("eps_safemax", params.eps_safemax);
  kv.set("eps_cluster", params.eps_cluster);
  kv.set("k_near", params.k_near);
  kv.set("k_sort", params.k_sort);
  kv.set("k_extra", params.k_extra);
  kv.set("k_rep", params.k_rep);
  kv.set("k_adap", params.k_adap);
  kv.set("beta_angle", params.beta_angle);
  kv.set("beta_growth", params.beta_growth);
  kv.set("alpha_expand", params.alpha_expand);
  kv.set("alpha_expbound", params.alpha_expbound);
  kv.set("rbf_shape_scale", params.rbf_shape_scale);
  kv.set("morozov_max_iter", params.morozov_max_iter);
  kv.set("min_triangle_angle_deg", params.min_triangle_angle_deg);
  kv.set("gap_edge_fraction", params.gap_edge_fraction);
  kv.set("max_fill_passes", params.max_fill_passes);

  std::ostringstream cm;
  for (std::size_t k = 0; k < class_map.size(); ++k) {
    if (k) cm << ",";
    cm << (k + 1) << ":" << class_map[k];
  }
  kv.set("class_map", cm.str());
  for (const auto& [key, flags] : closed_flags) {
    std::ostringstream fl;
    for (std::size_t k = 0; k < flags.size(); ++k) {
      if (k) fl << ",";
      fl << (flags[k] ? 1 : 0);
    }
    kv.set("closed_" + std::to_string(key.first) + "_" + std::to_string(key.second), fl.str());
  }
  kv.save(path);
}

template <int Dim, class Result>
RunArtifacts emit_artifacts(const RunConfig& cfg, const Params& params,
                            const ClassifierHandle<Dim>& h, const Result& result,
                            std::size_t n_init) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  RunArtifacts artifacts;
  artifacts.dim = Dim;
  artifacts.ledger = result.ledger;

  std::map<FaultKey, std::vector<bool>> closed_flags;
  for (const auto& [key, fault] : result.final) {
    const std::string file = (fs::path(cfg.out_dir) / io::fault_filename(key)).string();
    io::write_triplet_csv<Dim>(file, fault);
    artifacts.csv_files.push_back(file);
    std::vector<bool> flags(fault.component_count());
    for (std::size_t c = 0; c < flags.size(); ++c) flags[c] = fault.closed(c);
    closed_flags[key] = flags;
    if constexpr (Dim == 3) {
      const std::string ply =
          (fs::path(cfg.out_dir) / ("fault_" + std::to_string(key.first) + "_" +
                                    std::to_string(key.second) + ".ply"))
              .string();
      io::write_ply(ply, fault);
      artifacts.ply_files.push_back(ply);
    }
  }
  if constexpr (Dim == 2) {
    artifacts.svg_file = (fs::path(cfg.out_dir) / "overlay.svg").string();
    std::ofstream svg(artifacts.svg_file, std::ios::binary);
    svg << io::render_svg<2>(result.final, h.domain());
  }

  artifacts.ledger_file = (fs::path(cfg.out_dir) / "ledger.txt").string();
  std::ofstream ledger(artifacts.ledger_file, std::ios::binary);
  ledger << io::ledger_report(result.ledger);

  std::vector<double> lo(Dim), hi(Dim);
  for (int d = 0; d < Dim; ++d) {
    lo[d] = h.domain().lower[d];
    hi[d] = h.domain().upper[d];
  }
  artifacts.manifest_file = (fs::path(cfg.out_dir) / "manifest.txt").string();
  write_manifest(artifacts.manifest_file, cfg, params, Dim, lo, hi, n_init, h.class_map(),
                 closed_flags);
  return artifacts;
}

}  // namespace detail

/// Runs the configured problem end to end and writes all artifacts (triplet
/// CSVs, evaluation ledger, manifest, SVG overlay or PLY point clouds).
inline RunArtifacts cmd_run(const RunConfig& cfg) {
  Params params = cfg.params;

  const std::set<std::string> flat{"tp1", "tp3", "tp4", "tp5"};
  if (flat.count(cfg.problem)) {
    const std::size_t n_init = cfg.n_init ? cfg.n_init : 50;
    BoxDomain<2> box = detail::config_domain<2>(cfg, BoxDomain<2>(Vec2(0, 0), Vec2(1, 1)));
    const std::string name = cfg.problem;
    ClassifierHandle<2> h([name](const Vec2& p) { return classify_testproblem(name, p); }, box);
    auto result = run2d(h, params, n_init);
    return detail::emit_artifacts<2>(cfg, params, h, result, n_init);
  }
  if (cfg.problem == "tp2_3d") {
    const std::size_t n_init = cfg.n_init ? cfg.n_init : 200;
    BoxDomain<3> box =
        detail::config_domain<3>(cfg, BoxDomain<3>(Vec3(0, 0, 0), Vec3(1, 1, 1)));
    ClassifierHandle<3> h(tp2_3d, box);
    auto result = run3d(h, params, n_init);
    return detail::emit_artifacts<3>(cfg, params, h, result, n_init);
  }
  if (cfg.problem == "mcda") {
    auto setup = make_mcda_setup(cfg);
    const double c_f = setup.embedding.scale();
    if (!cfg.eps_gap_given) {
      params.eps_gap *= c_f;
      if (!cfg.eps_cluster_given) params.eps_cluster = params.eps_gap / 5.0;
    }
    BoxDomain<2> box = detail::config_domain<2>(
        cfg, BoxDomain<2>(Vec2(c_f * -0.9, c_f * -0.9), Vec2(c_f * 0.4083, c_f * 0.9)));
    const std::size_t n_init = cfg.n_init ? cfg.n_init : 100;

    auto classify = mcda_classifier(setup.matrix, setup.embedding);
    ClassifierHandle<2> h(classify, box, /*outside_raw=*/0);
    const auto triangle = setup.triangle;
    const double band = params.eps_gap;
    auto keep = [triangle, band](const Vec2& p) {
      return distance_to_triangle(p, triangle) <= band;
    };
    auto result = run2d(h, params, n_init, keep);
    return detail::emit_artifacts<2>(cfg, params, h, result, n_init);
  }
  if (cfg.problem == "scatter") {
    if (cfg.scatter_file.empty()) throw ConfigError("scatter runs need scatter_file");
    if (!(cfg.scatter_threshold > 0))
      throw ConfigError("scatter runs need a positive scatter_threshold");
    FarFieldData data;
    try {
      data = load_farfield(cfg.scatter_file);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    data.truncation = cfg.svd_truncation > 0 ? cfg.svd_truncation : data.m;
    data.conjugate_expansion = cfg.svd_conjugate;

    const std::size_t n_init = cfg.n_init ? cfg.n_init : 200;
    BoxDomain<3> box = detail::config_domain<3>(
        cfg, BoxDomain<3>(Vec3(-1.5, -1.5, -1.5), Vec3(1.5, 1.5, 1.5)));
    ClassifierHandle<3> h(inside_classifier(data, cfg.scatter_threshold), box);
    auto result = run3d(h, params, n_init);
    return detail::emit_artifacts<3>(cfg, params, h, result, n_init);
  }
  throw ConfigError("unknown problem '" + cfg.problem + "'");
}

/// Loads the reconstruction written by cmd_run from a directory.
inline Reconstruction2 load_reconstruction(const std::string& dir) {
  namespace fs = std::filesystem;
  const auto manifest = io::KeyValueFile::load((fs::path(dir) / "manifest.txt").string());
  if (std::stoi(manifest.get("dim")) != 2)
    throw PipelineError("point queries on 3D reconstructions are not supported");

  Reconstruction2 rec;
  const auto lo = detail::parse_double_list(manifest.get("domain_lower"));
  const auto hi = detail::parse_double_list(manifest.get("domain_upper"));
  rec.domain = BoxDomain<2>(Vec2(lo[0], lo[1]), Vec2(hi[0], hi[1]));

  if (manifest.has("class_map")) {
    std::stringstream ss(manifest.get("class_map"));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto colon = cell.find(':');
      if (colon == std::string::npos) continue;
      rec.dense_to_raw.push_back(std::stoi(cell.substr(colon + 1)));
    }
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("fault_", 0) == 0 && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    auto fault = io::read_triplet_csv<2>(file.string());
    const std::string key = "closed_" + std::to_string(fault.class_i) + "_" +
                            std::to_string(fault.class_j);
    if (manifest.has(key)) {
      std::stringstream ss(manifest.get(key));
      std::string cell;
      std::size_t c = 0;
      while (std::getline(ss, cell, ',') && c < fault.component_closed.size())
        fault.component_closed[c++] = cell == "1";
    }
    rec.faults.emplace(FaultKey{fault.class_i, fault.class_j}, std::move(fault));
  }
  if (rec.faults.empty()) throw PipelineError("no fault CSV files in " + dir);
  return rec;
}

/// Point query against a written reconstruction: no classifier evaluations,
/// answers in the classifier's original labels.
inline int cmd_query(const std::string& dir, double x, double y) {
  auto rec = load_reconstruction(dir);
  return region_query(Vec2(x, y), rec);
}

/// Renders a written reconstruction (2D, or 3D projected orthographically)
/// into an SVG file; returns the output path.
inline std::string cmd_plot(const std::string& dir, std::string out_path = "") {
  namespace fs = std::filesystem;
  const auto manifest = io::KeyValueFile::load((fs::path(dir) / "manifest.txt").string());
  const int dim = std::stoi(manifest.get("dim"));
  if (out_path.empty()) out_path = (fs::path(dir) / "plot.svg").string();

  const auto lo = detail::parse_double_list(manifest.get("domain_lower"));
  const auto hi = detail::parse_double_list(manifest.get("domain_upper"));

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("fault_", 0) == 0 && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::string svg;
  if (dim == 2) {
    FaultMap<2> faults;
    for (const auto& file : files) {
      auto fault = io::read_triplet_csv<2>(file.string());
      faults.emplace(FaultKey{fault.class_i, fault.class_j}, std::move(fault));
    }
    svg = io::render_svg<2>(faults, BoxDomain<2>(Vec2(lo[0], lo[1]), Vec2(hi[0], hi[1])));
  } else {
    FaultMap<3> faults;
    for (const auto& file : files) {
      auto fault = io::read_triplet_csv<3>(file.string());
      faults.emplace(FaultKey{fault.class_i, fault.class_j}, std::move(fault));
    }
    svg = io::render_svg<3>(faults,
                            BoxDomain<3>(Vec3(lo[0], lo[1], lo[2]), Vec3(hi[0], hi[1], hi[2])));
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw PipelineError("cannot write " + out_path);
  out << svg;
  return out_path;
}

}  // namespace faultscout
