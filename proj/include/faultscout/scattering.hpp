#pragma once

#include <complex>
#include <fstream>
#include <sstream>
#include <string>

#include "faultscout/classifier.hpp"
#include "faultscout/svd.hpp"

namespace faultscout {

/// Far-field measurements: m incidence/observation directions on the unit
/// sphere and the m x m complex far-field matrix, with the SVD computed once
/// at load time.
struct FarFieldData {
  int m = 0;
  double wave_number = 0.0;
  std::vector<Vec3> directions;
  Eigen::MatrixXcd matrix;
  ComplexSvd svd;

  /// Number of expansion terms entering the indicator; defaults to all.
  int truncation = 0;
  /// Adjoint instead of plain transpose when expanding the test vector.
  bool conjugate_expansion = false;
};

inline FarFieldData make_farfield(int m, double wave_number, std::vector<Vec3> directions,
                                  Eigen::MatrixXcd matrix) {
  if (m < 1) throw std::invalid_argument("far field: m must be positive");
  if (static_cast<int>(directions.size()) != m || matrix.rows() != m || matrix.cols() != m)
    throw std::invalid_argument("far field: size mismatch");
  for (const auto& d : directions) {
    if (std::abs(d.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("far field: directions must be unit vectors");
  }
  FarFieldData data;
  data.m = m;
  data.wave_number = wave_number;
  data.directions = std::move(directions);
  data.matrix = std::move(matrix);
  data.svd = complex_svd(data.matrix);
  data.truncation = m;
  return data;
}

/// Text format: `m k_e`, then m direction lines, then m rows of m complex
/// entries as `re im` pairs.
inline FarFieldData load_farfield(std::istream& in) {
  int m = 0;
  double ke = 0.0;
  if (!(in >> m >> ke)) throw std::runtime_error("far field: malformed header");
  if (m < 1) throw std::runtime_error("far field: invalid m");
  std::vector<Vec3> dirs(m);
  for (int i = 0; i < m; ++i) {
    if (!(in >> dirs[i][0] >> dirs[i][1] >> dirs[i][2]))
      throw std::runtime_error("far field: malformed direction line");
  }
  Eigen::MatrixXcd a(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double re = 0, im = 0;
      if (!(in >> re >> im)) throw std::runtime_error("far field: malformed matrix entry");
      a(i, j) = std::complex<double>(re, im);
    }
  }
  return make_farfield(m, ke, std::move(dirs), std::move(a));
}

inline FarFieldData load_farfield(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("far field: cannot open " + path);
  return load_farfield(in);
}

inline void save_farfield(std::ostream& out, const FarFieldData& data) {
  out.precision(17);
  out << data.m << " " << data.wave_number << "\n";
  for (const auto& d : data.directions) out << d[0] << " " << d[1] << " " << d[2] << "\n";
  for (int i = 0; i < data.m; ++i) {
    for (int j = 0; j < data.m; ++j) {
      if (j) out << " ";
      out << data.matrix(i, j).real() << " " << data.matrix(i, j).imag();
    }
    out << "\n";
  }
}

inline void save_farfield(const std::string& path, const FarFieldData& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("far field: cannot write " + path);
  save_farfield(out, data);
}

/// Factorization-method indicator W(z): expand the test vector
/// r_z = exp(-i k_e z . d_j) in the right singular vectors and weight the
/// squared coefficients by the inverse singular values. Terms with a zero
/// singular value count as infinite, so W collapses to zero whenever they
/// carry energy.
inline double indicator(const Vec3& z, const FarFieldData& data) {
  const int m = data.m;
  const int terms = data.truncation > 0 ? std::min(data.truncation, m) : m;
  Eigen::VectorXcd r(m);
  for (int j = 0; j < m; ++j) {
    const double phase = -data.wave_number * z.dot(data.directions[j]);
    r[j] = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  const Eigen::VectorXcd rho =
      data.conjugate_expansion ? Eigen::VectorXcd(data.svd.v.adjoint() * r)
                               : Eigen::VectorXcd(data.svd.v.transpose() * r);
  double sum = 0.0;
  for (int l = 0; l < terms; ++l) {
    const double lambda = data.svd.singular_values[l];
    const double num = std::norm(rho[l]);
    if (lambda == 0.0) {
      if (num > 0.0) return 0.0;  // infinite contribution
      continue;
    }
    sum += num / lambda;
  }
  return sum > 0.0 ? 1.0 / sum : 0.0;
}

/// Wraps the indicator into a two-class point classifier: class 2 inside the
/// scatterer (W above the threshold), class 1 outside. Plugs directly into
/// the 3D pipeline, which then reconstructs the scatterer boundary.
inline std::function<int(const Vec3&)> inside_classifier(const FarFieldData& data, double w0) {
  if (!(w0 > 0)) throw std::invalid_argument("inside_classifier: threshold must be positive");
  return [data, w0](const Vec3& z) { return indicator(z, data) >= w0 ? 2 : 1; };
}

}  // namespace faultscout
