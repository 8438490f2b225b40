#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "faultscout/scattering.hpp"

using namespace faultscout;

namespace {

std::vector<Vec3> fibonacci_directions(int m) {
  std::vector<Vec3> dirs;
  for (int k = 0; k < m; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / m;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.399963229728653 * k;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return dirs;
}

Eigen::MatrixXcd random_complex(int m, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
  return a;
}

// independent evaluation: eigen-decomposition of A^H A instead of the SVD,
// explicit summation loops
double indicator_oracle(const Vec3& z, double ke, const std::vector<Vec3>& dirs,
                        const Eigen::MatrixXcd& a) {
  const int m = static_cast<int>(dirs.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a.adjoint() * a);
  // eigenvalues ascending; singular values are their square roots
  std::vector<std::complex<double>> r(m);
  for (int j = 0; j < m; ++j) {
    const double phase = -ke * z.dot(dirs[j]);
    r[j] = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  double sum = 0.0;
  for (int l = 0; l < m; ++l) {
    const double lambda = std::sqrt(std::max(0.0, eig.eigenvalues()[m - 1 - l]));
    std::complex<double> rho = 0.0;
    for (int j = 0; j < m; ++j) rho += eig.eigenvectors()(j, m - 1 - l) * r[j];
    if (lambda == 0.0) {
      if (std::norm(rho) > 0) return 0.0;
      continue;
    }
    sum += std::norm(rho) / lambda;
  }
  return sum > 0 ? 1.0 / sum : 0.0;
}

}  // namespace

TEST_CASE("identity far field yields W = 1/m everywhere", "[scattering]") {
  for (int m : {2, 5, 16}) {
    auto data = make_farfield(m, 2.0, fibonacci_directions(m),
                              Eigen::MatrixXcd::Identity(m, m));
    std::mt19937 rng(m);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 10; ++k) {
      const Vec3 z(u(rng), u(rng), u(rng));
      CHECK(std::abs(indicator(z, data) - 1.0 / m) <= 1e-12);
    }
  }
}

TEST_CASE("zero singular values force the indicator to zero", "[scattering]") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 1.0;  // singular values (1, 0)
  auto data = make_farfield(2, 2.0, fibonacci_directions(2), a);
  CHECK(indicator(Vec3(0.3, -0.2, 0.9), data) == 0.0);
}

TEST_CASE("indicator matches the dense oracle", "[scattering]") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    const int m = 3 + rep % 6;
    auto dirs = fibonacci_directions(m);
    auto a = random_complex(m, rng);
    auto data = make_farfield(m, 2.0, dirs, a);
    for (int k = 0; k < 4; ++k) {
      const Vec3 z(u(rng), u(rng), u(rng));
      const double fast = indicator(z, data);
      const double slow = indicator_oracle(z, 2.0, dirs, a);
      REQUIRE(fast == Catch::Approx(slow).epsilon(1e-10));
    }
  }
}

TEST_CASE("indicator is invariant under direction permutations", "[scattering]") {
  std::mt19937 rng(23);
  const int m = 8;
  auto dirs = fibonacci_directions(m);
  auto a = random_complex(m, rng);
  auto data = make_farfield(m, 2.0, dirs, a);

  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Vec3> pd(m);
  Eigen::MatrixXcd pa(m, m);
  for (int i = 0; i < m; ++i) {
    pd[i] = dirs[perm[i]];
    for (int j = 0; j < m; ++j) pa(i, j) = a(perm[i], perm[j]);
  }
  auto permuted = make_farfield(m, 2.0, pd, pa);

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const Vec3 z(u(rng), u(rng), u(rng));
    CHECK(indicator(z, data) == Catch::Approx(indicator(z, permuted)).epsilon(1e-9));
  }
}

TEST_CASE("far-field io validation and round trip", "[scattering]") {
  // non-unit direction rejected
  std::vector<Vec3> bad{Vec3(2, 0, 0), Vec3(0, 1, 0)};
  CHECK_THROWS_AS(make_farfield(2, 2.0, bad, Eigen::MatrixXcd::Identity(2, 2)),
                  std::invalid_argument);

  std::mt19937 rng(29);
  auto data = make_farfield(4, 2.0, fibonacci_directions(4), random_complex(4, rng));
  std::stringstream buffer;
  save_farfield(buffer, data);
  auto loaded = load_farfield(buffer);
  CHECK(loaded.m == data.m);
  CHECK(loaded.wave_number == data.wave_number);
  CHECK(loaded.matrix == data.matrix);  // bit-identical round trip
  for (int i = 0; i < 4; ++i) CHECK(loaded.directions[i] == data.directions[i]);

  std::stringstream broken("3 2.0\n1 0 0\n");
  CHECK_THROWS_AS(load_farfield(broken), std::runtime_error);
}

TEST_CASE("inside_classifier thresholds the indicator", "[scattering]") {
  const int m = 6;
  auto data = make_farfield(m, 2.0, fibonacci_directions(m),
                            Eigen::MatrixXcd::Identity(m, m));
  // constant W = 1/m: any threshold below that marks everything inside
  auto inside = inside_classifier(data, 0.5 / m);
  auto outside = inside_classifier(data, 2.0 / m);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Vec3 z(u(rng), u(rng), u(rng));
    CHECK(inside(z) == 2);
    CHECK(outside(z) == 1);
  }
  CHECK_THROWS_AS(inside_classifier(data, 0.0), std::invalid_argument);
}
