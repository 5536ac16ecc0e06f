#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "nhad/biortho.hpp"
#include "test_support.hpp"

using namespace nhad;
using test::max_abs;

namespace {

const double r2 = std::sqrt(2.0) / 2.0;

Matrix quarter_frame() {
  Matrix a(2, 2);
  a << -r2, r2, r2, r2;
  return a;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("identity frame") {
  const auto f = frame_from_matrix(Matrix::Identity(3, 3));
  CHECK(max_abs(f.left() - Matrix::Identity(3, 3)) == 0.0);
  CHECK(check_biorthogonality(f) == 0.0);
  Spectrum s{{0.0, 1.0, 2.0}};
  const Matrix h = assemble_hamiltonian(frame_from_matrix(Matrix::Identity(3, 3)), s);
  CHECK(max_abs(h - Eigen::Vector3cd(0.0, 1.0, 2.0).asDiagonal().toDenseMatrix()) == 0.0);
  Vector e0 = Vector::Zero(3);
  e0(0) = 1.0;
  CHECK(project_mode(f, e0, 0) == Complex(1.0));
}

TEST_CASE("quarter-turn frame") {
  const auto f = frame_from_matrix(quarter_frame());
  CHECK(max_abs(f.left() - quarter_frame()) < 1e-15);
  CHECK(check_biorthogonality(f) < 1e-15);

  const Matrix h = assemble_hamiltonian(f, Spectrum{{0.0, 1.0}});
  Matrix expected(2, 2);
  expected << 0.5, 0.5, 0.5, 0.5;
  CHECK(max_abs(h - expected) < 1e-15);

  CHECK(std::abs(project_mode(f, f.right().col(0), 1)) < 1e-15);
  Vector bare(2);
  bare << 1.0, 0.0;
  CHECK(std::abs(project_mode(f, bare, 0) - Complex(-r2)) < 1e-15);
}

TEST_CASE("frame errors") {
  Matrix same(2, 2);
  same << 1.0, 1.0, 2.0, 2.0;
  CHECK(kind_of([&] { frame_from_matrix(same); }) == ErrorKind::SingularFrame);
  CHECK(kind_of([&] { frame_from_matrix(Matrix::Identity(2, 3)); }) == ErrorKind::DimensionMismatch);

  const auto f = frame_from_matrix(quarter_frame());
  CHECK(kind_of([&] { assemble_hamiltonian(f, Spectrum{{1.0, 1.0}}); }) == ErrorKind::DegenerateSpectrum);
  CHECK(kind_of([&] { assemble_hamiltonian(f, Spectrum{{1.0, 2.0, 3.0}}); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { project_mode(f, Vector::Ones(2), 2); }) == ErrorKind::IndexOutOfRange);
}

TEST_CASE("perturbed left partner is detected") {
  const auto f = frame_from_matrix(quarter_frame());
  Matrix left = f.left();
  left(0, 1) += 1e-6;
  const BiorthogonalFrame damaged(f.right(), left);
  CHECK(check_biorthogonality(damaged) == doctest::Approx(1e-6 * r2).epsilon(1e-3));
}

TEST_CASE("random frames: biorthogonality, projection, round trip, rescaling") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    const Matrix a = test::well_conditioned(rng, n);
    const auto f = frame_from_matrix(a);
    REQUIRE(check_biorthogonality(f) < 1e-12);

    for (Eigen::Index m = 0; m < n; ++m)
      for (Eigen::Index k = 0; k < n; ++k) {
        const double expect = m == k ? 1.0 : 0.0;
        CHECK(std::abs(project_mode(f, a.col(m), static_cast<std::size_t>(k)) - expect) < 1e-12);
      }

    Spectrum s;
    for (Eigen::Index k = 0; k < n; ++k) s.values.emplace_back(3.0 * static_cast<double>(k) + u(rng), u(rng));
    const Matrix h = assemble_hamiltonian(f, s);

    for (Eigen::Index k = 0; k < n; ++k)
      CHECK((h * a.col(k) - s.values[static_cast<std::size_t>(k)] * a.col(k)).norm() < 1e-12 * (1.0 + h.norm()) *
                                                                                         a.col(k).norm());

    Eigen::ComplexEigenSolver<Matrix> es(h);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (const Complex& e : s.values) {
      double best = 1e300;
      Eigen::Index at = 0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (used[static_cast<std::size_t>(k)]) continue;
        if (std::abs(es.eigenvalues()(k) - e) < best) best = std::abs(es.eigenvalues()(k) - e), at = k;
      }
      used[static_cast<std::size_t>(at)] = true;
      CHECK(best < 1e-10);
    }

    Matrix scaled = a;
    const Complex f1(u(rng) + 1.5, u(rng));
    scaled.col(0) *= f1;
    const Matrix h2 = assemble_hamiltonian(frame_from_matrix(scaled), s);
    CHECK(max_abs(h2 - h) < 1e-10 * std::max(1.0, max_abs(h)));
  }
}

TEST_CASE("spectrum validation") {
  CHECK_NOTHROW(Spectrum{{1.0, 2.0}}.validate());
  const Spectrum twin{{Complex(1.0, 1.0), Complex(1.0, 1.0)}};
  CHECK_THROWS_AS(twin.validate(), Error);
}
