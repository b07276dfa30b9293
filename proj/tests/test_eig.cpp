#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "gme/eig.hpp"

using namespace gme;

namespace {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

CMatrix spectrum_matrix(int n, std::uint64_t seed, const std::function<double(int)>& f) {
  const CMatrix u = bf::random_unitary(n, seed);
  CMatrix d = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = f(i);
  return u * d * u.adjoint();
}

LinearOperator dense_op(const CMatrix& m) {
  return [&m](const CVector& x, CVector& y) { y = m * x; };
}

}  // namespace

TEST(Eig, DiagonalSmax) {
  SparseMatrix m(2, 2);
  m.insert(0, 0) = 3.0;
  m.insert(1, 1) = 1.0;
  EXPECT_NEAR(smax_squared(m, EigOptions{}).value, 9.0, 1e-9);
}

TEST(Eig, RandomSparseAgainstSvd) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 9);
  SparseMatrix m(100, 80);
  CMatrix dense = CMatrix::Zero(100, 80);
  for (int r = 0; r < 100; ++r)
    for (int c = 0; c < 80; ++c)
      if (coin(rng) == 0) {
        const cplx v(u(rng), u(rng));
        m.insert(r, c) = v;
        dense(r, c) = v;
      }
  const double s = Eigen::JacobiSVD<CMatrix>(dense).singularValues()(0);
  for (EigMethod method : {EigMethod::Lanczos, EigMethod::Power}) {
    EigOptions o;
    o.method = method;
    o.tol = 1e-12;
    o.max_iter = 200000;
    EXPECT_NEAR(smax_squared(m, o).value, s * s, 1e-8 * s * s);
  }
  const SparseMatrix t = SparseMatrix(m.adjoint());
  EXPECT_NEAR(smax_squared(t, EigOptions{.tol = 1e-12}).value, s * s, 1e-8 * s * s);
}

TEST(Eig, LanczosMatchesDense) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const CMatrix m = spectrum_matrix(90, seed, [](int i) { return std::cos(0.21 * i); });
    const auto r = lanczos_max(dense_op(m), 90, EigOptions{.tol = 1e-12});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, bf::top_eigenvalue(m), 1e-9);
    EXPECT_NEAR(r.value, largest_eigenvalue_dense(m), 1e-9);
    EXPECT_LE(r.residual, 1e-12);
  }
}

TEST(Eig, ClusteredTopNeedsRestarts) {
  const CMatrix m = spectrum_matrix(300, 4, [](int i) { return i == 0 ? 1.0 : 0.999 - 1e-3 * i; });
  const auto r = lanczos_max(dense_op(m), 300, EigOptions{.tol = 1e-11, .krylov_dim = 12, .keep = 3});
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Eig, Deterministic) {
  const CMatrix m = spectrum_matrix(50, 5, [](int i) { return 1.0 / (1 + i); });
  const auto a = lanczos_max(dense_op(m), 50, EigOptions{});
  const auto b = lanczos_max(dense_op(m), 50, EigOptions{});
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Eig, PowerReportsNonConvergence) {
  const CMatrix m = spectrum_matrix(40, 6, [](int i) { return i < 2 ? 1.0 - 1e-9 * i : 0.5; });
  const auto r = power_max(dense_op(m), 40, EigOptions{.tol = 1e-15, .max_iter = 5, .method = EigMethod::Power});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 5);
  EXPECT_GT(r.residual, 0.0);
}

TEST(Eig, ZeroOperator) {
  LinearOperator zero = [](const CVector& x, CVector& y) { y = CVector::Zero(x.size()); };
  EXPECT_NEAR(largest_eigenvalue(zero, 10, EigOptions{}).value, 0.0, 1e-15);
}

TEST(Eig, UnitVector) {
  const CVector v = random_unit_vector(17, 3);
  EXPECT_NEAR(v.norm(), 1.0, 1e-15);
  EXPECT_EQ(v, random_unit_vector(17, 3));
}
