#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "gme/oprange.hpp"

using namespace gme;

namespace {

HermitianOperator bell_projector() {
  CVector phi = CVector::Zero(4);
  phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
  return HermitianOperator(2, 2, phi * phi.adjoint());
}

CMatrix random_psd(int dim, std::uint64_t seed) {
  const CMatrix u = bf::random_unitary(dim, seed);
  CMatrix d = CMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) d(i, i) = (i + 1.0) / dim;
  return u * d * u.adjoint();
}

}  // namespace

TEST(Upb, ProjectorStructure) {
  const auto states = upb_tiles_states();
  ASSERT_EQ(states.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      EXPECT_NEAR(std::abs(states[i].dot(states[j]) - (i == j ? 1.0 : 0.0)), 0.0, 1e-12);
  const CMatrix p = CMatrix::Identity(9, 9) - upb_tiles_operator().matrix();
  EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(std::abs(p.trace() - 5.0), 0.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(upb_tiles_operator().matrix());
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(es.eigenvalues()(i), i < 5 ? 0.0 : 1.0, 1e-12);
  const CVector& psi0 = states[0];
  EXPECT_NEAR(std::abs(psi0.dot(upb_tiles_operator().matrix() * psi0)), 0.0, 1e-12);
}

TEST(Operator, Validation) {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 1) = 1.0;
  EXPECT_THROW(HermitianOperator(2, 2, m), std::invalid_argument);
  EXPECT_THROW(HermitianOperator(2, 3, CMatrix::Identity(4, 4)), std::invalid_argument);
  EXPECT_THROW(HermitianOperator(1, 4, CMatrix::Identity(4, 4)), std::invalid_argument);
}

TEST(OperatorH1, Identity) {
  const HermitianOperator id(3, 2, CMatrix::Identity(6, 6));
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(m_h1_upper(id, k), 1.0, 1e-10);
}

TEST(OperatorH1, BellProjector) {
  const HermitianOperator x = bell_projector();
  EXPECT_NEAR(m_h1_upper(x, 1), 1.0, 1e-12);
  double prev = 1.0;
  for (int k = 2; k <= 8; ++k) {
    const double v = m_h1_upper(x, k, EigOptions{.tol = 1e-12});
    EXPECT_LE(v, prev + 1e-9);
    EXPECT_GE(v, 0.5 - 1e-9);
    prev = v;
  }
  EXPECT_LT(prev, 0.9);
}

TEST(OperatorH1, MatchesDenseLift) {
  const CMatrix x = random_psd(9, 3);
  const HermitianOperator op(3, 3, x);
  for (int k = 2; k <= 3; ++k) {
    CMatrix lift = bf::pair_operator(x, 3, 3, k, 0);
    for (int j = 1; j < k; ++j) lift = lift * bf::pair_operator(x, 3, 3, k, j);
    const double dense = std::pow(bf::top_eigenvalue(bf::compress_symmetric(lift, 3, 3, k)), 1.0 / k);
    EXPECT_NEAR(m_h1_upper(op, k, EigOptions{.tol = 1e-13}), dense, 1e-9) << k;
  }
}

TEST(OperatorH1, RequiresPsdAboveLevelOne) {
  CMatrix m = CMatrix::Identity(4, 4);
  m(3, 3) = -0.5;
  const HermitianOperator x(2, 2, m);
  EXPECT_NEAR(m_h1_upper(x, 1), 1.0, 1e-12);
  EXPECT_THROW(m_h1_upper(x, 2), std::invalid_argument);
  EXPECT_THROW(m_h1_upper(upb_tiles_operator(), 9, EigOptions{}, 1000), CapExceeded);
}

TEST(OperatorH3, MatchesDenseLift) {
  for (const CMatrix& x : {upb_tiles_operator().matrix(), random_psd(9, 4), CMatrix(bf::random_unitary(9, 5).real().cast<cplx>())}) {
    const CMatrix h = 0.5 * (x + x.adjoint());
    const HermitianOperator op(3, 3, h);
    for (int k = 1; k <= 3; ++k) {
      const CMatrix dense = bf::compress_symmetric(bf::pair_operator(h, 3, 3, k, 0), 3, 3, k);
      EXPECT_LT((CMatrix(m_h3_matrix(op, k)) - dense).cwiseAbs().maxCoeff(), 1e-10) << k;
    }
  }
  const HermitianOperator q(2, 3, random_psd(6, 6));
  for (int k = 1; k <= 3; ++k) {
    const CMatrix dense = bf::compress_symmetric(bf::pair_operator(q.matrix(), 2, 3, k, 0), 2, 3, k);
    EXPECT_LT((CMatrix(m_h3_matrix(q, k)) - dense).cwiseAbs().maxCoeff(), 1e-10) << k;
  }
}

TEST(OperatorH3, IdentityAndLevelOne) {
  const HermitianOperator id(3, 3, CMatrix::Identity(9, 9));
  for (int k = 1; k <= 6; ++k) EXPECT_NEAR(m_h3_upper(id, k), 1.0, 1e-12);
  const HermitianOperator x(3, 3, random_psd(9, 7));
  EXPECT_NEAR(m_h3_upper(x, 1), largest_eigenvalue_dense(x.matrix()), 1e-12);
}

TEST(OperatorH3, MonotoneAndAboveSeesaw) {
  const HermitianOperator x = upb_tiles_operator();
  const double lower = seesaw_lower(x, OracleOptions{.restarts = 32}).value;
  double prev = INFINITY;
  for (int k = 1; k <= 9; ++k) {
    const double v = m_h3_upper(x, k);
    EXPECT_LE(v, prev + 1e-9);
    EXPECT_LE(lower, v + 1e-9);
    prev = v;
  }
  for (int k = 1; k <= 4; ++k) EXPECT_LE(lower, m_h1_upper(x, k) + 1e-9);
}

TEST(OperatorH3, LargeLevelUsesIterativeSolver) {
  const HermitianOperator x = upb_tiles_operator();
  const RangeBound r = m_h3_bound(x, 8, EigOptions{.tol = 1e-12});
  EXPECT_GT(r.iterations, 1);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, largest_eigenvalue_dense(CMatrix(m_h3_matrix(x, 8))), 1e-9);
}

TEST(ShiftCovariance, SeesawAndH3) {
  const HermitianOperator x(3, 3, random_psd(9, 8));
  const double c = 0.37;
  const HermitianOperator y = x.shifted(c);
  EXPECT_NEAR(seesaw_lower(y).value, seesaw_lower(x).value + c, 1e-9);
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(m_h3_upper(y, k), m_h3_upper(x, k) + c, 1e-9);
  EXPECT_NEAR(m_h1_upper(y, 1), m_h1_upper(x, 1) + c, 1e-12);
}

TEST(Seesaw, Examples) {
  EXPECT_NEAR(seesaw_lower(HermitianOperator(2, 3, CMatrix::Identity(6, 6))).value, 1.0, 1e-12);
  const SeesawResult r = seesaw_lower(bell_projector());
  EXPECT_NEAR(r.value, 0.5, 1e-10);
  CVector ab(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ab[2 * i + j] = r.a[i] * r.b[j];
  EXPECT_NEAR(ab.dot(bell_projector().matrix() * ab).real(), r.value, 1e-10);
}
