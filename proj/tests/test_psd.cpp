#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>

#include "hamred/error.hpp"
#include "hamred/psd.hpp"
#include "test_support.hpp"

using namespace hamred;
using namespace hamred::testing;

namespace {

double proj_err(const Matrix& A, const Matrix& M) {
  return (M - A * symplectic_inverse(A) * M).norm();
}

// Squared tail of the singular values of X beyond the first r.
double tail_energy(const Matrix& X, Index r) {
  Eigen::JacobiSVD<Matrix> svd(X);
  const Vector& s = svd.singularValues();
  return r >= s.size() ? 0.0 : s.tail(s.size() - r).squaredNorm();
}

ParameterSet wave_params(Index p, double t_end, double dt) {
  ParameterSet ps;
  for (Index j = 0; j < p; ++j)
    ps.samples.push_back(Vector::Constant(1, p == 1 ? 1.0 : 0.8 + 0.4 * j / double(p - 1)));
  ps.grid = TimeGrid{0.0, t_end, dt, 1};
  return ps;
}

WaveOptions wave(Index n) {
  WaveOptions o;
  o.n = n;
  o.width = 0.1;
  return o;
}

}  // namespace

TEST(Snapshots, SingleTimeIsInitialCondition) {
  const auto m = build_model("linear_wave", wave(16));
  ParameterSet ps;
  ps.samples = {Vector::Constant(1, 1.2)};
  ps.grid = TimeGrid{0.0, 0.0, 0.1, 1};
  const SnapshotMatrix s = assemble_snapshots(*m, ps, Scheme::Midpoint);
  ASSERT_EQ(s.data.cols(), 1);
  EXPECT_EQ(s.data.col(0), m->initial_condition(ps.samples[0]));
}

TEST(Snapshots, CardinalityOrderAndDeterminism) {
  const auto m = build_model("linear_wave", wave(16));
  const ParameterSet ps = wave_params(3, 0.25, 1.0 / 64);
  const SnapshotMatrix a = assemble_snapshots(*m, ps, Scheme::Midpoint);
  ASSERT_EQ(a.data.cols(), 3 * 17);
  ASSERT_EQ(a.provenance.size(), 51u);
  EXPECT_EQ(a.provenance[17].first, ps.samples[1]);
  EXPECT_EQ(a.provenance[17].second, 0.0);
  EXPECT_DOUBLE_EQ(a.provenance[20].second, 3.0 / 64);
  const Trajectory tr = integrate(*m, m->initial_condition(ps.samples[2]), ps.samples[2], ps.grid,
                                  Scheme::Midpoint);
  EXPECT_EQ(a.data.middleCols(34, 17), tr.states);
  const SnapshotMatrix b = assemble_snapshots(*m, ps, Scheme::Midpoint);
  EXPECT_EQ(a.data, b.data);
}

TEST(Snapshots, EmptyParameterSetRejected) {
  const auto m = build_model("linear_wave", wave(16));
  ParameterSet ps;
  ps.grid = TimeGrid{0.0, 0.1, 0.1, 1};
  EXPECT_THROW(assemble_snapshots(*m, ps, Scheme::Midpoint), ConfigError);
}

TEST(CotangentLift, RankOneExactCapture) {
  const Index n = 5;
  Matrix M = Matrix::Zero(2 * n, 4);
  for (Index j = 0; j < 4; ++j) M(0, j) = M(n, j) = 1.0 + j;
  const BasisReport r = cotangent_lift(M, 1);
  EXPECT_NEAR(std::abs(r.basis(0, 0)), 1.0, 1e-14);
  EXPECT_LE(r.projection_error, 1e-13);
  EXPECT_LE(proj_err(r.basis, M), 1e-13);
}

TEST(CotangentLift, FullSpaceHasZeroError) {
  CounterRng rng(31);
  const Matrix M = rng.normal_matrix(8, 12);
  const BasisReport r = cotangent_lift(M, 4);
  EXPECT_LE(orth_res(r.basis), 1e-12);
  EXPECT_LE(symp_res(r.basis), 1e-12);
  EXPECT_LE(r.projection_error, 1e-12 * M.norm());
}

TEST(CotangentLift, EckartYoungOnStackedData) {
  CounterRng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 4 + trial, N = 3 + 2 * trial, k = 1 + trial % 3;
    const Matrix M = rng.normal_matrix(2 * n, N);
    Matrix M1(n, 2 * N);
    M1 << M.topRows(n), M.bottomRows(n);
    const BasisReport r = cotangent_lift(M, k);
    EXPECT_NEAR(r.projection_error * r.projection_error, tail_energy(M1, k),
                1e-8 * M.squaredNorm());
    EXPECT_TRUE(r.basis.topRightCorner(n, k).isZero(0.0));
    EXPECT_TRUE(r.basis.bottomLeftCorner(n, k).isZero(0.0));
    EXPECT_EQ(r.basis.topLeftCorner(n, k), r.basis.bottomRightCorner(n, k));
  }
}

TEST(CotangentLift, RankDeficiencyPadsAndWarns) {
  Matrix M = Matrix::Zero(8, 3);
  M(0, 0) = 1.0;
  const BasisReport r = cotangent_lift(M, 3);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_LE(orth_res(r.basis), 1e-12);
  EXPECT_LE(symp_res(r.basis), 1e-12);
  EXPECT_THROW(cotangent_lift(M, 5), InvalidDimension);
}

TEST(ComplexSvd, RealRankOneCaptured) {
  Matrix M = Matrix::Zero(6, 3);
  M(0, 0) = 1.0;
  M(0, 1) = -2.0;
  M(0, 2) = 0.5;
  const BasisReport r = complex_svd_basis(M, 1);
  EXPECT_LE(r.projection_error, 1e-14);
}

TEST(ComplexSvd, OrthosymplecticConditions) {
  CounterRng rng(33);
  for (ComplexOrder order : {ComplexOrder::Paper, ComplexOrder::Qp}) {
    const Index n = 7, k = 3;
    const BasisReport r = complex_svd_basis(rng.normal_matrix(2 * n, 15), k, order);
    const Matrix Phi = r.basis.block(0, 0, n, k), Psi = r.basis.block(n, 0, n, k);
    EXPECT_LE((Phi.transpose() * Phi + Psi.transpose() * Psi - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(),
              1e-10);
    EXPECT_LE((Phi.transpose() * Psi - Psi.transpose() * Phi).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(orth_res(r.basis), 1e-10);
    EXPECT_LE(symp_res(r.basis), 1e-10);
  }
}

TEST(ComplexSvd, OptimalAgainstRandomOrthosymplecticBases) {
  CounterRng rng(34);
  const Matrix M = rng.normal_matrix(4, 20);
  const double err = complex_svd_basis(M, 1).projection_error;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) best = std::min(best, proj_err(random_orthosymplectic(2, 1, rng), M));
  EXPECT_LE(err, best + 1e-12);
}

TEST(ComplexSvd, NeverWorseThanCotangentLift) {
  CounterRng rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 3 + trial % 6, k = 1 + trial % n;
    const Matrix M = rng.normal_matrix(2 * n, 4 + trial);
    EXPECT_LE(complex_svd_basis(M, k).projection_error, cotangent_lift(M, k).projection_error + 1e-12);
  }
}

TEST(ComplexSvd, OrderChoiceGivesSameError) {
  CounterRng rng(36);
  const Matrix M = rng.normal_matrix(12, 9);
  EXPECT_NEAR(complex_svd_basis(M, 2, ComplexOrder::Paper).projection_error,
              complex_svd_basis(M, 2, ComplexOrder::Qp).projection_error, 1e-12 * M.norm());
  EXPECT_THROW(parse_complex_order("pq"), ConfigError);
}

TEST(SvdLikeBasis, ExactRankTwoCaptured) {
  CounterRng rng(37);
  const Matrix A = random_symplectic_basis(4, 1, rng);
  const Matrix M = A * rng.normal_matrix(2, 10);
  const BasisReport r = psd_svd_like_basis(M, 1);
  EXPECT_LE(r.projection_error, 1e-10 * M.norm());
  EXPECT_LE(symp_res(r.basis), 1e-10 * std::max(1.0, r.basis.squaredNorm()));
}

TEST(SvdLikeBasis, EnergyAndReconstructionIdentities) {
  CounterRng rng(38);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 3 + trial % 8, N = 5 + trial;
    const Matrix M = rng.normal_matrix(2 * n, N);
    const SvdLikeFactors f = svd_like(M);
    const Vector w = weighted_symplectic_singular_values(f);
    EXPECT_NEAR(w.squaredNorm(), M.squaredNorm(), 1e-8 * M.squaredNorm());
    const Index k = 1 + trial % (f.b + f.q);
    const BasisReport r = psd_svd_like_basis(M, k);
    std::vector<double> ws(w.data(), w.data() + w.size());
    std::sort(ws.begin(), ws.end(), std::greater<>());
    double discarded = 0.0;
    for (std::size_t i = k; i < ws.size(); ++i) discarded += ws[i] * ws[i];
    const double e2 = r.projection_error * r.projection_error;
    EXPECT_NEAR(e2, discarded, 1e-8 * M.squaredNorm()) << "trial " << trial;
    EXPECT_NEAR(proj_err(r.basis, M), r.projection_error, 1e-8 * M.norm());
  }
}

TEST(SvdLikeBasis, ModelSnapshotIdentities) {
  const auto m = build_model("linear_wave", wave(32));
  const SnapshotMatrix s = assemble_snapshots(*m, wave_params(5, 0.25, 1.0 / 128), Scheme::Midpoint);
  const Vector w = weighted_symplectic_singular_values(svd_like(s.data));
  const double total = s.data.squaredNorm();
  EXPECT_NEAR(w.squaredNorm(), total, 1e-8 * total);
  for (Index k : {2, 5}) {
    const BasisReport r = psd_svd_like_basis(s.data, k);
    std::vector<double> ws(w.data(), w.data() + w.size());
    std::sort(ws.begin(), ws.end(), std::greater<>());
    double discarded = 0.0;
    for (std::size_t i = k; i < ws.size(); ++i) discarded += ws[i] * ws[i];
    EXPECT_NEAR(r.projection_error * r.projection_error, discarded, 1e-8 * total);
  }
}

TEST(SvdLikeBasis, InsufficientRank) {
  Matrix M = Matrix::Zero(6, 2);
  M(0, 0) = 1.0;
  EXPECT_THROW(psd_svd_like_basis(M, 2), InsufficientRank);
}

TEST(Pod, EckartYoung) {
  CounterRng rng(39);
  const Matrix M = rng.normal_matrix(10, 14);
  for (Index m : {1, 4, 10}) {
    const Matrix U = pod_basis(M, m);
    EXPECT_LE(orth_res(U), 1e-12);
    EXPECT_NEAR((M - U * U.transpose() * M).squaredNorm(), tail_energy(M, m), 1e-8 * M.squaredNorm());
  }
  const Matrix r1 = Vector::LinSpaced(6, 1, 6) * Vector::Ones(3).transpose();
  const Matrix u = pod_basis(r1, 1);
  EXPECT_LE((r1 - u * u.transpose() * r1).norm(), 1e-13 * r1.norm());
}

TEST(Greedy, MonotoneHierarchicalGeometric) {
  const auto m = build_model("linear_wave", wave(64));
  ParameterSet ps;
  for (int j = 0; j < 10; ++j) ps.samples.push_back(Vector::Constant(1, 0.5 + 1.5 * j / 9.0));
  ps.grid = TimeGrid{0.0, 99.0 / 512, 1.0 / 512, 1};
  GreedyOptions opts;
  opts.k_max = 12;
  opts.tol = 1e-14;
  const GreedyResult g = greedy_symplectic_basis(*m, ps, opts);
  const Matrix& A = g.report.basis;
  EXPECT_LE(orth_res(A), 1e-10);
  EXPECT_LE(symp_res(A), 1e-10);
  const Index k = A.cols() / 2;
  ASSERT_EQ(static_cast<Index>(g.error_history.size()), k);
  for (std::size_t i = 1; i < g.error_history.size(); ++i)
    EXPECT_LE(g.error_history[i], g.error_history[i - 1] * (1 + 1e-12));

  // Each smaller basis [E_i, J^T E_i] lies in the span of the next one.
  const Index n = A.rows() / 2;
  for (Index i = 1; i < k; ++i) {
    Matrix Ai(2 * n, 2 * i), Ai1(2 * n, 2 * i + 2);
    Ai << A.leftCols(i), A.middleCols(k, i);
    Ai1 << A.leftCols(i + 1), A.middleCols(k, i + 1);
    EXPECT_LE((Ai - Ai1 * Ai1.transpose() * Ai).norm(), 1e-10);
  }

  // Log-error against k is close to a line with negative slope.
  const Index m_pts = static_cast<Index>(g.error_history.size());
  Vector x(m_pts), y(m_pts);
  for (Index i = 0; i < m_pts; ++i) {
    x(i) = double(i + 1);
    y(i) = std::log(g.error_history[i]);
  }
  const double xm = x.mean(), ym = y.mean();
  const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();
  const double sxx = (x.array() - xm).square().sum();
  const double syy = (y.array() - ym).square().sum();
  EXPECT_LT(sxy / sxx, 0.0);
  EXPECT_GE(sxy * sxy / (sxx * syy), 0.9);
}

TEST(Greedy, HamiltonianIndicatorProducesValidBasis) {
  const auto m = build_model("linear_wave", wave(32));
  ParameterSet ps = wave_params(4, 0.125, 1.0 / 128);
  GreedyOptions opts;
  opts.k_max = 5;
  opts.indicator = GreedyIndicator::Hamiltonian;
  const GreedyResult g = greedy_symplectic_basis(*m, ps, opts);
  EXPECT_LE(orth_res(g.report.basis), 1e-10);
  EXPECT_LE(symp_res(g.report.basis), 1e-10);
  EXPECT_FALSE(g.status.empty());
  EXPECT_THROW(parse_indicator("residual"), ConfigError);
}

TEST(Greedy, ArgumentValidation) {
  const auto m = build_model("linear_wave", wave(16));
  ParameterSet ps = wave_params(2, 0.125, 1.0 / 64);
  GreedyOptions opts;
  opts.k_max = 17;
  EXPECT_THROW(greedy_symplectic_basis(*m, ps, opts), InvalidDimension);
  opts.k_max = 2;
  opts.tol = 0.0;
  EXPECT_THROW(greedy_symplectic_basis(*m, ps, opts), ConfigError);
}
