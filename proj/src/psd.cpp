#include "hamred/psd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <complex>
#include <numeric>
#include <sstream>

#include "hamred/error.hpp"
#include "hamred/parallel.hpp"

namespace hamred {

namespace {

std::string format_mu(const Vector& mu) {
  std::ostringstream os;
  os << "mu = (";
  for (Index i = 0; i < mu.size(); ++i) os << (i ? ", " : "") << mu(i);
  os << ")";
  return os.str();
}

// Extends an orthonormal n x r matrix to n x k with its orthogonal complement.
Matrix pad_orthonormal(const Matrix& U, Index k) {
  const Index n = U.rows();
  if (U.cols() >= k) return U.leftCols(k);
  Matrix out(n, k);
  out.leftCols(U.cols()) = U;
  if (U.cols() == 0) {
    out = Matrix::Identity(n, k);
    return out;
  }
  Eigen::HouseholderQR<Matrix> qr(U);
  const Matrix Qfull = qr.householderQ();
  out.rightCols(k - U.cols()) = Qfull.middleCols(U.cols(), k - U.cols());
  return out;
}

// Extends E (2n x r, [E, J^T E] ortho-symplectic) to k columns with unit
// vectors passed through the SR step.
Matrix pad_orthosymplectic(Matrix E, Index k) {
  const Index dim = E.rows();
  for (Index i = 0; i < dim && E.cols() < k; ++i) {
    try {
      const Vector e = sr_insert(E, Vector::Unit(dim, i), 1e-8);
      E.conservativeResize(Eigen::NoChange, E.cols() + 1);
      E.col(E.cols() - 1) = e;
    } catch (const DegenerateCandidate&) {
    }
  }
  return E;
}

void check_snapshots(const Matrix& M, const char* what) {
  if (M.rows() == 0 || M.rows() % 2 != 0)
    throw InvalidDimension(std::string(what) + ": snapshot row count must be even and positive");
  if (!M.allFinite()) throw NonFiniteState(std::string(what) + ": snapshots contain NaN or Inf");
}

}  // namespace

SnapshotMatrix assemble_snapshots(const HamiltonianModel& model, const ParameterSet& params,
                                  Scheme scheme) {
  if (params.samples.empty()) throw ConfigError("parameters: sample set is empty");
  const std::vector<double> times = params.grid.saved_times();
  const Index nt = static_cast<Index>(times.size());
  const Index np = static_cast<Index>(params.samples.size());
  SnapshotMatrix out;
  out.data.resize(model.full_dim(), np * nt);
  parallel_for(static_cast<std::size_t>(np), [&](std::size_t j) {
    const Vector& mu = params.samples[j];
    try {
      const Trajectory tr =
          integrate(model, model.initial_condition(mu), mu, params.grid, scheme);
      out.data.middleCols(static_cast<Index>(j) * nt, nt) = tr.states;
    } catch (const StepFailure& e) {
      throw StepFailure(format_mu(mu) + ": " + e.what(), e.residual());
    } catch (const NonFiniteState& e) {
      throw NonFiniteState(format_mu(mu) + ": " + e.what());
    }
  });
  out.provenance.reserve(static_cast<std::size_t>(np * nt));
  for (const Vector& mu : params.samples)
    for (double t : times) out.provenance.emplace_back(mu, t);
  return out;
}

double symplectic_projection_error(const Matrix& A, const Matrix& M) {
  if (A.rows() != M.rows())
    throw InvalidDimension("symplectic_projection_error: basis and snapshots differ in rows");
  const Matrix Ainv = right_poisson(apply_poisson_transpose(A)).transpose();
  return (M - A * (Ainv * M)).norm();
}

BasisReport cotangent_lift(const Matrix& M, Index k) {
  check_snapshots(M, "cotangent_lift");
  const Index n = M.rows() / 2;
  if (k < 1 || k > n) throw InvalidDimension("cotangent_lift: k must lie in [1, n]");
  Matrix M1(n, 2 * M.cols());
  M1 << M.topRows(n), M.bottomRows(n);
  BasisReport rep;
  rep.method = "cotangent";
  Matrix Phi;
  if (M1.cols() > 0) {
    Eigen::BDCSVD<Matrix> svd(M1, Eigen::ComputeThinU);
    rep.spectrum = svd.singularValues();
    const double smax = rep.spectrum.size() ? rep.spectrum(0) : 0.0;
    Index r = 0;
    while (r < rep.spectrum.size() && r < k && rep.spectrum(r) > 1e-12 * smax) ++r;
    Phi = svd.matrixU().leftCols(r);
  } else {
    Phi = Matrix(n, 0);
  }
  if (Phi.cols() < k) {
    rep.warnings.push_back("cotangent_lift: only " + std::to_string(Phi.cols()) +
                           " significant directions; padded to k = " + std::to_string(k));
    Phi = pad_orthonormal(Phi, k);
  }
  rep.basis = Matrix::Zero(2 * n, 2 * k);
  rep.basis.topLeftCorner(n, k) = Phi;
  rep.basis.bottomRightCorner(n, k) = Phi;
  rep.projection_error = (M - rep.basis * (rep.basis.transpose() * M)).norm();
  return rep;
}

ComplexOrder parse_complex_order(const std::string& s) {
  if (s == "paper") return ComplexOrder::Paper;
  if (s == "qp") return ComplexOrder::Qp;
  throw ConfigError("basis.complex_order must be 'paper' or 'qp', got '" + s + "'");
}

BasisReport complex_svd_basis(const Matrix& M, Index k, ComplexOrder order) {
  check_snapshots(M, "complex_svd_basis");
  const Index n = M.rows() / 2;
  if (k < 1 || k > n) throw InvalidDimension("complex_svd_basis: k must lie in [1, n]");
  using CMatrix = Eigen::MatrixXcd;
  const Matrix Q = M.topRows(n), P = M.bottomRows(n);
  CMatrix M2(n, M.cols());
  if (order == ComplexOrder::Paper)
    M2.real() = P, M2.imag() = Q;
  else
    M2.real() = Q, M2.imag() = P;

  BasisReport rep;
  rep.method = "complexsvd";
  Matrix E(2 * n, 0);
  if (M.cols() > 0) {
    Eigen::BDCSVD<CMatrix> svd(M2, Eigen::ComputeThinU);
    rep.spectrum = svd.singularValues();
    const Index r = std::min<Index>(k, svd.matrixU().cols());
    const CMatrix U = svd.matrixU().leftCols(r);
    E.resize(2 * n, r);
    if (order == ComplexOrder::Paper) {
      // p + i q = U c means q + i p = (Im U + i Re U) conj(c)
      E.topRows(n) = U.imag();
      E.bottomRows(n) = U.real();
    } else {
      E.topRows(n) = U.real();
      E.bottomRows(n) = U.imag();
    }
  }
  if (E.cols() < k) {
    rep.warnings.push_back("complex_svd_basis: fewer than k singular vectors; padded");
    E = pad_orthosymplectic(E, k);
  }
  rep.basis = orthosymplectic_from_half(E);
  rep.projection_error = (M - rep.basis * (rep.basis.transpose() * M)).norm();
  return rep;
}

BasisReport psd_svd_like_basis(const Matrix& M, Index k) {
  check_snapshots(M, "psd_svd_like_basis");
  const Index n = M.rows() / 2;
  if (k < 1) throw InvalidDimension("psd_svd_like_basis: k must be positive");
  const SvdLikeFactors f = svd_like(M);
  const Vector w = weighted_symplectic_singular_values(f);
  if (k > w.size())
    throw InsufficientRank("psd_svd_like_basis: k = " + std::to_string(k) + " exceeds b + q = " +
                           std::to_string(w.size()));
  std::vector<Index> idx(static_cast<std::size_t>(w.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return w(a) > w(b); });

  BasisReport rep;
  rep.method = "svdlike";
  rep.basis.resize(2 * n, 2 * k);
  rep.spectrum.resize(w.size());
  for (Index j = 0; j < w.size(); ++j) rep.spectrum(j) = w(idx[static_cast<std::size_t>(j)]);
  for (Index j = 0; j < k; ++j) {
    const Index i = idx[static_cast<std::size_t>(j)];
    rep.basis.col(j) = f.S.col(i);
    rep.basis.col(k + j) = f.S.col(n + i);
  }
  rep.projection_error = symplectic_projection_error(rep.basis, M);
  return rep;
}

Matrix pod_basis(const Matrix& M, Index m) {
  if (M.rows() == 0) throw InvalidDimension("pod_basis: empty snapshot matrix");
  if (m < 1 || m > M.rows()) throw InvalidDimension("pod_basis: m must lie in [1, rows]");
  if (!M.allFinite()) throw NonFiniteState("pod_basis: snapshots contain NaN or Inf");
  if (M.cols() == 0) return Matrix::Identity(M.rows(), m);
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU);
  return pad_orthonormal(svd.matrixU().leftCols(std::min<Index>(m, svd.matrixU().cols())), m);
}

}  // namespace hamred
