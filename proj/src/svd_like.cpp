#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hamred/error.hpp"
#include "hamred/symplin.hpp"

// SVD-like decomposition B = S D Q.
//
// 1. Compress B with a thin SVD, B ~ C V_r^T with C = U_r Sigma_r of full column rank r.
// 2. Real Schur form of the skew matrix K = C^T J C gives an orthogonal Z whose 2x2
//    blocks pair columns of C Z with symplectic product beta; 1x1 (or negligible)
//    blocks span an isotropic remainder.
// 3. Pairs become (s_i, s_{n+i}) = (x, y) / sqrt(beta); the remainder columns are
//    kept as-is (unit entries of D) and receive symplectic partners.
// 4. One symplectic Gram-Schmidt sweep over all pairs, in order of decreasing
//    weighted singular value, removes the O(eps ||K|| / beta) drift of step 2.
// 5. The symplectic complement of the swept pairs completes S. Items the sweep
//    could not repair (near the rounding level of K) take complement pairs.

namespace hamred {

namespace {

struct SkewPair {
  Index first;   // Schur column whose image is the "q-like" member
  Index second;  // Schur column whose image is the "p-like" member
  double beta;   // symplectic product, > 0
};

struct SkewStructure {
  std::vector<SkewPair> pairs;  // sorted by beta, descending
  std::vector<Index> kernel;    // Schur columns of negligible blocks
  Matrix Z;                     // orthogonal Schur vectors
};

// Pairs up the Schur vectors of a real skew matrix.
SkewStructure skew_schur(const Matrix& K, double tau) {
  SkewStructure out;
  const Index r = K.rows();
  if (r == 0) {
    out.Z = Matrix(0, 0);
    return out;
  }
  Eigen::RealSchur<Matrix> schur(K, true);
  if (schur.info() != Eigen::Success)
    throw DecompositionFailure("svd_like: real Schur iteration did not converge", 0.0);
  const Matrix& T = schur.matrixT();
  out.Z = schur.matrixU();
  Index i = 0;
  while (i < r) {
    const bool block = i + 1 < r && T(i + 1, i) != 0.0;
    if (!block) {
      out.kernel.push_back(i);
      ++i;
      continue;
    }
    // Orthogonal 2x2 Schur block of a skew matrix: [[a, beta], [-beta', a]], a ~ 0.
    const double beta = 0.5 * (T(i, i + 1) - T(i + 1, i));
    if (std::abs(beta) <= tau) {
      out.kernel.push_back(i);
      out.kernel.push_back(i + 1);
    } else if (beta > 0) {
      out.pairs.push_back({i, i + 1, beta});
    } else {
      out.pairs.push_back({i + 1, i, -beta});
    }
    i += 2;
  }
  std::stable_sort(out.pairs.begin(), out.pairs.end(),
                   [](const SkewPair& a, const SkewPair& b) { return a.beta > b.beta; });
  return out;
}

class SymplecticSweep {
 public:
  explicit SymplecticSweep(Index dim) : ea_(dim, 0), eb_(dim, 0) {}

  // Removes components along all accepted pairs (two passes) and normalizes
  // Omega(u, v) = 1. Symmetric scaling shares the correction between u and v,
  // otherwise only v is rescaled. Returns false if the pair lost its
  // symplectic product; the sweep itself is not modified.
  bool polish(Vector& u, Vector& v, bool symmetric) const {
    for (int pass = 0; pass < 2; ++pass) {
      strip(u);
      strip(v);
    }
    const double w = u.dot(apply_poisson(v).col(0));
    if (!(w > 0.5) || !std::isfinite(w)) return false;
    if (symmetric) {
      const double s = 1.0 / std::sqrt(w);
      u *= s;
      v *= s;
    } else {
      v /= w;
    }
    return true;
  }

  void commit(const Vector& u, const Vector& v) {
    const Index m = ea_.cols();
    ea_.conservativeResize(Eigen::NoChange, m + 1);
    eb_.conservativeResize(Eigen::NoChange, m + 1);
    ea_.col(m) = u;
    eb_.col(m) = v;
  }

  Index size() const { return ea_.cols(); }

  Matrix span() const {
    Matrix out(ea_.rows(), 2 * ea_.cols());
    out << ea_, eb_;
    return out;
  }

 private:
  void strip(Vector& u) const {
    if (ea_.cols() == 0) return;
    const Vector jtu = apply_poisson_transpose(u);
    const Vector ca = ea_.transpose() * jtu;  // Omega(u, a_l)
    const Vector cb = eb_.transpose() * jtu;  // Omega(u, b_l)
    u -= ea_ * cb;
    u += eb_ * ca;
  }

  Matrix ea_;
  Matrix eb_;
};

// Symplectic pairs spanning the symplectic complement of the sweep's span,
// each normalized to Omega = 1.
std::pair<Matrix, Matrix> symplectic_complement(const SymplecticSweep& sweep, Index n) {
  const Index used = sweep.size();
  const Index rest = n - used;
  Matrix G(2 * n, rest), H(2 * n, rest);
  if (rest == 0) return {G, H};
  Matrix Nperp;
  if (used > 0) {
    Eigen::HouseholderQR<Matrix> qr(apply_poisson_transpose(sweep.span()));
    const Matrix Qfull = qr.householderQ();
    Nperp = Qfull.rightCols(2 * rest);
  } else {
    Nperp = Matrix::Identity(2 * n, 2 * n);
  }
  Matrix Kc = Nperp.transpose() * apply_poisson(Nperp);
  Kc = 0.5 * (Kc - Kc.transpose()).eval();
  const SkewStructure cs = skew_schur(Kc, 1e-8);
  if (static_cast<Index>(cs.pairs.size()) != rest)
    throw DecompositionFailure("svd_like: symplectic complement is degenerate",
                               static_cast<double>(cs.kernel.size()));
  for (Index i = 0; i < rest; ++i) {
    const double s = 1.0 / std::sqrt(cs.pairs[i].beta);
    G.col(i) = Nperp * cs.Z.col(cs.pairs[i].first) * s;
    H.col(i) = Nperp * cs.Z.col(cs.pairs[i].second) * s;
  }
  return {G, H};
}

}  // namespace

Matrix svd_like_middle(Index n, Index ns, Index b, Index q, const Vector& sigma) {
  if (b < 0 || q < 0 || 2 * b + q > ns || b + q > n)
    throw InvalidDimension("svd_like_middle: block sizes exceed matrix shape");
  if (sigma.size() != b) throw InvalidDimension("svd_like_middle: sigma must have b entries");
  Matrix D = Matrix::Zero(2 * n, ns);
  for (Index i = 0; i < b; ++i) {
    D(i, i) = sigma(i);
    D(n + i, b + q + i) = sigma(i);
  }
  for (Index j = 0; j < q; ++j) D(b + j, b + j) = 1.0;
  return D;
}

SvdLikeFactors svd_like(const Matrix& B, std::optional<double> tol_rank) {
  if (B.rows() % 2 != 0 || B.rows() == 0)
    throw InvalidDimension("svd_like: row count must be even and positive");
  if (!B.allFinite()) throw NonFiniteState("svd_like: input contains NaN or Inf");
  const Index n = B.rows() / 2;
  const Index ns = B.cols();

  SvdLikeFactors f;
  f.S = Matrix::Identity(2 * n, 2 * n);
  f.Q = Matrix::Identity(ns, ns);
  f.D = Matrix::Zero(2 * n, ns);
  f.sigma = Vector(0);
  if (ns == 0) return f;

  Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax == 0.0) return f;
  const double thr = tol_rank.value_or(1e-10 * smax);
  Index r = 0;
  while (r < sv.size() && sv(r) > thr) ++r;

  const Matrix C = svd.matrixU().leftCols(r) * sv.head(r).asDiagonal();
  const Matrix& V = svd.matrixV();
  Matrix K = C.transpose() * apply_poisson(C);
  K = 0.5 * (K - K.transpose()).eval();

  // Symplectic products below this are indistinguishable from rounding in K.
  const double tau = 1e-14 * smax * smax;
  const SkewStructure sk = skew_schur(K, tau);
  const Index b = static_cast<Index>(sk.pairs.size());
  const Index q = static_cast<Index>(sk.kernel.size());
  if (b + q > n)
    throw DecompositionFailure("svd_like: isotropic remainder too large for the phase space",
                               static_cast<double>(b + q - n));

  // Row-space rotation: columns [pairs.first | kernel | pairs.second] of Z.
  Matrix R(r, r);
  for (Index i = 0; i < b; ++i) {
    R.col(i) = sk.Z.col(sk.pairs[i].first);
    R.col(b + q + i) = sk.Z.col(sk.pairs[i].second);
  }
  for (Index j = 0; j < q; ++j) R.col(b + j) = sk.Z.col(sk.kernel[j]);

  Matrix Qt(ns, ns);
  Qt.leftCols(r) = V.leftCols(r) * R;
  Qt.rightCols(ns - r) = V.rightCols(ns - r);
  f.Q = Qt.transpose();

  const Matrix CR = C * R;
  Vector sigma(b);
  Matrix X(2 * n, b), Y(2 * n, b);
  for (Index i = 0; i < b; ++i) {
    sigma(i) = std::sqrt(sk.pairs[i].beta);
    X.col(i) = CR.col(i) / sigma(i);
    Y.col(i) = CR.col(b + q + i) / sigma(i);
  }
  Matrix Dq = CR.middleCols(b, q);

  // Partners for the isotropic block: Omega(d_j, f_l) = delta_jl, F isotropic and
  // symplectically orthogonal to the pairs.
  Matrix F(2 * n, q);
  if (q > 0) {
    const Matrix G = Dq.transpose() * Dq;
    F = -apply_poisson(Dq) * G.ldlt().solve(Matrix::Identity(q, q));
    if (b > 0) {
      // F <- F - sum_i [Omega(F, y_i) x_i - Omega(F, x_i) y_i]
      const Matrix jtF = apply_poisson_transpose(F);
      F -= X * (Y.transpose() * jtF) - Y * (X.transpose() * jtF);
    }
    const Matrix M = F.transpose() * apply_poisson(F);
    F += Dq * (0.5 * M);
  }

  // Re-orthogonalization in order of decreasing weight. An item whose
  // polishing would move its columns of S D further than dropping them
  // altogether (only possible for columns near the rounding level of K) is
  // deferred and later represented by a complement pair of the same rank.
  struct Slot {
    Index idx;
    bool isotropic;
    double weight;
  };
  std::vector<Slot> order;
  for (Index i = 0; i < b; ++i)
    order.push_back({i, false, sigma(i) * std::sqrt(X.col(i).squaredNorm() + Y.col(i).squaredNorm())});
  for (Index j = 0; j < q; ++j) order.push_back({j, true, Dq.col(j).norm()});
  std::stable_sort(order.begin(), order.end(),
                   [](const Slot& a, const Slot& c) { return a.weight > c.weight; });

  SymplecticSweep sweep(2 * n);
  std::vector<Slot> deferred;
  for (const Slot& s : order) {
    const Vector u0 = s.isotropic ? Vector(Dq.col(s.idx)) : Vector(X.col(s.idx));
    const Vector v0 = s.isotropic ? Vector(F.col(s.idx)) : Vector(Y.col(s.idx));
    Vector u = u0, v = v0;
    const bool ok = sweep.polish(u, v, !s.isotropic);
    // Change of the D-weighted columns versus their size.
    const double moved = s.isotropic ? (u - u0).norm() : sigma(s.idx) * ((u - u0).norm() + (v - v0).norm());
    const double size = s.isotropic ? u0.norm() : sigma(s.idx) * (u0.norm() + v0.norm());
    if (!ok || !(moved <= size)) {
      deferred.push_back(s);
      continue;
    }
    sweep.commit(u, v);
    if (s.isotropic) {
      Dq.col(s.idx) = u;
      F.col(s.idx) = v;
    } else {
      X.col(s.idx) = u;
      Y.col(s.idx) = v;
    }
  }

  auto [Gc, Hc] = symplectic_complement(sweep, n);
  for (Index i = 0; i < Gc.cols(); ++i) {
    Vector u = Gc.col(i), v = Hc.col(i);
    if (!sweep.polish(u, v, true))
      throw DecompositionFailure("svd_like: lost a complement pair during re-orthogonalization",
                                 0.0);
    Gc.col(i) = u;
    Hc.col(i) = v;
  }
  const Index nd = static_cast<Index>(deferred.size());
  for (Index t = 0; t < nd; ++t) {
    const Slot& s = deferred[static_cast<std::size_t>(t)];
    // Keep the replaced columns of S D no larger than the originals.
    if (s.isotropic) {
      const double scale = Dq.col(s.idx).norm() / Gc.col(t).norm();
      Dq.col(s.idx) = scale * Gc.col(t);
      F.col(s.idx) = Hc.col(t) / scale;
    } else {
      const double size = sigma(s.idx) * (X.col(s.idx).norm() + Y.col(s.idx).norm());
      sigma(s.idx) = std::min(sigma(s.idx), size / (Gc.col(t).norm() + Hc.col(t).norm()));
      X.col(s.idx) = Gc.col(t);
      Y.col(s.idx) = Hc.col(t);
    }
  }
  const Index rest = n - b - q;
  Gc = Gc.rightCols(rest).eval();
  Hc = Hc.rightCols(rest).eval();

  f.S.resize(2 * n, 2 * n);
  f.S << X, Dq, Gc, Y, F, Hc;
  f.b = b;
  f.q = q;
  f.sigma = sigma;
  f.D = svd_like_middle(n, ns, b, q, sigma);

  const double bnorm = B.norm();
  const double rec = (f.S * f.D * f.Q - B).norm();
  if (rec > 1e-6 * bnorm)
    throw DecompositionFailure("svd_like: reconstruction residual too large", rec / bnorm);
  return f;
}

Vector weighted_symplectic_singular_values(const SvdLikeFactors& f) {
  const Index n = f.S.rows() / 2;
  Vector w(f.b + f.q);
  for (Index i = 0; i < f.b; ++i)
    w(i) = f.sigma(i) * std::sqrt(f.S.col(i).squaredNorm() + f.S.col(n + i).squaredNorm());
  for (Index j = 0; j < f.q; ++j) w(f.b + j) = f.S.col(f.b + j).norm();
  return w;
}

}  // namespace hamred
