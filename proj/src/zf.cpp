#include "ulrrm/zf.hpp"

#include <cmath>
#include <complex>

namespace ulrrm {
namespace {

constexpr double kCondLimit = 1e12;
constexpr double kSchurRelTol = 1e-12;

// Borders the inverse Gram of rows.topRows(inv.rows()) with one more row.
// Returns false when the Schur complement indicates near-singularity.
bool border_inverse(const Eigen::MatrixXcd& rows, Eigen::MatrixXcd& inv,
                    const Eigen::RowVectorXcd& row) {
  const int n = static_cast<int>(inv.rows());
  const double d = row.squaredNorm();
  if (n == 0) {
    if (!(d > 0.0)) return false;
    inv.resize(1, 1);
    inv(0, 0) = 1.0 / d;
    return true;
  }
  const Eigen::VectorXcd b = rows.topRows(n) * row.adjoint();
  const Eigen::VectorXcd u = inv * b;
  const double s = d - std::real(b.dot(u));
  if (!(s > d * kSchurRelTol)) return false;

  Eigen::MatrixXcd out(n + 1, n + 1);
  out.topLeftCorner(n, n) = inv + (u * u.adjoint()) / s;
  out.topRightCorner(n, 1) = -u / s;
  out.bottomLeftCorner(1, n) = -u.adjoint() / s;
  out(n, n) = std::complex<double>(1.0 / s, 0.0);
  inv.swap(out);
  return true;
}

}  // namespace

StreamBasis stream_basis(const Eigen::MatrixXcd& h) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeThinV);
  const int ns = static_cast<int>(svd.singularValues().size());

  StreamBasis b;
  b.singular_values = svd.singularValues();
  b.signatures.resize(ns, h.cols());
  for (int s = 0; s < ns; ++s) {
    Eigen::VectorXcd v = svd.matrixV().col(s);
    for (int i = 0; i < v.size(); ++i) {
      const double mag = std::abs(v(i));
      if (mag > 1e-12) {
        v *= std::conj(v(i)) / mag;
        break;
      }
    }
    b.signatures.row(s) = b.singular_values(s) * v.adjoint();
  }
  return b;
}

EffectiveChannels effective_channels(const Eigen::MatrixXcd& rows,
                                     double noise_mw) {
  EffectiveChannels out;
  const int n = static_cast<int>(rows.rows());
  if (n == 0) {
    out.feasible = true;
    return out;
  }

  const Eigen::MatrixXcd gram = rows * rows.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  if (!(ev(0) > 0.0) || ev(n - 1) > kCondLimit * ev(0)) return out;

  out.gains.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double inv_diag = 0.0;
    for (int k = 0; k < n; ++k)
      inv_diag += std::norm(es.eigenvectors()(i, k)) / ev(k);
    out.gains[static_cast<std::size_t>(i)] = 1.0 / (noise_mw * inv_diag);
  }
  out.feasible = true;
  return out;
}

Eigen::MatrixXcd zf_receiver(const Eigen::MatrixXcd& rows) {
  const Eigen::MatrixXcd gram = rows * rows.adjoint();
  return gram.ldlt().solve(rows);
}

GramState::GramState(double noise_mw, int num_bs_antennas)
    : noise_mw_(noise_mw), mb_(num_bs_antennas) {
  rows_.resize(0, mb_);
  inv_.resize(0, 0);
}

void GramState::refresh_gains() {
  const int n = count();
  gains_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    gains_[static_cast<std::size_t>(i)] =
        1.0 / (noise_mw_ * std::real(inv_(i, i)));
}

bool GramState::assess_add(const Eigen::MatrixXcd& rows,
                           std::vector<double>& gains_out) const {
  const int n0 = count();
  const int na = static_cast<int>(rows.rows());

  Eigen::MatrixXcd all(n0 + na, mb_);
  if (n0 > 0) all.topRows(n0) = rows_;
  if (na > 0) all.bottomRows(na) = rows;

  Eigen::MatrixXcd inv = inv_;
  for (int i = 0; i < na; ++i)
    if (!border_inverse(all, inv, all.row(n0 + i))) return false;

  gains_out.resize(static_cast<std::size_t>(n0 + na));
  for (int i = 0; i < n0 + na; ++i)
    gains_out[static_cast<std::size_t>(i)] =
        1.0 / (noise_mw_ * std::real(inv(i, i)));
  return true;
}

bool GramState::add(const StreamRef& key, const Eigen::RowVectorXcd& row) {
  const int n = count();
  Eigen::MatrixXcd all(n + 1, mb_);
  if (n > 0) all.topRows(n) = rows_;
  all.row(n) = row;

  if (!border_inverse(all, inv_, row)) return false;
  rows_.swap(all);
  keys_.push_back(key);
  refresh_gains();
  return true;
}

bool GramState::rebuild(const std::vector<StreamRef>& keys,
                        const Eigen::MatrixXcd& rows) {
  keys_.clear();
  rows_.resize(0, mb_);
  inv_.resize(0, 0);
  gains_.clear();
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (!add(keys[i], rows.row(static_cast<int>(i)))) return false;
  return true;
}

}  // namespace ulrrm
