#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ulrrm {

// A stream committed or assessed inside one subchannel.
struct StreamRef {
  int user = 0;
  int stream = 0;  // 1-based singular-mode index

  friend bool operator==(const StreamRef&, const StreamRef&) = default;
};

// Right-singular structure of one user's channel on one subchannel. Stream s
// transmits along v_s; its receive signature is sigma_s * v_s^H, a row the
// base station sees with unit transmit power.
struct StreamBasis {
  Eigen::VectorXd singular_values;  // descending
  Eigen::MatrixXcd signatures;      // num_streams x num_bs_antennas

  int num_streams() const { return static_cast<int>(singular_values.size()); }
  Eigen::RowVectorXcd signature(int s) const { return signatures.row(s - 1); }
};

// Thin SVD of an M_U x M_B channel. Each right-singular vector is rotated so
// its first nonzero entry is real and positive, making the basis unique.
StreamBasis stream_basis(const Eigen::MatrixXcd& h);

struct EffectiveChannels {
  bool feasible = false;
  std::vector<double> gains;  // E_i, aligned with the signature rows
};

// Zero-forcing effective channels for a set of co-scheduled signature rows:
// E_i = 1 / (noise * [(G G^H)^{-1}]_ii). Declared infeasible when the Gram
// matrix is singular or its condition number exceeds 1e12.
EffectiveChannels effective_channels(const Eigen::MatrixXcd& rows,
                                     double noise_mw);

// The receiver those gains belong to: W = (G G^H)^{-1} G, so W G^H = I.
Eigen::MatrixXcd zf_receiver(const Eigen::MatrixXcd& rows);

// Streams co-scheduled on one subchannel, maintained incrementally. Adding a
// stream borders the inverse Gram with one Schur-complement step instead of
// refactoring, which is what makes candidate assessment cheap.
class GramState {
 public:
  GramState(double noise_mw, int num_bs_antennas);

  int count() const { return static_cast<int>(keys_.size()); }
  const std::vector<StreamRef>& keys() const { return keys_; }

  // E_i for the committed streams, in insertion order.
  const std::vector<double>& gains() const { return gains_; }

  // Gains as if `rows` were appended, without mutating the state. Returns
  // false when the bordered Gram would go singular; gains_out then holds no
  // meaningful data. gains_out covers committed streams first, then `rows`.
  bool assess_add(const Eigen::MatrixXcd& rows,
                  std::vector<double>& gains_out) const;

  // Appends one stream. Returns false and leaves the state untouched when
  // the bordered Gram would go singular.
  bool add(const StreamRef& key, const Eigen::RowVectorXcd& row);

  // Drops all streams and reinserts the given subset in its list order.
  // Returns false if any insertion fails (state is then empty up to the
  // offending stream).
  bool rebuild(const std::vector<StreamRef>& keys,
               const Eigen::MatrixXcd& rows);

  const Eigen::MatrixXcd& rows() const { return rows_; }

 private:
  double noise_mw_;
  int mb_;
  std::vector<StreamRef> keys_;
  Eigen::MatrixXcd rows_;    // count x mb
  Eigen::MatrixXcd inv_;     // inverse Gram, count x count
  std::vector<double> gains_;

  void refresh_gains();
};

}  // namespace ulrrm
