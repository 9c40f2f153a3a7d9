#pragma once

// Small least-squares helpers over Eigen. Callers decide what a rank
// deficiency means for them (degenerate independence test, ridge-stabilized
// likelihood, ...), so the solvers report it instead of throwing.

#include <Eigen/Dense>

namespace swc {

struct LstsqResult {
  Eigen::VectorXd coef;
  bool rank_deficient = false;
};

// Ordinary least squares via column-pivoted QR. When the design is rank
// deficient the returned coefficients come from a ridge-jittered normal
// equation solve (lambda = 1e-8) so downstream code always has something
// finite to work with; the flag tells it that happened.
inline LstsqResult lstsq(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  LstsqResult out;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) {
    out.rank_deficient = true;
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += 1e-8;
    out.coef = gram.ldlt().solve(x.transpose() * y);
  } else {
    out.coef = qr.solve(y);
  }
  return out;
}

inline Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += lambda;
  return gram.ldlt().solve(x.transpose() * y);
}

}  // namespace swc
