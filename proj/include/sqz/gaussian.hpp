#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sqz {

/// Gaussian state of n bosonic modes, held as the quadrature mean vector and
/// covariance matrix in the interleaved ordering q1, p1, ..., qn, pn.
///
/// Normalisation: vacuum has unit variance in every quadrature (shot-noise
/// units), so the mean photon number of a mode is
///   (Var(q) + Var(p) + <q>^2 + <p>^2 - 2) / 4
/// and a squeezed vacuum with parameter r carries sinh^2(r) photons.
class GaussianState {
 public:
  /// Builds a state from explicit moments.  The covariance must be square,
  /// symmetric and of even dimension 2n matching the mean.
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  static GaussianState vacuum(int n_modes);

  int n_modes() const { return n_modes_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

 private:
  int n_modes_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// Linear symplectic map x -> matrix * x + displacement on the quadrature
/// vector.  The constructor rejects matrices that fail S Omega S^T = Omega,
/// so every instance is physical by construction.
struct SymplecticTransform {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd displacement;

  SymplecticTransform(Eigen::MatrixXd m, Eigen::VectorXd d);

  int n_modes() const { return static_cast<int>(matrix.rows()) / 2; }

  static SymplecticTransform identity(int n_modes);

  /// Single-mode squeezer S(r, phi) = R(phi/2) diag(e^r, e^-r) R(-phi/2).
  /// phi = 0 amplifies q (Var(q) -> e^{2r}) and squeezes p; the pump phase
  /// phi rotates the amplified quadrature by phi/2.
  static SymplecticTransform squeezer(int n_modes, int mode, double r, double phi);

  /// Phase-space rotation R(theta) = [[cos, -sin], [sin, cos]] on one mode.
  static SymplecticTransform rotation(int n_modes, int mode, double theta);

  /// Lossless beamsplitter of power transmissivity T between two modes;
  /// T = 1 is the identity, T = 0 swaps the modes (with a sign).
  static SymplecticTransform beamsplitter(int n_modes, int mode_a, int mode_b,
                                          double transmissivity);
};

/// Applies `second` after `first`.
SymplecticTransform compose(const SymplecticTransform& second,
                            const SymplecticTransform& first);

/// Symplectic form Omega = blkdiag([[0, 1], [-1, 0]], ...) for n modes.
Eigen::MatrixXd symplectic_form(int n_modes);

/// Frobenius norm of S Omega S^T - Omega; zero for exact symplectic matrices.
double symplectic_defect(const Eigen::MatrixXd& m);

GaussianState vacuum(int n_modes);

GaussianState apply(const GaussianState& state, const SymplecticTransform& t);

GaussianState squeeze(const GaussianState& state, int mode, double r, double phi = 0.0);

GaussianState rotate(const GaussianState& state, int mode, double theta);

GaussianState beamsplitter(const GaussianState& state, int mode_a, int mode_b,
                           double transmissivity);

/// Pure-loss channel of transmissivity eta on one mode: mixes the mode with
/// vacuum on a beamsplitter and traces the ancilla out,
///   V -> X V X^T + Y with X = sqrt(eta) I, Y = (1 - eta) I on the mode.
GaussianState loss_channel(const GaussianState& state, int mode, double eta);

/// Partial trace down to `keep_modes` (indices in the requested output order).
GaussianState reduce(const GaussianState& state, const std::vector<int>& keep_modes);

double mean_photon(const GaussianState& state, int mode);

double total_mean_photon(const GaussianState& state);

/// Variance of the rotated quadrature q cos(angle) + p sin(angle) of a mode.
double quadrature_variance(const GaussianState& state, int mode, double angle);

/// Smallest eigenvalue of cov + i Omega; >= 0 (up to rounding) for every
/// physical covariance, with equality on pure states.
double min_uncertainty_eigenvalue(const GaussianState& state);

/// det(cov); equals 1 exactly for pure states in this normalisation.
double purity_determinant(const GaussianState& state);

}  // namespace sqz
