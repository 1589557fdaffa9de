#include "sqz/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sqz {

namespace {

void check_mode(int n_modes, int mode, const char* what) {
  if (mode < 0 || mode >= n_modes) {
    throw std::out_of_range(std::string(what) + " index " + std::to_string(mode) +
                            " outside [0, " + std::to_string(n_modes) + ")");
  }
}

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

Eigen::Matrix2d rotation2(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

}  // namespace

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : n_modes_(static_cast<int>(mean.size()) / 2),
      mean_(std::move(mean)),
      cov_(std::move(cov)) {
  const auto dim = mean_.size();
  if (dim == 0 || dim % 2 != 0) {
    throw std::invalid_argument("state dimension must be a positive multiple of 2");
  }
  if (cov_.rows() != dim || cov_.cols() != dim) {
    throw std::invalid_argument("covariance shape does not match mean dimension");
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("covariance must be symmetric");
  }
  cov_ = ((cov_ + cov_.transpose()) / 2.0).eval();
}

GaussianState GaussianState::vacuum(int n_modes) {
  if (n_modes <= 0) throw std::invalid_argument("mode count must be positive");
  return GaussianState(Eigen::VectorXd::Zero(2 * n_modes),
                       Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

GaussianState vacuum(int n_modes) { return GaussianState::vacuum(n_modes); }

SymplecticTransform::SymplecticTransform(Eigen::MatrixXd m, Eigen::VectorXd d)
    : matrix(std::move(m)), displacement(std::move(d)) {
  const auto dim = matrix.rows();
  if (dim == 0 || dim % 2 != 0 || matrix.cols() != dim) {
    throw std::invalid_argument("transform matrix must be square of even dimension");
  }
  if (displacement.size() != dim) {
    throw std::invalid_argument("displacement dimension does not match matrix");
  }
  if (!matrix.allFinite() || !displacement.allFinite()) {
    throw std::invalid_argument("transform entries must be finite");
  }
  if (symplectic_defect(matrix) > 1e-10 * std::max(1.0, matrix.squaredNorm())) {
    throw std::invalid_argument("matrix is not symplectic");
  }
}

SymplecticTransform SymplecticTransform::identity(int n_modes) {
  if (n_modes <= 0) throw std::invalid_argument("mode count must be positive");
  return SymplecticTransform(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes),
                             Eigen::VectorXd::Zero(2 * n_modes));
}

SymplecticTransform SymplecticTransform::squeezer(int n_modes, int mode, double r,
                                                  double phi) {
  check_mode(n_modes, mode, "mode");
  check_finite(r, "squeeze parameter");
  check_finite(phi, "pump phase");
  Eigen::Matrix2d block = rotation2(phi / 2.0) *
                          Eigen::Vector2d(std::exp(r), std::exp(-r)).asDiagonal() *
                          rotation2(-phi / 2.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  m.block<2, 2>(2 * mode, 2 * mode) = block;
  return SymplecticTransform(std::move(m), Eigen::VectorXd::Zero(2 * n_modes));
}

SymplecticTransform SymplecticTransform::rotation(int n_modes, int mode, double theta) {
  check_mode(n_modes, mode, "mode");
  check_finite(theta, "rotation angle");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  m.block<2, 2>(2 * mode, 2 * mode) = rotation2(theta);
  return SymplecticTransform(std::move(m), Eigen::VectorXd::Zero(2 * n_modes));
}

SymplecticTransform SymplecticTransform::beamsplitter(int n_modes, int mode_a,
                                                      int mode_b, double transmissivity) {
  check_mode(n_modes, mode_a, "mode");
  check_mode(n_modes, mode_b, "mode");
  if (mode_a == mode_b) throw std::invalid_argument("beamsplitter needs two distinct modes");
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
    throw std::invalid_argument("transmissivity must lie in [0, 1]");
  }
  const double t = std::sqrt(transmissivity);
  const double s = std::sqrt(1.0 - transmissivity);
  const auto i2 = Eigen::Matrix2d::Identity();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  m.block<2, 2>(2 * mode_a, 2 * mode_a) = t * i2;
  m.block<2, 2>(2 * mode_a, 2 * mode_b) = s * i2;
  m.block<2, 2>(2 * mode_b, 2 * mode_a) = -s * i2;
  m.block<2, 2>(2 * mode_b, 2 * mode_b) = t * i2;
  return SymplecticTransform(std::move(m), Eigen::VectorXd::Zero(2 * n_modes));
}

SymplecticTransform compose(const SymplecticTransform& second,
                            const SymplecticTransform& first) {
  if (second.matrix.rows() != first.matrix.rows()) {
    throw std::invalid_argument("composed transforms must act on the same mode count");
  }
  return SymplecticTransform(second.matrix * first.matrix,
                             second.matrix * first.displacement + second.displacement);
}

Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes <= 0) throw std::invalid_argument("mode count must be positive");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

double symplectic_defect(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows()) / 2;
  const Eigen::MatrixXd omega = symplectic_form(n);
  return (m * omega * m.transpose() - omega).norm();
}

GaussianState apply(const GaussianState& state, const SymplecticTransform& t) {
  if (t.n_modes() != state.n_modes()) {
    throw std::invalid_argument("transform mode count does not match state");
  }
  Eigen::MatrixXd cov = t.matrix * state.cov() * t.matrix.transpose();
  cov = ((cov + cov.transpose()) / 2.0).eval();
  return GaussianState(t.matrix * state.mean() + t.displacement, std::move(cov));
}

GaussianState squeeze(const GaussianState& state, int mode, double r, double phi) {
  return apply(state, SymplecticTransform::squeezer(state.n_modes(), mode, r, phi));
}

GaussianState rotate(const GaussianState& state, int mode, double theta) {
  return apply(state, SymplecticTransform::rotation(state.n_modes(), mode, theta));
}

GaussianState beamsplitter(const GaussianState& state, int mode_a, int mode_b,
                           double transmissivity) {
  return apply(state, SymplecticTransform::beamsplitter(state.n_modes(), mode_a, mode_b,
                                                        transmissivity));
}

GaussianState loss_channel(const GaussianState& state, int mode, double eta) {
  check_mode(state.n_modes(), mode, "mode");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("loss transmissivity must lie in [0, 1]");
  }
  const double root = std::sqrt(eta);
  Eigen::VectorXd mean = state.mean();
  Eigen::MatrixXd cov = state.cov();
  mean.segment<2>(2 * mode) *= root;
  cov.middleRows<2>(2 * mode) *= root;
  cov.middleCols<2>(2 * mode) *= root;
  cov.block<2, 2>(2 * mode, 2 * mode) += (1.0 - eta) * Eigen::Matrix2d::Identity();
  return GaussianState(std::move(mean), std::move(cov));
}

GaussianState reduce(const GaussianState& state, const std::vector<int>& keep_modes) {
  if (keep_modes.empty()) throw std::invalid_argument("cannot reduce to zero modes");
  const int k = static_cast<int>(keep_modes.size());
  Eigen::VectorXd mean(2 * k);
  Eigen::MatrixXd cov(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    check_mode(state.n_modes(), keep_modes[i], "kept mode");
    mean.segment<2>(2 * i) = state.mean().segment<2>(2 * keep_modes[i]);
    for (int j = 0; j < k; ++j) {
      cov.block<2, 2>(2 * i, 2 * j) =
          state.cov().block<2, 2>(2 * keep_modes[i], 2 * keep_modes[j]);
    }
  }
  return GaussianState(std::move(mean), std::move(cov));
}

double mean_photon(const GaussianState& state, int mode) {
  check_mode(state.n_modes(), mode, "mode");
  const auto& v = state.cov();
  const auto& m = state.mean();
  const int q = 2 * mode;
  return (v(q, q) + v(q + 1, q + 1) + m(q) * m(q) + m(q + 1) * m(q + 1) - 2.0) / 4.0;
}

double total_mean_photon(const GaussianState& state) {
  double sum = 0.0;
  for (int mode = 0; mode < state.n_modes(); ++mode) sum += mean_photon(state, mode);
  return sum;
}

double quadrature_variance(const GaussianState& state, int mode, double angle) {
  check_mode(state.n_modes(), mode, "mode");
  check_finite(angle, "quadrature angle");
  const Eigen::Vector2d u(std::cos(angle), std::sin(angle));
  return u.dot(state.cov().block<2, 2>(2 * mode, 2 * mode) * u);
}

double min_uncertainty_eigenvalue(const GaussianState& state) {
  Eigen::MatrixXcd h = state.cov().cast<std::complex<double>>();
  h += std::complex<double>(0.0, 1.0) * symplectic_form(state.n_modes());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("uncertainty eigenvalue computation failed");
  }
  return solver.eigenvalues().minCoeff();
}

double purity_determinant(const GaussianState& state) { return state.cov().determinant(); }

}  // namespace sqz
