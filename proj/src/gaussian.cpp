#include "sqzmag/gaussian.hpp"

#include <cmath>

#include "sqzmag/errors.hpp"

namespace sqzmag {

void FwmChain::validate() const {
  if (!std::isfinite(gain) || gain < 1.0) {
    throw DomainError("gain must be finite and >= 1");
  }
  if (!std::isfinite(eta_probe) || eta_probe < 0.0 || eta_probe > 1.0) {
    throw DomainError("eta_probe must be in [0, 1]");
  }
  if (!std::isfinite(eta_conjugate) || eta_conjugate < 0.0 ||
      eta_conjugate > 1.0) {
    throw DomainError("eta_conjugate must be in [0, 1]");
  }
  if (!std::isfinite(seed_photon_flux) || seed_photon_flux <= 0.0) {
    throw DomainError("seed_photon_flux must be > 0");
  }
}

TwoModeGaussianState TwoModeGaussianState::vacuum() {
  TwoModeGaussianState s;
  s.mean.setZero();
  s.covariance = 0.5 * Eigen::Matrix4d::Identity();
  return s;
}

double TwoModeGaussianState::physicality_eigenvalue() const {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  Eigen::Matrix4cd m = covariance.cast<std::complex<double>>() +
                       std::complex<double>(0.0, 0.5) *
                           omega.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(m);
  return solver.eigenvalues().minCoeff();
}

bool TwoModeGaussianState::is_physical(double tol) const {
  return physicality_eigenvalue() >= -tol;
}

Eigen::Matrix4d two_mode_squeeze_symplectic(double gain) {
  const double c = std::sqrt(gain);
  const double s = std::sqrt(gain - 1.0);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  // b_p = c a_p + s a_c^dag, b_c = s a_p^dag + c a_c:
  // x quadratures add, p quadratures subtract the partner mode.
  m(0, 0) = c;
  m(0, 2) = s;
  m(1, 1) = c;
  m(1, 3) = -s;
  m(2, 0) = s;
  m(2, 2) = c;
  m(3, 1) = -s;
  m(3, 3) = c;
  return m;
}

TwoModeGaussianState fwm_output_state(const FwmChain& chain) {
  chain.validate();
  const double alpha = std::sqrt(chain.seed_photon_flux);
  const Eigen::Matrix4d s = two_mode_squeeze_symplectic(chain.gain);

  Eigen::Vector4d mean_quad = Eigen::Vector4d::Zero();
  mean_quad(0) = std::sqrt(2.0) * alpha;
  mean_quad = s * mean_quad;

  Eigen::Matrix4d cov = s * (0.5 * Eigen::Matrix4d::Identity()) * s.transpose();

  // Beam-splitter loss per arm: V -> T V T + (I - T^2)/2, means scale by
  // sqrt(eta).
  Eigen::Vector4d t;
  const double rp = std::sqrt(chain.eta_probe);
  const double rc = std::sqrt(chain.eta_conjugate);
  t << rp, rp, rc, rc;
  cov = t.asDiagonal() * cov * t.asDiagonal();
  cov.diagonal() += 0.5 * (Eigen::Vector4d::Ones() - t.cwiseProduct(t));
  mean_quad = t.asDiagonal() * mean_quad;

  TwoModeGaussianState out;
  out.mean(0) = std::complex<double>(mean_quad(0), mean_quad(1)) / std::sqrt(2.0);
  out.mean(1) = std::complex<double>(mean_quad(2), mean_quad(3)) / std::sqrt(2.0);
  out.covariance = cov;
  return out;
}

} // namespace sqzmag
