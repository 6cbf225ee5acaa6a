#pragma once

#include <complex>

#include <Eigen/Dense>

namespace sqzmag {

/// Seeded four-wave-mixing chain: a two-mode squeezer of intensity gain G
/// acting on a coherent probe seed and a vacuum conjugate, followed by an
/// independent transmission on each arm.
struct FwmChain {
  double gain;            ///< intensity gain G >= 1 (cosh^2 r)
  double eta_probe;       ///< probe arm transmission in [0, 1]
  double eta_conjugate;   ///< conjugate arm transmission in [0, 1]
  double seed_photon_flux; ///< probe seed mean photon flux, > 0 (photons/s)

  void validate() const;
  bool equal_arms() const { return eta_probe == eta_conjugate; }
};

/// Gaussian state of the (probe, conjugate) pair.  Means are complex field
/// amplitudes in sqrt(photon flux) units; the covariance is over the
/// quadratures (x_p, p_p, x_c, p_c) with x = (a + a^dag)/sqrt(2), so vacuum
/// has covariance I/2.
struct TwoModeGaussianState {
  Eigen::Vector2cd mean;
  Eigen::Matrix4d covariance;

  static TwoModeGaussianState vacuum();

  double mean_flux_probe() const { return std::norm(mean(0)); }
  double mean_flux_conjugate() const { return std::norm(mean(1)); }

  /// Smallest eigenvalue of covariance + (i/2) Omega.  Nonnegative (up to
  /// tolerance) for every physical state; this is the uncertainty relation
  /// in covariance form.
  double physicality_eigenvalue() const;
  bool is_physical(double tol = 1e-9) const;
};

/// Symplectic matrix of the two-mode squeezer with cosh r = sqrt(G).
Eigen::Matrix4d two_mode_squeeze_symplectic(double gain);

/// Output state of the chain: squeezer applied to (coherent seed, vacuum),
/// then per-arm beam-splitter loss.  The seed amplitude is taken real.
TwoModeGaussianState fwm_output_state(const FwmChain& chain);

} // namespace sqzmag
