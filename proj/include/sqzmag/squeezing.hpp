#pragma once

#include "sqzmag/gaussian.hpp"

namespace sqzmag {

/// Linearized photon-number statistics of a bright two-mode Gaussian state,
/// in photon-flux units per unit bandwidth.  For a bright mode with complex
/// mean beta the number fluctuation is delta_n = sqrt(2) |beta| delta_x_phi
/// where x_phi is the quadrature along the mean phase; a mode with zero mean
/// carries no linearized fluctuation and is flagged dark.
struct NumberStatistics {
  double mean_probe;      ///< photons/s
  double mean_conjugate;  ///< photons/s
  double var_probe;       ///< flux^2 per Hz
  double var_conjugate;   ///< flux^2 per Hz
  double covariance;      ///< flux^2 per Hz
  bool probe_dark;
  bool conjugate_dark;

  double difference_variance() const {
    return var_probe + var_conjugate - 2.0 * covariance;
  }
  double total_flux() const { return mean_probe + mean_conjugate; }
};

/// Linearized number statistics of the given state.
NumberStatistics photon_number_covariance(const TwoModeGaussianState& state);

/// Number statistics of coherent light with the same per-arm fluxes: the
/// shot-noise reference for the state.
NumberStatistics coherent_number_statistics(const TwoModeGaussianState& state);

/// Noise power ratio of the intensity-difference measurement:
/// Var(n_p - n_c) / (N_p + N_c).  Equals 1 for coherent light; below 1 for
/// intensity-difference squeezing.
double intensity_difference_noise_ratio(const TwoModeGaussianState& state);

/// Closed form of the noise power ratio for equal arm transmissions:
/// 1 - eta + eta / (2 G - 1).
double npr_equal_arms(double gain, double eta);

double npr_to_db(double npr);
double db_to_npr(double db);

/// Equal-arm transmission that reproduces a measured squeezing level at a
/// given gain.  squeezing_db <= 0 (e.g. -4.7).  Throws InfeasibilityError
/// when the level is deeper than the ideal 1/(2G-1) floor.
double infer_efficiency(double squeezing_db, double gain);

} // namespace sqzmag
