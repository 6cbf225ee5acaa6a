#include "sqzmag/squeezing.hpp"

#include <cmath>

#include "sqzmag/errors.hpp"

namespace sqzmag {

namespace {

// Variance of the quadrature along phase phi of mode m (0 or 1), and the
// covariance of the two mean-phase quadratures, from the 4x4 covariance.
double mean_phase_variance(const TwoModeGaussianState& s, int m, double phi) {
  const int i = 2 * m;
  const double c = std::cos(phi);
  const double sn = std::sin(phi);
  return c * c * s.covariance(i, i) + sn * sn * s.covariance(i + 1, i + 1) +
         2.0 * c * sn * s.covariance(i, i + 1);
}

double mean_phase_cross_covariance(const TwoModeGaussianState& s, double phi_p,
                                   double phi_c) {
  const double cp = std::cos(phi_p);
  const double sp = std::sin(phi_p);
  const double cc = std::cos(phi_c);
  const double sc = std::sin(phi_c);
  return cp * cc * s.covariance(0, 2) + cp * sc * s.covariance(0, 3) +
         sp * cc * s.covariance(1, 2) + sp * sc * s.covariance(1, 3);
}

} // namespace

NumberStatistics photon_number_covariance(const TwoModeGaussianState& state) {
  NumberStatistics st{};
  st.mean_probe = state.mean_flux_probe();
  st.mean_conjugate = state.mean_flux_conjugate();
  st.probe_dark = st.mean_probe == 0.0;
  st.conjugate_dark = st.mean_conjugate == 0.0;

  const double amp_p = std::abs(state.mean(0));
  const double amp_c = std::abs(state.mean(1));
  const double phi_p = st.probe_dark ? 0.0 : std::arg(state.mean(0));
  const double phi_c = st.conjugate_dark ? 0.0 : std::arg(state.mean(1));

  // delta_n = sqrt(2) |beta| delta_x_phi, so Var(n) = 2 |beta|^2 Var(x_phi).
  st.var_probe =
      st.probe_dark ? 0.0
                    : 2.0 * amp_p * amp_p * mean_phase_variance(state, 0, phi_p);
  st.var_conjugate =
      st.conjugate_dark
          ? 0.0
          : 2.0 * amp_c * amp_c * mean_phase_variance(state, 1, phi_c);
  st.covariance = (st.probe_dark || st.conjugate_dark)
                      ? 0.0
                      : 2.0 * amp_p * amp_c *
                            mean_phase_cross_covariance(state, phi_p, phi_c);
  return st;
}

NumberStatistics coherent_number_statistics(const TwoModeGaussianState& state) {
  NumberStatistics st{};
  st.mean_probe = state.mean_flux_probe();
  st.mean_conjugate = state.mean_flux_conjugate();
  st.probe_dark = st.mean_probe == 0.0;
  st.conjugate_dark = st.mean_conjugate == 0.0;
  st.var_probe = st.mean_probe;
  st.var_conjugate = st.mean_conjugate;
  st.covariance = 0.0;
  return st;
}

double intensity_difference_noise_ratio(const TwoModeGaussianState& state) {
  const NumberStatistics st = photon_number_covariance(state);
  const double total = st.total_flux();
  if (total <= 0.0) {
    throw DomainError("state has zero total mean flux");
  }
  return st.difference_variance() / total;
}

double npr_equal_arms(double gain, double eta) {
  if (!std::isfinite(gain) || gain < 1.0) {
    throw DomainError("gain must be finite and >= 1");
  }
  if (!std::isfinite(eta) || eta < 0.0 || eta > 1.0) {
    throw DomainError("eta must be in [0, 1]");
  }
  return 1.0 - eta + eta / (2.0 * gain - 1.0);
}

double npr_to_db(double npr) {
  if (!(npr > 0.0)) {
    throw DomainError("noise power ratio must be > 0");
  }
  return 10.0 * std::log10(npr);
}

double db_to_npr(double db) { return std::pow(10.0, db / 10.0); }

double infer_efficiency(double squeezing_db, double gain) {
  if (!std::isfinite(gain) || gain < 1.0) {
    throw DomainError("gain must be finite and >= 1");
  }
  if (!std::isfinite(squeezing_db) || squeezing_db > 0.0) {
    throw DomainError("squeezing_db must be <= 0");
  }
  const double npr = db_to_npr(squeezing_db);
  if (npr >= 1.0) {
    return 0.0;
  }
  const double floor = 1.0 / (2.0 * gain - 1.0);
  if (npr < floor) {
    throw InfeasibilityError(
        "requested squeezing is deeper than the ideal 1/(2G-1) floor for this gain");
  }
  // Invert 1 - eta + eta/(2G-1) = npr.
  const double eta = (1.0 - npr) / (1.0 - floor);
  return eta;
}

} // namespace sqzmag
