#include <cmath>
#include <complex>

#include <doctest.h>

#include "sqzmag/errors.hpp"
#include "sqzmag/gaussian.hpp"
#include "sqzmag/squeezing.hpp"
#include "support/oracles.hpp"

using namespace sqzmag;

namespace {

// Independent closed form for arbitrary arm transmissions, derived by hand
// from the linearized number statistics (the seed flux cancels).  Used to
// triangulate the covariance-propagation path against a formula that shares
// none of its code.
double npr_general(double g, double ep, double ec) {
  const double a = 2.0 * g - 1.0;
  const double num = ep * g * (ep * a + 1.0 - ep) +
                     ec * (g - 1.0) * (ec * a + 1.0 - ec) -
                     4.0 * ep * ec * g * (g - 1.0);
  return num / (ep * g + ec * (g - 1.0));
}

Eigen::Vector4d quadrature_mean(const TwoModeGaussianState& s) {
  Eigen::Vector4d q;
  q << std::sqrt(2.0) * s.mean(0).real(), std::sqrt(2.0) * s.mean(0).imag(),
      std::sqrt(2.0) * s.mean(1).real(), std::sqrt(2.0) * s.mean(1).imag();
  return q;
}

} // namespace

TEST_CASE("identity chain passes the coherent seed through untouched") {
  const FwmChain chain{1.0, 1.0, 1.0, 9.0};
  const TwoModeGaussianState s = fwm_output_state(chain);
  CHECK(s.mean(0).real() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s.mean(0).imag() == 0.0);
  CHECK(std::abs(s.mean(1)) == 0.0);
  CHECK((s.covariance - 0.5 * Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(s.is_physical());
}

TEST_CASE("squeezer symplectic preserves the symplectic form") {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  for (double g : {1.0, 1.5, 2.0, 12.6, 40.0}) {
    const Eigen::Matrix4d m = two_mode_squeeze_symplectic(g);
    CHECK((m * omega * m.transpose() - omega).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("arm fluxes follow G and G-1 times the seed") {
  const FwmChain chain{12.6, 1.0, 1.0, 1.0};
  const TwoModeGaussianState s = fwm_output_state(chain);
  CHECK(s.mean_flux_probe() == doctest::Approx(12.6).epsilon(1e-12));
  CHECK(s.mean_flux_conjugate() == doctest::Approx(11.6).epsilon(1e-12));

  const FwmChain lossy{12.6, 0.5, 0.25, 2.0};
  const TwoModeGaussianState t = fwm_output_state(lossy);
  CHECK(t.mean_flux_probe() == doctest::Approx(12.6).epsilon(1e-12));
  CHECK(t.mean_flux_conjugate() == doctest::Approx(5.8).epsilon(1e-12));
}

TEST_CASE("equal-arm closed form at the benchmark operating points") {
  CHECK(npr_equal_arms(12.6, 1.0) == doctest::Approx(1.0 / 24.2).epsilon(1e-12));
  CHECK(npr_to_db(npr_equal_arms(12.6, 1.0)) ==
        doctest::Approx(-13.8381536598).epsilon(1e-9));
  CHECK(npr_equal_arms(12.6, 0.86) ==
        doctest::Approx(0.175537190082645).epsilon(1e-12));
  CHECK(npr_to_db(npr_equal_arms(12.6, 0.86)) ==
        doctest::Approx(-7.5563085791).epsilon(1e-9));
  CHECK(npr_equal_arms(12.6, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(npr_equal_arms(1.0, 0.37) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("state path reproduces the closed forms across the gain/loss grid") {
  for (double g : {1.0, 1.5, 12.6, 40.0}) {
    for (double eta : {0.3, 0.69, 0.86, 1.0}) {
      const FwmChain chain{g, eta, eta, 5.0};
      const double from_state =
          intensity_difference_noise_ratio(fwm_output_state(chain));
      const double closed = npr_equal_arms(g, eta);
      CAPTURE(g);
      CAPTURE(eta);
      CHECK(from_state == doctest::Approx(closed).epsilon(1e-9));
    }
  }
  // Unequal arms against the independently derived formula.
  const double cases[][3] = {
      {2.0, 0.5, 1.0}, {12.6, 0.6, 0.9}, {12.6, 0.673, 0.689}, {3.7, 1.0, 0.2}};
  for (const auto& c : cases) {
    const FwmChain chain{c[0], c[1], c[2], 11.0};
    const double from_state =
        intensity_difference_noise_ratio(fwm_output_state(chain));
    CAPTURE(c[0]);
    CAPTURE(c[1]);
    CAPTURE(c[2]);
    CHECK(from_state ==
          doctest::Approx(npr_general(c[0], c[1], c[2])).epsilon(1e-9));
  }
}

TEST_CASE("noise ratio is independent of the seed flux") {
  const double ref = intensity_difference_noise_ratio(
      fwm_output_state({12.6, 0.86, 0.86, 1.0}));
  for (double flux : {1e-3, 1.0, 1e6, 8.0e13}) {
    const double npr = intensity_difference_noise_ratio(
        fwm_output_state({12.6, 0.86, 0.86, flux}));
    CHECK(npr == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("Monte Carlo oracle confirms the covariance propagation") {
  const std::size_t n = 1u << 20;
  const FwmChain chains[] = {{2.0, 0.5, 1.0, 4.0}, {12.6, 0.673, 0.689, 9.0}};
  const std::uint64_t seeds[] = {901, 902};
  for (int which = 0; which < 2; ++which) {
    const FwmChain& chain = chains[which];
    const TwoModeGaussianState s = fwm_output_state(chain);
    const auto mc = oracle::mc_chain(chain, n, seeds[which]);
    const Eigen::Vector4d mean = quadrature_mean(s);
    CAPTURE(which);
    for (int i = 0; i < 4; ++i) {
      const double se = std::sqrt(s.covariance(i, i) / static_cast<double>(n));
      CAPTURE(i);
      CHECK(std::abs(mc.mean(i) - mean(i)) < 3.5 * se);
      for (int j = 0; j < 4; ++j) {
        CAPTURE(j);
        CHECK(std::abs(mc.covariance(i, j) - s.covariance(i, j)) <
              3.5 * mc.covariance_se(i, j));
      }
    }
    // The sampled photon number carries the spontaneous (thermal) part on
    // top of the coherent flux: <n> = |<a>|^2 + (V_xx + V_pp - 1)/2.  It is
    // O(G) and negligible only for bright seeds.
    const double n_probe = s.mean_flux_probe() +
                           0.5 * (s.covariance(0, 0) + s.covariance(1, 1) - 1.0);
    const double n_conjugate =
        s.mean_flux_conjugate() +
        0.5 * (s.covariance(2, 2) + s.covariance(3, 3) - 1.0);
    CHECK(mc.mean_flux_probe == doctest::Approx(n_probe).epsilon(5e-3));
    CHECK(mc.mean_flux_conjugate ==
          doctest::Approx(n_conjugate).epsilon(5e-3));
  }
}

TEST_CASE("Monte Carlo oracle confirms the noise ratio at bright flux") {
  const std::size_t n = 1u << 20;
  // Bright seed so the linearized number statistics apply.
  const FwmChain squeezed{12.6, 0.689653941, 0.689653941, 1e6};
  const auto mc = oracle::mc_chain(squeezed, n, 77);
  const double predicted =
      intensity_difference_noise_ratio(fwm_output_state(squeezed));
  CHECK(std::abs(mc.npr - predicted) < 3.0 * mc.npr_se);

  const FwmChain coherent{1.0, 1.0, 1.0, 1e6};
  const auto mc_coh = oracle::mc_chain(coherent, n, 78);
  CHECK(std::abs(mc_coh.npr - 1.0) < 3.0 * mc_coh.npr_se);
}

TEST_CASE("noise ratio improves monotonically with gain and transmission") {
  double prev = 2.0;
  for (double eta : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    const double npr = npr_equal_arms(12.6, eta);
    CHECK(npr < prev);
    CHECK(npr >= 1.0 - eta - 1e-12); // loss alone bounds the noise floor
    prev = npr;
  }
  prev = 2.0;
  for (double g : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double npr = npr_equal_arms(g, 0.9);
    CHECK(npr < prev);
    prev = npr;
  }
}

TEST_CASE("coherent reference has Poissonian, uncorrelated arms") {
  const TwoModeGaussianState s = fwm_output_state({12.6, 0.86, 0.86, 3.0});
  const NumberStatistics st = coherent_number_statistics(s);
  CHECK(st.var_probe == doctest::Approx(st.mean_probe).epsilon(1e-12));
  CHECK(st.var_conjugate == doctest::Approx(st.mean_conjugate).epsilon(1e-12));
  CHECK(st.covariance == 0.0);
  CHECK(st.difference_variance() ==
        doctest::Approx(st.total_flux()).epsilon(1e-12));
}

TEST_CASE("no-gain chain leaves the conjugate dark and the ratio at one") {
  const TwoModeGaussianState s = fwm_output_state({1.0, 0.8, 0.8, 2.0});
  const NumberStatistics st = photon_number_covariance(s);
  CHECK(!st.probe_dark);
  CHECK(st.conjugate_dark);
  CHECK(st.var_conjugate == 0.0);
  CHECK(st.covariance == 0.0);
  CHECK(intensity_difference_noise_ratio(s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("number covariance obeys Cauchy-Schwarz") {
  const double cases[][4] = {{12.6, 0.86, 0.86, 1.0},
                             {2.0, 0.5, 1.0, 4.0},
                             {40.0, 0.3, 0.9, 7.0},
                             {1.5, 1.0, 1.0, 0.5}};
  for (const auto& c : cases) {
    const NumberStatistics st = photon_number_covariance(
        fwm_output_state({c[0], c[1], c[2], c[3]}));
    CHECK(std::abs(st.covariance) <=
          std::sqrt(st.var_probe * st.var_conjugate) + 1e-9);
    CHECK(st.difference_variance() >= -1e-9);
  }
}

TEST_CASE("chain outputs stay physical across a parameter sweep") {
  for (double g : {1.0, 1.1, 2.0, 12.6, 60.0}) {
    for (double ep : {0.0, 0.3, 0.7, 1.0}) {
      for (double ec : {0.0, 0.5, 1.0}) {
        const TwoModeGaussianState s = fwm_output_state({g, ep, ec, 1.0});
        CAPTURE(g);
        CAPTURE(ep);
        CAPTURE(ec);
        CHECK(s.physicality_eigenvalue() >= -1e-9);
      }
    }
  }
}

TEST_CASE("efficiency inference matches the benchmark operating points") {
  CHECK(infer_efficiency(-4.5, 12.6) ==
        doctest::Approx(0.672996378471874).epsilon(1e-10));
  CHECK(infer_efficiency(-4.7, 12.6) ==
        doctest::Approx(0.689653940578935).epsilon(1e-10));
  CHECK(infer_efficiency(0.0, 12.6) == 0.0);

  // Round trip: the inferred transmission reproduces the requested level.
  for (double db : {-0.5, -3.0, -4.5, -4.7, -8.0}) {
    const double eta = infer_efficiency(db, 12.6);
    CHECK(npr_to_db(npr_equal_arms(12.6, eta)) ==
          doctest::Approx(db).epsilon(1e-10));
  }
  CHECK(npr_to_db(npr_equal_arms(12.6, infer_efficiency(-4.7, 12.6))) ==
        doctest::Approx(-4.7).epsilon(1e-9));
}

TEST_CASE("efficiency inference rejects impossible requests") {
  CHECK_THROWS_AS(infer_efficiency(-20.0, 12.6), InfeasibilityError);
  CHECK_THROWS_AS(infer_efficiency(-1.0, 1.0), InfeasibilityError);
  CHECK_THROWS_AS(infer_efficiency(1.0, 12.6), DomainError);
  CHECK_THROWS_AS(infer_efficiency(-4.7, 0.5), DomainError);
  CHECK_THROWS_AS(infer_efficiency(std::nan(""), 12.6), DomainError);
}

TEST_CASE("decibel helpers invert each other") {
  for (double npr : {1e-3, 0.04132231404958678, 0.3388441561388414, 1.0, 2.5}) {
    CHECK(db_to_npr(npr_to_db(npr)) == doctest::Approx(npr).epsilon(1e-12));
  }
  CHECK_THROWS_AS(npr_to_db(0.0), DomainError);
  CHECK_THROWS_AS(npr_to_db(-1.0), DomainError);
}

TEST_CASE("chain validation rejects out-of-range parameters") {
  CHECK_THROWS_AS(fwm_output_state({0.9, 1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(fwm_output_state({12.6, -0.1, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(fwm_output_state({12.6, 1.0, 1.1, 1.0}), DomainError);
  CHECK_THROWS_AS(fwm_output_state({12.6, 1.0, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(npr_equal_arms(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(npr_equal_arms(12.6, 1.5), DomainError);
  CHECK_THROWS_AS(
      intensity_difference_noise_ratio(TwoModeGaussianState::vacuum()),
      DomainError);
}
