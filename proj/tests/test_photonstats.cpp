#include <doctest.h>

#include <cmath>

#include "qvcz/correlators.hpp"
#include "qvcz/photonstats.hpp"

using namespace qvcz;

namespace {

PhysicalConfig default_config() { return PhysicalConfig{}; }

} // namespace

TEST_CASE("two-mode probability factorizes for independent modes") {
  const double n1 = 0.9, n2 = 1.4;
  const auto be1 = bose_einstein_marginal(n1, 12);
  const auto be2 = bose_einstein_marginal(n2, 12);
  for (int n = 0; n <= 12; ++n) {
    for (int m = 0; m <= 12; ++m) {
      const double p = two_mode_photon_probability(n1, n2, 0.0, n, m);
      CHECK(p == doctest::Approx(be1[n] * be2[m]).epsilon(1e-12));
    }
  }
}

TEST_CASE("two-mode probability matches the quadrature oracle") {
  // Deterministic quadrature over the reduced Gaussian integral as the
  // independent route.
  const double n1 = 0.8, n2 = 1.1;
  for (double frac : {0.0, 0.35, 0.8, 0.99}) {
    const double c2 = frac * n1 * n2;
    for (int n : {0, 1, 3, 6}) {
      for (int m : {0, 2, 5}) {
        const double a = two_mode_photon_probability(n1, n2, c2, n, m);
        const double b = two_mode_distribution_quadrature(n1, n2, c2, n, m);
        CHECK(std::abs(a - b) < 1e-8);
      }
    }
  }
}

TEST_CASE("fully correlated thermal light doubles the variance") {
  // g2 = 2 for a single thermal mode observed twice.
  const double nbar = 0.7;
  JointPhotonDistribution d;
  d.cutoff = 40;
  d.nu = 1.0;
  d.p = Eigen::MatrixXd::Zero(41, 41);
  for (int n = 0; n <= 40; ++n) {
    for (int m = 0; m <= 40; ++m) {
      d.p(n, m) = two_mode_photon_probability(nbar, nbar, nbar * nbar, n, m);
    }
  }
  d.tail_mass = 1.0 - d.p.sum();
  CHECK(g2_mutual_from_distribution(d) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("joint distribution entries are nonnegative and normalized") {
  const auto config = default_config();
  for (double nu : {0.3, 1.0, 2.0}) {
    const auto d = joint_photon_distribution(config, kHHHH, nu, 20);
    CHECK(d.p.minCoeff() > -1e-12);
    CHECK(d.tail_mass >= -1e-12);
    CHECK(d.tail_mass <= 1e-6);
    CHECK(d.p.sum() + d.tail_mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("moment identity ties the distribution to g2 quadrature") {
  const auto config = default_config();
  for (const auto& sel : {kHHHH, kHVHV}) {
    for (double nu : {0.3, 1.0, 3.0}) {
      const auto d = joint_photon_distribution(config, sel, nu, 20);
      const double lhs = g2_mutual_from_distribution(d);
      const double rhs = g2_quadrature(config, sel, nu);
      CHECK(std::abs(lhs - rhs) < 1e-3);
    }
  }
}

TEST_CASE("joint marginals match the independent single-detector build") {
  const auto config = default_config();
  const auto d = joint_photon_distribution(config, kHVHV, 0.7, 24);
  const auto m1 = d.marginal1();
  const auto m2 = d.marginal2();
  const auto s1 = single_detector_marginal(config, Pol::H, 24);
  const auto s2 = single_detector_marginal(config, Pol::V, 24);
  for (int n = 0; n <= 24; ++n) {
    CHECK(std::abs(m1[n] - s1[n]) < 1e-8);
    CHECK(std::abs(m2[n] - s2[n]) < 1e-8);
  }
}

TEST_CASE("diagonal selector required for the joint distribution") {
  const auto config = default_config();
  CHECK_THROWS_AS((void)joint_photon_distribution(config, kVHHV, 0.5, 20),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)joint_photon_distribution(config, kHHVV, 0.5, 20),
                  std::invalid_argument);
  CHECK_NOTHROW((void)joint_photon_distribution(config, kHVHV, 0.5, 20));
}

TEST_CASE("insufficient cutoff raises with a suggestion") {
  const auto config = default_config();
  try {
    (void)joint_photon_distribution(config, kHHHH, 0.3, 2);
    FAIL("expected CutoffError");
  } catch (const CutoffError& e) {
    CHECK(e.suggested_cutoff > 2);
    const auto ok = joint_photon_distribution(config, kHHHH, 0.3,
                                              e.suggested_cutoff);
    CHECK(ok.tail_mass <= 1e-6);
  }
}

TEST_CASE("tail mass decreases with the cutoff") {
  const auto config = default_config();
  double prev = 1.0;
  for (int cutoff : {6, 10, 16, 24}) {
    const auto d = joint_photon_distribution(config, kHHHH, 0.5, cutoff, 1.0);
    CHECK(d.tail_mass < prev);
    prev = d.tail_mass;
  }
}

TEST_CASE("self coherence of the reference marginals") {
  SUBCASE("Bose-Einstein gives 2") {
    const auto be = bose_einstein_marginal(0.8, 60);
    CHECK(g2_self_from_distribution(be) == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("Poisson gives 1") {
    const auto po = poisson_marginal(0.9, 60);
    CHECK(g2_self_from_distribution(po) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("single photon gives 0") {
    std::vector<double> fock(5, 0.0);
    fock[1] = 1.0;
    CHECK(g2_self_from_distribution(fock) == doctest::Approx(0.0));
  }
  SUBCASE("vacuum rejected") {
    std::vector<double> vac(5, 0.0);
    vac[0] = 1.0;
    CHECK_THROWS_AS((void)g2_self_from_distribution(vac), std::domain_error);
  }
}

TEST_CASE("multiphoton g2 tilde") {
  SUBCASE("product distribution gives 1") {
    const auto d = coherent_reference_distribution(0.7, 1.1, 20);
    for (int n : {0, 1, 3}) {
      for (int m : {0, 2, 4}) {
        CHECK(multiphoton_g2_tilde(d, n, m) == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
  SUBCASE("symmetric distribution is symmetric") {
    const auto config = default_config();
    const auto d = joint_photon_distribution(config, kHHHH, 0.6, 20);
    for (int n : {0, 1, 2, 4}) {
      for (int m : {0, 1, 3}) {
        CHECK(multiphoton_g2_tilde(d, n, m) ==
              doctest::Approx(multiphoton_g2_tilde(d, m, n)).epsilon(1e-9));
      }
    }
  }
  SUBCASE("vanishing marginal raises instead of NaN") {
    JointPhotonDistribution d = coherent_reference_distribution(0.0, 0.5, 30);
    CHECK_THROWS_AS((void)multiphoton_g2_tilde(d, 3, 0), std::domain_error);
  }
}

TEST_CASE("amplitude covariance representations round trip") {
  const auto config = default_config();
  const double z = z_from_nu(config, 0.8);
  const auto cov = build_covariance(config, kHVHV,
                                    {Pol::H, Pol::V, Pol::H, Pol::V}, z);
  const auto gamma = cov.real_gamma();
  const auto back = AmplitudeCovariance::complex_from_real(gamma);
  CHECK((back - cov.c).cwiseAbs().maxCoeff() < 1e-14);
  // Gamma must be symmetric PSD.
  CHECK((gamma - gamma.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> es(gamma);
  CHECK(es.eigenvalues().minCoeff() > -1e-10 * gamma.trace());
}

TEST_CASE("amplitude covariance blocks decay at large nu") {
  const auto config = default_config();
  const double z = z_from_nu(config, 50.0);
  const auto cov = build_covariance(config, kHHHH,
                                    {Pol::H, Pol::H, Pol::H, Pol::H}, z);
  const double diag = cov.c(0, 0).real();
  // Modes 0, 2 sit at detector 1 and modes 1, 3 at detector 2: the
  // cross-detector entries must vanish at this separation.
  CHECK(std::abs(cov.c(0, 1)) < 1e-3 * diag);
  CHECK(std::abs(cov.c(2, 3)) < 1e-3 * diag);
  CHECK(std::abs(cov.c(0, 3)) < 1e-3 * diag);
}

TEST_CASE("branch diagonals reflect the grating transmission") {
  // An H-polarized source patch passes cos^2 through the H port: the
  // H-source branch carries 3/2 of the detector mean, the V branch 1/2.
  const auto config = default_config();
  const double z = z_from_nu(config, 1.0);
  const double mean = detector_mean_occupation(config);
  const auto hh = build_covariance(config, kHHHH,
                                   {Pol::H, Pol::H, Pol::H, Pol::H}, z);
  const auto vv = build_covariance(config, kHHHH,
                                   {Pol::V, Pol::V, Pol::V, Pol::V}, z);
  CHECK(hh.c(0, 0).real() == doctest::Approx(1.5 * mean).epsilon(1e-10));
  CHECK(vv.c(0, 0).real() == doctest::Approx(0.5 * mean).epsilon(1e-10));
  // Mixture average equals the anchored detector mean.
  CHECK(0.5 * (hh.c(0, 0).real() + vv.c(0, 0).real()) ==
        doctest::Approx(mean).epsilon(1e-10));
}

TEST_CASE("thermal and coherent references") {
  SUBCASE("no-grating marginal is Bose-Einstein and g2 = 2 at nu -> 0") {
    const double mean = 0.6;
    const auto d = thermal_reference_distribution(mean, 1e-6, 40);
    const auto be = bose_einstein_marginal(mean, 40);
    const auto m1 = d.marginal1();
    for (int n = 0; n <= 40; ++n) {
      CHECK(std::abs(m1[n] - be[n]) < 1e-6);
    }
    CHECK(g2_mutual_from_distribution(d) == doctest::Approx(2.0).epsilon(1e-4));
  }
  SUBCASE("frozen field is Poisson with g2 = 1") {
    const auto d = coherent_reference_distribution(0.6, 0.6, 30);
    const auto po = poisson_marginal(0.6, 30);
    const auto m1 = d.marginal1();
    for (int n = 0; n <= 30; ++n) {
      CHECK(std::abs(m1[n] - po[n]) < 1e-12);
    }
    CHECK(g2_self_from_distribution(d.marginal1()) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(g2_mutual_from_distribution(d) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("distribution addressed by z matches the nu form") {
  const auto config = default_config();
  const double nu = 0.8;
  const double z = z_from_nu(config, nu);
  const auto by_nu = joint_photon_distribution(config, kHHHH, nu, 16, 1.0);
  const auto by_z = joint_photon_distribution_at_z(config, kHHHH, z, 16, 1.0);
  CHECK((by_nu.p - by_z.p).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("a plane near nu = 1.2 approaches coherent statistics") {
  // The most-propagated panel of the reference trend sits near g2 = 1.31.
  const auto config = default_config();
  const auto d = joint_photon_distribution(config, kHHHH, 1.2, 20);
  const double g2 = g2_mutual_from_distribution(d);
  CHECK(g2 > 1.31 - 0.15);
  CHECK(g2 < 1.31 + 0.15);
}

TEST_CASE("fluctuations attenuate along the plane sequence") {
  const auto config = default_config();
  const auto grid = log_spaced_grid(0.12, 2.0, 6);
  double prev = 1e9;
  for (double nu : grid) {
    const auto d = joint_photon_distribution(config, kHHHH, nu, 20);
    const double g2 = g2_mutual_from_distribution(d);
    CHECK(g2 < prev);
    prev = g2;
  }
}

TEST_CASE("equal and unequal photon pairs follow distinct trends") {
  // Equal-number wavepackets start bunched above one and relax downward;
  // strongly unequal ones start suppressed below one and relax upward.
  const auto config = default_config();
  const auto grid = log_spaced_grid(0.12, 2.0, 6);
  const std::vector<std::pair<int, int>> equal = {{1, 1}, {2, 2}, {3, 3}};
  const std::vector<std::pair<int, int>> unequal = {{0, 2}, {0, 3}, {0, 4}};
  const auto first = joint_photon_distribution(config, kHHHH, grid.front(), 20);
  const auto last = joint_photon_distribution(config, kHHHH, grid.back(), 20);
  for (const auto& [a, b] : equal) {
    CHECK(multiphoton_g2_tilde(first, a, b) > multiphoton_g2_tilde(last, a, b));
    CHECK(multiphoton_g2_tilde(first, a, b) > 1.0);
  }
  for (const auto& [a, b] : unequal) {
    CHECK(multiphoton_g2_tilde(first, a, b) < multiphoton_g2_tilde(last, a, b));
    CHECK(multiphoton_g2_tilde(first, a, b) < 1.0);
  }
}
