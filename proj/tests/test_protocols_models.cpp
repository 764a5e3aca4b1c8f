#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cdwork/lz_model.hpp"
#include "cdwork/operator_core.hpp"
#include "cdwork/protocols.hpp"

using namespace cdwork;

namespace {

const Protocol kSmooth{ProtocolKind::smoothstep, -50.0, 50.0};
const Protocol kLinear{ProtocolKind::linear, -50.0, 50.0};

}  // namespace

TEST_CASE("protocol endpoints are exact") {
  for (const Protocol& p : {kSmooth, kLinear}) {
    CHECK(protocol_value(p, 0.0) == -50.0);
    CHECK(protocol_value(p, 1.0) == 50.0);
  }
  CHECK(protocol_deriv(kSmooth, 0.0) == 0.0);
  CHECK(protocol_deriv(kSmooth, 1.0) == 0.0);
}

TEST_CASE("protocol interior values") {
  CHECK(protocol_value(kSmooth, 0.5) == 0.0);
  CHECK(protocol_deriv(kSmooth, 0.5) == 150.0);
  CHECK(protocol_value(kLinear, 0.25) == -25.0);
  CHECK(protocol_deriv(kLinear, 0.25) == 100.0);
  CHECK(protocol_deriv(kLinear, 0.9) == 100.0);
}

TEST_CASE("protocol domain is [0,1]") {
  CHECK_THROWS_AS(protocol_value(kSmooth, -0.01), OutOfRangeError);
  CHECK_THROWS_AS(protocol_value(kSmooth, 1.01), OutOfRangeError);
  CHECK_THROWS_AS(protocol_deriv(kLinear, 2.0), OutOfRangeError);
}

TEST_CASE("protocol kind names round trip") {
  CHECK(protocol_kind_from_name(protocol_kind_name(ProtocolKind::linear)) ==
        ProtocolKind::linear);
  CHECK(protocol_kind_from_name("smoothstep") == ProtocolKind::smoothstep);
  CHECK_THROWS_AS(protocol_kind_from_name("cubic"), ConfigError);
}

TEST_CASE("derivative matches finite differences of the value") {
  const double h = 1e-6;
  for (const Protocol& p : {kSmooth, kLinear}) {
    for (double s : {0.1, 0.25, 0.5, 0.77, 0.9}) {
      const double fd =
          (protocol_value(p, s + h) - protocol_value(p, s - h)) / (2.0 * h);
      CHECK(std::abs(fd - protocol_deriv(p, s)) < 1e-6);
    }
  }
}

TEST_CASE("model derivative matches finite differences entrywise") {
  LZParams lz;
  const double h = 1e-6;
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    Matrix fd = (lz.h0(s + h).matrix() - lz.h0(s - h).matrix()) / (2.0 * h);
    CHECK((fd - lz.dh0_ds(s).matrix()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("hamiltonian matrix forms") {
  LZParams lz;
  Matrix mid = lz_h0(lz, 0.5).matrix();
  CHECK(mid(0, 0) == Cx(0.0));
  CHECK(mid(0, 1) == Cx(5.0));
  CHECK(mid(1, 0) == Cx(5.0));
  CHECK(mid(1, 1) == Cx(0.0));

  Matrix start = lz_h0(lz, 0.0).matrix();
  CHECK(start(0, 0) == Cx(-50.0));
  CHECK(start(1, 1) == Cx(50.0));
  CHECK(start(0, 1) == Cx(5.0));

  Matrix slope = lz_dh0_ds(lz, 0.5).matrix();
  CHECK(slope(0, 0) == Cx(150.0));
  CHECK(slope(1, 1) == Cx(-150.0));
  CHECK(slope(0, 1) == Cx(0.0));
}

TEST_CASE("coupling must be positive") {
  LZParams bad;
  bad.j = 0.0;
  CHECK_THROWS_AS(lz_h0(bad, 0.5), ConfigError);
  bad.j = -5.0;
  CHECK_THROWS_AS(lz_spectrum_h0(bad, 0.5), ConfigError);
}

TEST_CASE("reference spectrum closed form") {
  LZParams lz;

  LzSpectrumH0 mid = lz_spectrum_h0(lz, 0.5);
  CHECK(std::abs(mid.e_minus + 5.0) < 1e-14);
  CHECK(std::abs(mid.e_plus - 5.0) < 1e-14);
  CHECK(std::abs(mid.theta - M_PI / 4.0) < 1e-14);

  LzSpectrumH0 edge = lz_spectrum_h0(lz, 0.0);
  CHECK(std::abs(edge.e_minus + 50.24937810560445) < 1e-12);
  CHECK(std::abs(edge.theta - 1.5209620005493156) < 1e-14);

  // Mixing angle stays inside (0, pi/2) while B crosses zero.
  for (int k = 0; k <= 100; ++k) {
    LzSpectrumH0 sp = lz_spectrum_h0(lz, k / 100.0);
    CHECK(sp.theta > 0.0);
    CHECK(sp.theta < M_PI / 2.0);
  }
}

TEST_CASE("numerical diagonalization agrees with the closed form") {
  LZParams lz;
  for (int k = 0; k <= 100; ++k) {
    const double s = k / 100.0;
    SpectralDecomposition sd = eigendecompose(lz_h0(lz, s));
    LzSpectrumH0 an = lz_spectrum_h0(lz, s);
    CHECK(std::abs(sd.eigenvalues(0) - an.e_minus) < 1e-12);
    CHECK(std::abs(sd.eigenvalues(1) - an.e_plus) < 1e-12);

    for (int level = 0; level < 2; ++level) {
      const Cx ov = lz_h0_state(lz, s, level).dot(sd.eigenvectors.col(level));
      CHECK(std::abs(std::abs(ov) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("total spectrum with the transitionless term") {
  LZParams lz;

  // Zero ramp rate: no transitionless term, spectra coincide.
  LzSpectrumTotal frozen = lz_spectrum_total(lz, 0.0, 0.1);
  LzSpectrumH0 bare = lz_spectrum_h0(lz, 0.0);
  CHECK(frozen.e_minus == bare.e_minus);
  CHECK(frozen.mu == 0.0);
  CHECK(std::abs(frozen.theta_c - bare.theta) < 1e-14);

  LzSpectrumTotal mid = lz_spectrum_total(lz, 0.5, 0.1);
  CHECK(std::abs(lz_cd_amplitude(lz, 0.5, 0.1) - 150.0) < 1e-12);
  CHECK(std::abs(mid.e_plus - 150.08331019803634) < 1e-12);
  CHECK(std::abs(mid.mu - std::atan2(150.0, 5.0)) < 1e-14);

  LZParams lin(5.0, kLinear);
  CHECK(std::abs(lz_cd_amplitude(lin, 0.5, 0.1) - 100.0) < 1e-12);
  CHECK(std::abs(lz_spectrum_total(lin, 0.5, 0.1).e_plus - 100.12492197250393) <
        1e-12);
}

TEST_CASE("total spectrum collapses onto the reference as tau_d grows") {
  LZParams lz;
  double worst = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double s = k / 100.0;
    const double gap_total = 2.0 * lz_spectrum_total(lz, s, 1000.0).e_plus;
    const double gap_h0 = 2.0 * lz_spectrum_h0(lz, s).e_plus;
    worst = std::max(worst, std::abs(gap_total - gap_h0));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("angles are continuous across the crossing") {
  LZParams lz;
  double prev_theta = lz_spectrum_h0(lz, 0.0).theta;
  LzSpectrumTotal prev_tot = lz_spectrum_total(lz, 0.0, 0.1);
  for (int k = 1; k <= 1000; ++k) {
    const double s = k / 1000.0;
    const double theta = lz_spectrum_h0(lz, s).theta;
    LzSpectrumTotal tot = lz_spectrum_total(lz, s, 0.1);
    CHECK(std::abs(theta - prev_theta) < M_PI / 2.0);
    CHECK(std::abs(tot.theta_c - prev_tot.theta_c) < M_PI / 2.0);
    CHECK(std::abs(tot.mu - prev_tot.mu) < M_PI / 2.0);
    prev_theta = theta;
    prev_tot = tot;
  }
}

TEST_CASE("gap extrema sit at the symmetric point") {
  for (const Protocol& p : {kSmooth, kLinear}) {
    LZParams lz(5.0, p);
    int argmin_h0 = -1, argmax_total = -1;
    double min_h0 = 1e300, max_total = -1e300;
    for (int k = 0; k <= 1000; ++k) {
      const double s = k / 1000.0;
      const double g0 = 2.0 * lz_spectrum_h0(lz, s).e_plus;
      const double gt = 2.0 * lz_spectrum_total(lz, s, 0.1).e_plus;
      if (g0 < min_h0) {
        min_h0 = g0;
        argmin_h0 = k;
      }
      if (gt > max_total) {
        max_total = gt;
        argmax_total = k;
      }
    }
    CHECK(argmin_h0 == 500);
    CHECK(argmax_total == 500);
  }
}
