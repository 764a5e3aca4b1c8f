#include "cdwork/lz_model.hpp"

#include <cmath>

#include "cdwork/counterdiabatic.hpp"

namespace cdwork {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << Cx(0, 0), Cx(1, 0), Cx(1, 0), Cx(0, 0);
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Cx(0, 0), Cx(0, -1), Cx(0, 1), Cx(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << Cx(1, 0), Cx(0, 0), Cx(0, 0), Cx(-1, 0);
  return m;
}

namespace {

void check_params(const LZParams& params) {
  if (!(params.j > 0.0)) {
    throw ConfigError("coupling J must be positive");
  }
}

}  // namespace

HermitianOperator lz_h0(const LZParams& params, double s) {
  check_params(params);
  const double b = protocol_value(params.protocol, s);
  Matrix m(2, 2);
  m << Cx(b, 0), Cx(params.j, 0), Cx(params.j, 0), Cx(-b, 0);
  return HermitianOperator(std::move(m));
}

HermitianOperator lz_dh0_ds(const LZParams& params, double s) {
  check_params(params);
  const double bdot = protocol_deriv(params.protocol, s);
  Matrix m(2, 2);
  m << Cx(bdot, 0), Cx(0, 0), Cx(0, 0), Cx(-bdot, 0);
  return HermitianOperator(std::move(m));
}

LzSpectrumH0 lz_spectrum_h0(const LZParams& params, double s) {
  check_params(params);
  const double b = protocol_value(params.protocol, s);
  const double r = std::hypot(b, params.j);
  return {-r, r, 0.5 * std::atan2(params.j, b)};
}

double lz_cd_amplitude(const LZParams& params, double s, double intensity_time) {
  check_params(params);
  if (!(intensity_time > 0.0)) {
    throw ConfigError("intensity time must be positive");
  }
  const double b = protocol_value(params.protocol, s);
  const double bdot = protocol_deriv(params.protocol, s);
  return params.j * bdot / (2.0 * intensity_time * (b * b + params.j * params.j));
}

LzSpectrumTotal lz_spectrum_total(const LZParams& params, double s, double tau_d) {
  const double c = lz_cd_amplitude(params, s, tau_d);
  const double b = protocol_value(params.protocol, s);
  const double rt = std::sqrt(b * b + params.j * params.j + c * c);
  return {-rt, rt, 0.5 * std::atan2(std::hypot(c, params.j), b),
          std::atan2(c, params.j)};
}

Vector lz_h0_state(const LZParams& params, double s, int level) {
  if (level != 0 && level != 1) {
    throw OutOfRangeError("two-level model has levels 0 and 1");
  }
  const LzSpectrumH0 sp = lz_spectrum_h0(params, s);
  Vector v(2);
  if (level == 0) {
    v << Cx(-std::sin(sp.theta), 0), Cx(std::cos(sp.theta), 0);
  } else {
    v << Cx(std::cos(sp.theta), 0), Cx(std::sin(sp.theta), 0);
  }
  return v;
}

HermitianOperator LZParams::h0(double s) const { return lz_h0(*this, s); }

HermitianOperator LZParams::dh0_ds(double s) const { return lz_dh0_ds(*this, s); }

std::optional<HermitianOperator> LZParams::h1_analytic(double s,
                                                       double intensity_time) const {
  return lz_h1_analytic(*this, s, intensity_time);
}

}  // namespace cdwork
