#pragma once

#include <optional>

#include "cdwork/operator_core.hpp"
#include "cdwork/protocols.hpp"

namespace cdwork {

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// A driven Hamiltonian path H0(s) with its exact s-derivative.  Models may
// supply a closed form for the transitionless term; absent that, the generic
// synthesizer reconstructs it from the spectrum.
struct DrivenModel {
  virtual ~DrivenModel() = default;
  virtual int dim() const = 0;
  virtual HermitianOperator h0(double s) const = 0;
  virtual HermitianOperator dh0_ds(double s) const = 0;
  virtual std::optional<HermitianOperator> h1_analytic(double /*s*/,
                                                       double /*intensity_time*/) const {
    return std::nullopt;
  }
};

// Two-level avoided crossing: H0 = B(s) sigma_z + J sigma_x, with B following
// the protocol.
struct LZParams final : DrivenModel {
  double j = 5.0;
  Protocol protocol{ProtocolKind::smoothstep, -50.0, 50.0};

  LZParams() = default;
  LZParams(double j_, Protocol p) : j(j_), protocol(p) {}

  int dim() const override { return 2; }
  HermitianOperator h0(double s) const override;
  HermitianOperator dh0_ds(double s) const override;
  std::optional<HermitianOperator> h1_analytic(double s,
                                               double intensity_time) const override;
};

HermitianOperator lz_h0(const LZParams& params, double s);
HermitianOperator lz_dh0_ds(const LZParams& params, double s);

struct LzSpectrumH0 {
  double e_minus;
  double e_plus;
  double theta;  // mixing angle, ground state (-sin, cos), excited (cos, sin)
};

struct LzSpectrumTotal {
  double e_minus;
  double e_plus;
  double theta_c;
  double mu;
};

LzSpectrumH0 lz_spectrum_h0(const LZParams& params, double s);
LzSpectrumTotal lz_spectrum_total(const LZParams& params, double s, double tau_d);

// Transitionless amplitude J*Bdot / (2*T*(B^2+J^2)); enters the total spectrum
// through its square.
double lz_cd_amplitude(const LZParams& params, double s, double intensity_time);

// Analytic instantaneous eigenvectors of H0, level 0 = ground.
Vector lz_h0_state(const LZParams& params, double s, int level);

}  // namespace cdwork
