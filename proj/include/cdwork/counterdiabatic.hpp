#pragma once

#include <string>

#include "cdwork/lz_model.hpp"
#include "cdwork/operator_core.hpp"

namespace cdwork {

enum class CdMode { off, standard, tau_d_fixed };

// Which clock sets the transitionless-term intensity: the drive duration
// itself (standard, H1 ~ 1/tau) or a frozen tau_d (H1 ~ 1/tau_d independent of
// how fast the sweep actually runs).
struct CDConvention {
  CdMode mode = CdMode::standard;
  double tau_d = 0.0;  // consulted only in tau_d_fixed mode
};

std::string cd_mode_name(CdMode m);
CdMode cd_mode_from_name(const std::string& name);

// Berry-form transitionless term: i * sum_{m != n} |m><m|dH0/ds|n><n| / ((E_n - E_m) * T).
// Gauge independent; zero diagonal in the H0 eigenbasis.
HermitianOperator synthesize_h1(const DrivenModel& model, double s,
                                double intensity_time);

HermitianOperator lz_h1_analytic(const LZParams& params, double s,
                                 double intensity_time);

double intensity_time_for(const CDConvention& conv, double tau);

// H0(s) + H1(s), with H1 per the convention (absent entirely in off mode).
HermitianOperator total_hamiltonian(const DrivenModel& model, double s,
                                    const CDConvention& conv, double tau);

}  // namespace cdwork
