#pragma once

#include <vector>

#include "cdwork/propagation.hpp"

namespace cdwork {

// Work bookkeeping along a run.  work = mean_energy - mean_energy(0);
// work_adiabatic follows one instantaneous eigenvalue; work_excess is their
// difference, identically.
struct WorkSeries {
  std::vector<double> s;
  std::vector<double> mean_energy;
  std::vector<double> work;
  std::vector<double> work_adiabatic;
  std::vector<double> work_excess;
  CDConvention convention;
  int level = 0;
};

// The adiabatic eigenvalue family depends on the bookkeeping convention:
// standard takes the slow-drive limit, where the transitionless term dies off
// and the total spectrum collapses onto H0's; tau_d_fixed keeps the intensity
// 1/tau_d frozen, so the recorded total spectrum is the family.  The record
// must have been driven with the matching intensity for the latter.
WorkSeries work_series(const EvolutionRecord& record, Basis adiabatic_basis,
                       const CDConvention& convention);

struct WorkDecomposition {
  int level = 0;
  Eigen::VectorXd probabilities;  // p_{m|l} at the grid point
  Eigen::VectorXd energies;       // E_m at the grid point
  double work_reconstructed = 0.0;
};

// Work at one grid point rebuilt from transition probabilities in the total-H
// eigenbasis: sum_m p_m (E_m(s) - E_l(0)).
WorkDecomposition work_decomposition(const EvolutionRecord& record, int s_index);

double excess_work_closed_form_lz(const LZParams& params, double s, double tau_d);

// Trapezoid over s; with t = s*tau the 1/tau and dt factors cancel, so this is
// the time average.
double time_average(const std::vector<double>& values, double tau);

struct TimeAveragedCosts {
  double avg_excess_work = 0.0;
  double avg_max_gap = 0.0;
};

TimeAveragedCosts time_averaged_costs(const EvolutionRecord& record,
                                      const CDConvention& convention);

// Quadrature of the closed-form excess work over s at fixed tau_d.
double avg_excess_work_closed_form_lz(const LZParams& params, double tau_d,
                                      int quad_points = 200001);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

}  // namespace cdwork
