#pragma once

#include <optional>

#include "cdwork/energetics.hpp"
#include "cdwork/propagation.hpp"

namespace cdwork {

double bures_angle(const PureState& a, const PureState& b);

// Minimal-evolution-time bounds; a bound is absent when its denominator
// vanishes (stationary evolution, or exactly zero excess work under the
// standard bookkeeping of a transitionless run).
std::optional<double> mt_bound(const EvolutionRecord& record);
std::optional<double> excess_work_bound(const EvolutionRecord& record,
                                        const CDConvention& convention);
std::optional<double> ml_trace_bound(const EvolutionRecord& record);

struct QSLReport {
  double tau = 0.0;
  double bures_angle = 0.0;
  std::optional<double> tau_mt;
  std::optional<double> tau_wex;
  std::optional<double> tau_ml;
  bool ordering_ok = false;  // every present bound <= tau, 1e-9 relative slack
};

QSLReport qsl_report(const EvolutionRecord& record,
                     const CDConvention& convention);

// Margins of the two inequality steps between the MT bound and the
// excess-work bound, evaluated pointwise on the record grid.
struct QslChain {
  double bd_margin_min = 0.0;  // min over s of dE*W_ex - std^2
  double cs_margin = 0.0;      // sqrt(avg_dE * avg_W_ex) - avg sqrt(dE*W_ex)
};

QslChain chain_diagnostics(const EvolutionRecord& record,
                           const CDConvention& convention);

}  // namespace cdwork
