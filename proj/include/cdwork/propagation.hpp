#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cdwork/counterdiabatic.hpp"
#include "cdwork/lz_model.hpp"
#include "cdwork/operator_core.hpp"

namespace cdwork {

enum class Basis { h0, total };

struct PropagateOptions {
  int steps = 4000;
  bool certify = true;
  double convergence_tol = 1e-8;
  std::optional<PureState> initial;  // default: ground state of H0(0)
};

// Trajectory plus everything evaluated on the grid.  Spectra and Hamiltonians
// are stored column-blockwise (block k at columns [k*dim, (k+1)*dim)) to keep
// one flat allocation per field.
class EvolutionRecord {
 public:
  struct Meta {
    double tau = 0.0;
    int steps = 0;
    CdMode mode = CdMode::off;
    double intensity_time = 0.0;  // 0 when mode == off
    double j = 0.0;
    double b_initial = 0.0;
    double b_final = 0.0;
    ProtocolKind protocol = ProtocolKind::smoothstep;
    bool h1_nonzero_at_boundary = false;
    bool certified = false;
    double halving_difference = 0.0;  // meaningful only when certified
  };

  int dim() const { return static_cast<int>(states_.rows()); }
  int steps() const { return meta_.steps; }
  int points() const { return meta_.steps + 1; }
  double tau() const { return meta_.tau; }
  const Meta& meta() const { return meta_; }

  double s_at(int k) const { return grid_[k]; }
  const std::vector<double>& s_grid() const { return grid_; }

  PureState state_at(int k) const { return PureState(states_.col(k)); }
  HermitianOperator hamiltonian_at(int k) const {
    return HermitianOperator(ham_block(k));
  }
  SpectralDecomposition h0_spectrum_at(int k) const;
  SpectralDecomposition total_spectrum_at(int k) const;

  // Raw views for the quadrature loops.
  const Matrix& states() const { return states_; }
  const Eigen::MatrixXd& h0_eigenvalues() const { return h0_evals_; }
  const Eigen::MatrixXd& total_eigenvalues() const { return total_evals_; }
  Eigen::Block<const Matrix> ham_block(int k) const {
    return hams_.block(0, k * dim_, dim_, dim_);
  }
  Eigen::Block<const Matrix> h0_vec_block(int k) const {
    return h0_evecs_.block(0, k * dim_, dim_, dim_);
  }
  Eigen::Block<const Matrix> total_vec_block(int k) const {
    return total_evecs_.block(0, k * dim_, dim_, dim_);
  }

 private:
  friend EvolutionRecord propagate(const DrivenModel&, const CDConvention&,
                                   double, const PropagateOptions&);
  int dim_ = 0;
  Meta meta_;
  std::vector<double> grid_;
  Matrix states_;
  Eigen::MatrixXd h0_evals_;
  Matrix h0_evecs_;
  Eigen::MatrixXd total_evals_;
  Matrix total_evecs_;
  Matrix hams_;
};

// Exponential-midpoint march of the driven Schroedinger equation on a uniform
// s-grid: U_k = exp(-i (tau/M) H(s_k + 1/(2M))), applied via the midpoint
// spectral decomposition, so every step is unitary to roundoff.  With certify
// on, the run is repeated at 2M steps (states not recorded) and the final-state
// difference must come in under convergence_tol.
EvolutionRecord propagate(const DrivenModel& model, const CDConvention& conv,
                          double tau, const PropagateOptions& opts = {});

// Final state only; the cheap path used for certification and grid studies.
PureState propagate_final(const DrivenModel& model, const CDConvention& conv,
                          double tau, int steps,
                          const std::optional<PureState>& initial = std::nullopt);

// p_m(s_k) = |<m(s_k)|psi(s_k)>|^2 in the chosen instantaneous eigenbasis.
// Rows are levels, columns grid points; each column sums to 1 within 1e-9.
Eigen::MatrixXd transition_probabilities(const EvolutionRecord& record,
                                         Basis basis);

struct AdiabaticReference {
  int level = 0;
  std::vector<double> s;
  std::vector<double> gamma;  // geometric phase, radians
  std::vector<double> omega;  // dynamical phase, radians
  Matrix states;              // e^{i gamma} e^{-i omega} |n(s)>, phase-continuous
};

// Eigenstate-following trajectory with both phases, built from a fresh grid of
// the reference Hamiltonian H0.  Eigenvector continuity is enforced by phase
// alignment between neighbors before the connection quadrature; the recorded
// per-point gauge stays as eigendecompose fixes it.
AdiabaticReference adiabatic_reference(const DrivenModel& model, double tau,
                                       int level, int steps);

// Same, following eigenstates of the full driven Hamiltonian.
AdiabaticReference adiabatic_reference_total(const DrivenModel& model,
                                             const CDConvention& conv,
                                             double tau, int level, int steps);

}  // namespace cdwork
