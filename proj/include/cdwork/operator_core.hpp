#pragma once

#include <complex>
#include <eigen3/Eigen/Dense>
#include <vector>

#include "cdwork/errors.hpp"

namespace cdwork {

using Cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Hermitian matrix with the hermiticity checked once at construction.
// Invariants: dim >= 2, max|A - A^dag| <= 1e-12 * max|A| (absolute 1e-12 when A ~ 0).
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

// Unit-norm state vector.  Invariant: | ||psi|| - 1 | <= 1e-10 at construction;
// the stored vector is renormalized exactly so downstream algebra starts clean.
class PureState {
 public:
  explicit PureState(Vector v);

  int dim() const { return static_cast<int>(vec_.rows()); }
  const Vector& vector() const { return vec_; }

 private:
  Vector vec_;
};

// Eigensystem with eigenvalues ascending and eigenvectors column k matching
// eigenvalues[k].  Gauge per column: the largest-magnitude component (ties to the
// lowest index) is real and positive.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;

  double spectral_width() const {
    return eigenvalues(eigenvalues.size() - 1) - eigenvalues(0);
  }
};

// Cyclic complex Jacobi.  Sweeps Hermitian 2x2 subproblems until the off-diagonal
// Frobenius mass falls below 1e-14 * ||A||_F (one sweep is exact for dim 2).
// Throws DegenerateSpectrumError when an adjacent gap is at or below
// 1e-10 * spectral width; callers relying on isolated levels get a loud failure
// instead of a garbage gauge.
SpectralDecomposition eigendecompose(const HermitianOperator& op);

namespace detail {

// Same algorithm, allocation-free: `a` is consumed as workspace, `evals` and
// `vecs` must be presized to n and n x n.  Ascending order, fixed gauge,
// degeneracy check included.
void eigendecompose_into(Matrix& a, Eigen::VectorXd& evals, Matrix& vecs);

}  // namespace detail

// Applies the fixed gauge to each column in place; exposed for tests.
void gauge_fix_columns(Matrix& vectors);

// <psi|A|psi>.  The imaginary residue must stay below 1e-10 * scale; anything
// larger means A or psi is corrupted.
double expectation(const HermitianOperator& op, const PureState& psi);

// sqrt(<A^2> - <A>^2), clamped at zero before the root.
double energy_std(const HermitianOperator& op, const PureState& psi);

// ||A|psi>||, the trace norm of A|psi><psi| for a pure state.
double trace_norm_product(const HermitianOperator& op, const PureState& psi);

}  // namespace cdwork
