#include "cdwork/operator_core.hpp"

#include <algorithm>
#include <cmath>

namespace cdwork {

namespace {

double max_abs_coeff(const Matrix& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 2) {
    throw DimensionError("operator must be square with dim >= 2");
  }
  const double scale = std::max(max_abs_coeff(mat_), 1.0);
  const double dev = max_abs_coeff(mat_ - mat_.adjoint());
  if (dev > 1e-12 * scale) {
    throw NonHermitianError("matrix deviates from hermiticity by " +
                            std::to_string(dev));
  }
  // Symmetrize so later algebra never sees the roundoff-level skew part.
  mat_ = ((mat_ + mat_.adjoint()) / 2.0).eval();
}

PureState::PureState(Vector v) : vec_(std::move(v)) {
  if (vec_.rows() < 2) {
    throw DimensionError("state must have dim >= 2");
  }
  const double n = vec_.norm();
  if (std::abs(n - 1.0) > 1e-10) {
    throw NormViolationError("state norm " + std::to_string(n) +
                             " departs from 1 beyond 1e-10");
  }
  vec_ /= n;
}

void gauge_fix_columns(Matrix& vectors) {
  const int n = static_cast<int>(vectors.rows());
  for (int k = 0; k < static_cast<int>(vectors.cols()); ++k) {
    int imax = 0;
    double vmax = std::abs(vectors(0, k));
    for (int i = 1; i < n; ++i) {
      const double a = std::abs(vectors(i, k));
      if (a > vmax) {  // strict: ties keep the lowest index
        vmax = a;
        imax = i;
      }
    }
    if (vmax == 0.0) {
      throw NumericalError("zero eigenvector column");
    }
    const Cx phase = std::conj(vectors(imax, k)) / vmax;
    vectors.col(k) *= phase;
    vectors(imax, k) = Cx(std::abs(vectors(imax, k)), 0.0);
  }
}

namespace detail {

void eigendecompose_into(Matrix& a, Eigen::VectorXd& evals, Matrix& vecs) {
  const int n = static_cast<int>(a.rows());
  vecs.setIdentity();

  const double fro = a.norm();
  const double off_target = 1e-14 * std::max(fro, 1e-300);
  const double skip_below = 1e-150 * std::max(fro, 1.0);

  auto off_mass = [&]() {
    double acc = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) acc += 2.0 * std::norm(a(p, q));
    return std::sqrt(acc);
  };

  int sweeps = 0;
  while (off_mass() > off_target) {
    if (++sweeps > 50) {
      throw NumericalError("jacobi sweep limit exceeded");
    }
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Cx g = a(p, q);
        const double ag = std::abs(g);
        if (ag <= skip_below) continue;

        // Phase out the pivot, then the usual stable real rotation.
        const Cx eiphi = g / ag;
        const double alpha = a(p, p).real();
        const double beta = a(q, q).real();
        const double tau = (beta - alpha) / (2.0 * ag);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Cx jp = c * eiphi;  // column p mixes with  jp, -s
        const Cx jq = s * eiphi;  // column q mixes with  jq,  c

        for (int r = 0; r < n; ++r) {
          const Cx arp = a(r, p), arq = a(r, q);
          a(r, p) = arp * jp - arq * s;
          a(r, q) = arp * jq + arq * c;
        }
        for (int r = 0; r < n; ++r) {
          const Cx apr = a(p, r), aqr = a(q, r);
          a(p, r) = std::conj(jp) * apr - s * aqr;
          a(q, r) = std::conj(jq) * apr + c * aqr;
        }
        a(p, q) = Cx(0.0, 0.0);
        a(q, p) = Cx(0.0, 0.0);
        for (int r = 0; r < n; ++r) {
          const Cx vrp = vecs(r, p), vrq = vecs(r, q);
          vecs(r, p) = vrp * jp - vrq * s;
          vecs(r, q) = vrp * jq + vrq * c;
        }
      }
    }
  }

  for (int k = 0; k < n; ++k) evals(k) = a(k, k).real();
  // Selection sort; n is small and column swaps stay in place.
  for (int k = 0; k + 1 < n; ++k) {
    int kmin = k;
    for (int i = k + 1; i < n; ++i) {
      if (evals(i) < evals(kmin)) kmin = i;
    }
    if (kmin != k) {
      std::swap(evals(k), evals(kmin));
      vecs.col(k).swap(vecs.col(kmin));
    }
  }
  gauge_fix_columns(vecs);

  const double width = evals(n - 1) - evals(0);
  const double gap_tol = 1e-10 * width;
  for (int k = 0; k + 1 < n; ++k) {
    if (evals(k + 1) - evals(k) <= gap_tol) {
      throw DegenerateSpectrumError(
          "eigenvalue gap at level " + std::to_string(k) +
          " is below 1e-10 of the spectral width");
    }
  }
}

}  // namespace detail

SpectralDecomposition eigendecompose(const HermitianOperator& op) {
  const int n = op.dim();
  Matrix a = op.matrix();
  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  detail::eigendecompose_into(a, out.eigenvalues, out.eigenvectors);
  return out;
}

namespace {

void check_dims(const HermitianOperator& op, const PureState& psi) {
  if (op.dim() != psi.dim()) {
    throw DimensionError("operator and state dimensions differ");
  }
}

}  // namespace

double expectation(const HermitianOperator& op, const PureState& psi) {
  check_dims(op, psi);
  const Vector apsi = op.matrix() * psi.vector();
  const Cx val = psi.vector().dot(apsi);
  const double tol = 1e-10 * std::max(1.0, apsi.norm());
  if (std::abs(val.imag()) > tol) {
    throw NumericalError("expectation has imaginary residue " +
                         std::to_string(val.imag()));
  }
  return val.real();
}

double energy_std(const HermitianOperator& op, const PureState& psi) {
  check_dims(op, psi);
  const Vector apsi = op.matrix() * psi.vector();
  const Cx mean_c = psi.vector().dot(apsi);
  const double mean = mean_c.real();
  const double second = apsi.squaredNorm();
  return std::sqrt(std::max(0.0, second - mean * mean));
}

double trace_norm_product(const HermitianOperator& op, const PureState& psi) {
  check_dims(op, psi);
  return (op.matrix() * psi.vector()).norm();
}

}  // namespace cdwork
