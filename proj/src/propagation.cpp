#include "cdwork/propagation.hpp"

#include <cmath>

namespace cdwork {

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Vector initial_state_for(const DrivenModel& model,
                         const std::optional<PureState>& initial) {
  if (initial) {
    if (initial->dim() != model.dim()) {
      throw DimensionError("initial state dimension does not match the model");
    }
    return initial->vector();
  }
  const SpectralDecomposition sd = eigendecompose(model.h0(0.0));
  return sd.eigenvectors.col(0);
}

// One total-Hamiltonian evaluation; h1 comes from the model's closed form when
// it has one, otherwise from the generic synthesizer.
void build_total(const DrivenModel& model, const CDConvention& conv, double tau,
                 double s, Matrix& out) {
  out = model.h0(s).matrix();
  if (conv.mode == CdMode::off) return;
  const double T = intensity_time_for(conv, tau);
  const std::optional<HermitianOperator> a = model.h1_analytic(s, T);
  if (a) {
    out += a->matrix();
  } else {
    out += synthesize_h1(model, s, T).matrix();
  }
}

struct Marcher {
  const DrivenModel& model;
  const CDConvention& conv;
  double tau;
  int steps;
  int n;
  double dt;

  Matrix work, vecs, htot;
  Eigen::VectorXd evals;
  Vector psi, phased, next;

  Marcher(const DrivenModel& m, const CDConvention& c, double tau_, int steps_)
      : model(m),
        conv(c),
        tau(tau_),
        steps(steps_),
        n(m.dim()),
        dt(tau_ / steps_),
        work(n, n),
        vecs(n, n),
        htot(n, n),
        evals(n),
        psi(n),
        phased(n),
        next(n) {}

  void advance(int k) {
    const double smid = (k + 0.5) / steps;
    build_total(model, conv, tau, smid, htot);
    work = htot;
    detail::eigendecompose_into(work, evals, vecs);
    phased.noalias() = vecs.adjoint() * psi;
    for (int i = 0; i < n; ++i) {
      phased(i) *= std::polar(1.0, -dt * evals(i));
    }
    next.noalias() = vecs * phased;
    if (std::abs(next.norm() - psi.norm()) > 1e-12) {
      throw NonUnitaryStepError("norm changed by more than 1e-12 in one step");
    }
    psi.swap(next);
  }
};

void validate_run(const DrivenModel& model, const CDConvention& conv,
                  double tau, int steps) {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (steps < 100) throw ConfigError("steps must be at least 100");
  if (conv.mode != CdMode::off) intensity_time_for(conv, tau);
  if (model.dim() < 2) throw DimensionError("model dim must be >= 2");
}

}  // namespace

SpectralDecomposition EvolutionRecord::h0_spectrum_at(int k) const {
  SpectralDecomposition sd;
  sd.eigenvalues = h0_evals_.col(k);
  sd.eigenvectors = h0_vec_block(k);
  return sd;
}

SpectralDecomposition EvolutionRecord::total_spectrum_at(int k) const {
  SpectralDecomposition sd;
  sd.eigenvalues = total_evals_.col(k);
  sd.eigenvectors = total_vec_block(k);
  return sd;
}

PureState propagate_final(const DrivenModel& model, const CDConvention& conv,
                          double tau, int steps,
                          const std::optional<PureState>& initial) {
  validate_run(model, conv, tau, steps);
  Marcher m(model, conv, tau, steps);
  m.psi = initial_state_for(model, initial);
  for (int k = 0; k < steps; ++k) m.advance(k);
  return PureState(m.psi);
}

EvolutionRecord propagate(const DrivenModel& model, const CDConvention& conv,
                          double tau, const PropagateOptions& opts) {
  validate_run(model, conv, tau, opts.steps);
  const int n = model.dim();
  const int M = opts.steps;

  EvolutionRecord rec;
  rec.dim_ = n;
  rec.grid_.resize(M + 1);
  rec.states_.resize(n, M + 1);
  rec.h0_evals_.resize(n, M + 1);
  rec.h0_evecs_.resize(n, n * (M + 1));
  rec.total_evals_.resize(n, M + 1);
  rec.total_evecs_.resize(n, n * (M + 1));
  rec.hams_.resize(n, n * (M + 1));

  EvolutionRecord::Meta meta;
  meta.tau = tau;
  meta.steps = M;
  meta.mode = conv.mode;
  meta.intensity_time =
      conv.mode == CdMode::off ? 0.0 : intensity_time_for(conv, tau);
  if (const auto* lz = dynamic_cast<const LZParams*>(&model)) {
    meta.j = lz->j;
    meta.b_initial = lz->protocol.lambda_i;
    meta.b_final = lz->protocol.lambda_f;
    meta.protocol = lz->protocol.kind;
  }

  Marcher m(model, conv, tau, M);
  Matrix h0m(n, n);
  bool boundary_h1 = false;

  for (int k = 0; k <= M; ++k) {
    const double s = static_cast<double>(k) / M;
    rec.grid_[k] = s;

    h0m = model.h0(s).matrix();
    m.work = h0m;
    detail::eigendecompose_into(m.work, m.evals, m.vecs);
    rec.h0_evals_.col(k) = m.evals;
    rec.h0_evecs_.block(0, k * n, n, n) = m.vecs;

    if (k == 0) {
      m.psi = opts.initial ? opts.initial->vector() : m.vecs.col(0);
      if (opts.initial && opts.initial->dim() != n) {
        throw DimensionError("initial state dimension does not match the model");
      }
    }
    rec.states_.col(k) = m.psi;

    build_total(model, conv, tau, s, m.htot);
    rec.hams_.block(0, k * n, n, n) = m.htot;
    if (conv.mode != CdMode::off && (k == 0 || k == M)) {
      const double dev = max_abs(m.htot - h0m);
      if (dev > 1e-12 * std::max(1.0, max_abs(h0m))) boundary_h1 = true;
    }
    m.work = m.htot;
    detail::eigendecompose_into(m.work, m.evals, m.vecs);
    rec.total_evals_.col(k) = m.evals;
    rec.total_evecs_.block(0, k * n, n, n) = m.vecs;

    if (k < M) m.advance(k);
  }

  if (std::abs(m.psi.norm() - 1.0) > 1e-9) {
    throw NonUnitaryStepError("accumulated norm drift beyond 1e-9");
  }
  meta.h1_nonzero_at_boundary = boundary_h1;

  if (opts.certify) {
    const PureState fine = propagate_final(
        model, conv, tau, 2 * M,
        opts.initial ? opts.initial
                     : std::make_optional(PureState(rec.states_.col(0))));
    const double diff = (m.psi - fine.vector()).norm();
    meta.certified = true;
    meta.halving_difference = diff;
    if (diff > opts.convergence_tol) {
      rec.meta_ = meta;
      throw NotConvergedError(
          "step-halving difference " + std::to_string(diff) +
          " exceeds tolerance " + std::to_string(opts.convergence_tol) +
          "; raise steps or loosen convergence_tol");
    }
  }

  rec.meta_ = meta;
  return rec;
}

Eigen::MatrixXd transition_probabilities(const EvolutionRecord& record,
                                         Basis basis) {
  const int n = record.dim();
  const int pts = record.points();
  Eigen::MatrixXd p(n, pts);
  Vector amp(n);
  for (int k = 0; k < pts; ++k) {
    const auto block = basis == Basis::h0 ? record.h0_vec_block(k)
                                          : record.total_vec_block(k);
    amp.noalias() = block.adjoint() * record.states().col(k);
    p.col(k) = amp.cwiseAbs2();
    if (std::abs(p.col(k).sum() - 1.0) > 1e-9) {
      throw NumericalError("transition probabilities at grid point " +
                           std::to_string(k) + " do not sum to 1");
    }
  }
  return p;
}

namespace {

AdiabaticReference make_reference(const std::function<void(double, Matrix&)>& build,
                                  int dim, double tau, int level, int steps) {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (steps < 100) throw ConfigError("steps must be at least 100");
  if (level < 0 || level >= dim) {
    throw OutOfRangeError("eigenindex outside [0, dim)");
  }
  const int pts = steps + 1;
  const double ds = 1.0 / steps;

  AdiabaticReference ref;
  ref.level = level;
  ref.s.resize(pts);
  ref.gamma.assign(pts, 0.0);
  ref.omega.assign(pts, 0.0);
  ref.states.resize(dim, pts);

  Matrix a(dim, dim), vecs(dim, dim), path(dim, pts);
  Eigen::VectorXd evals(dim), energy(pts);
  for (int k = 0; k < pts; ++k) {
    const double s = static_cast<double>(k) / steps;
    ref.s[k] = s;
    build(s, a);
    detail::eigendecompose_into(a, evals, vecs);
    energy(k) = evals(level);
    path.col(k) = vecs.col(level);
  }

  // Phase-continuous gauge along the path; the per-point gauge from the solver
  // can flip sign where the dominant component migrates.
  for (int k = 1; k < pts; ++k) {
    const Cx ov = path.col(k - 1).dot(path.col(k));
    const double mag = std::abs(ov);
    if (mag < 0.5) {
      throw PhaseConsistencyError(
          "adjacent eigenvectors nearly orthogonal at grid point " +
          std::to_string(k) + "; grid too coarse to track the level");
    }
    path.col(k) *= std::conj(ov) / mag;
  }

  std::vector<double> conn_re(pts), conn_im(pts);
  Vector d(dim);
  for (int k = 0; k < pts; ++k) {
    if (k == 0) {
      d = (path.col(1) - path.col(0)) / ds;
    } else if (k == pts - 1) {
      d = (path.col(k) - path.col(k - 1)) / ds;
    } else {
      d = (path.col(k + 1) - path.col(k - 1)) / (2.0 * ds);
    }
    const Cx c = path.col(k).dot(d);
    conn_re[k] = c.real();
    conn_im[k] = c.imag();
  }

  double re_accum = 0.0;
  for (int k = 1; k < pts; ++k) {
    re_accum += 0.5 * (conn_re[k - 1] + conn_re[k]) * ds;
    ref.gamma[k] = ref.gamma[k - 1] - 0.5 * (conn_im[k - 1] + conn_im[k]) * ds;
    ref.omega[k] =
        ref.omega[k - 1] + 0.5 * (energy(k - 1) + energy(k)) * ds * tau;
  }
  if (std::abs(re_accum) > 1e-8) {
    throw PhaseConsistencyError(
        "real part of the connection integrates to " +
        std::to_string(re_accum) + "; eigenvector path is not norm-preserving");
  }

  for (int k = 0; k < pts; ++k) {
    ref.states.col(k) =
        std::polar(1.0, ref.gamma[k] - ref.omega[k]) * path.col(k);
  }
  return ref;
}

}  // namespace

AdiabaticReference adiabatic_reference(const DrivenModel& model, double tau,
                                       int level, int steps) {
  auto build = [&model](double s, Matrix& a) { a = model.h0(s).matrix(); };
  return make_reference(build, model.dim(), tau, level, steps);
}

AdiabaticReference adiabatic_reference_total(const DrivenModel& model,
                                             const CDConvention& conv,
                                             double tau, int level, int steps) {
  auto build = [&](double s, Matrix& a) {
    build_total(model, conv, tau, s, a);
  };
  return make_reference(build, model.dim(), tau, level, steps);
}

}  // namespace cdwork
