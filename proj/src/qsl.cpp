#include "cdwork/qsl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cdwork {

namespace {

constexpr double kTinyDenominator = 1e-14;

double record_bures_angle(const EvolutionRecord& rec) {
  const Cx ov = rec.states().col(0).dot(rec.states().col(rec.points() - 1));
  return std::acos(std::clamp(std::abs(ov), 0.0, 1.0));
}

// Instantaneous mean, std and ||H psi|| in one pass over a grid point.
struct PointCosts {
  double mean;
  double std_dev;
  double trace_norm;
};

PointCosts point_costs(const EvolutionRecord& rec, int k, Vector& scratch) {
  scratch.noalias() = rec.ham_block(k) * rec.states().col(k);
  // Rayleigh quotients: the stored state may carry a norm drift of up to the
  // propagation tolerance, which would otherwise bias ||H psi||^2 by that
  // drift times the squared spectral radius.
  const double n2 = rec.states().col(k).squaredNorm();
  const double mean = rec.states().col(k).dot(scratch).real() / n2;
  const double second = scratch.squaredNorm() / n2;
  return {mean, std::sqrt(std::max(0.0, second - mean * mean)),
          std::sqrt(second)};
}

// The derivation assumes preparation in the ground state; that is the ground
// of the reference Hamiltonian (for a linear ramp with CD the total H at s=0
// has no eigenstate the system could have been prepared in anyway).
void require_ground_start(const EvolutionRecord& rec) {
  const double p0 =
      std::norm(Cx(rec.h0_vec_block(0).col(0).dot(rec.states().col(0))));
  if (p0 < 1.0 - 1e-8) {
    throw InitialNotEigenstateError(
        "excess-work bound assumes a ground-state start; overlap is " +
        std::to_string(p0));
  }
}

}  // namespace

double bures_angle(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("states live in different dimensions");
  }
  const double ov = std::abs(a.vector().dot(b.vector()));
  return std::acos(std::clamp(ov, 0.0, 1.0));
}

std::optional<double> mt_bound(const EvolutionRecord& record) {
  const int pts = record.points();
  std::vector<double> stds(pts);
  Vector scratch(record.dim());
  for (int k = 0; k < pts; ++k) {
    stds[k] = point_costs(record, k, scratch).std_dev;
  }
  const double denom = time_average(stds, record.tau());
  const double angle = record_bures_angle(record);
  if (denom < kTinyDenominator) {
    // Stationary evolution: zero distance over zero speed is a zero-time
    // bound, not an indeterminate one.
    return angle < kTinyDenominator ? std::optional<double>(0.0) : std::nullopt;
  }
  return angle / denom;
}

std::optional<double> excess_work_bound(const EvolutionRecord& record,
                                        const CDConvention& convention) {
  require_ground_start(record);
  // Transitionless run booked in the standard convention: the excess work is
  // exactly zero in the slow-drive eigenvalue family, so the bound has nothing
  // to divide by.  Decided here rather than by thresholding integrator noise.
  if (convention.mode == CdMode::standard &&
      record.meta().mode == CdMode::standard) {
    return std::nullopt;
  }
  const TimeAveragedCosts costs = time_averaged_costs(record, convention);
  const double denom_sq = costs.avg_max_gap * costs.avg_excess_work;
  const double angle = record_bures_angle(record);
  if (denom_sq < kTinyDenominator * kTinyDenominator) {
    return angle < kTinyDenominator ? std::optional<double>(0.0) : std::nullopt;
  }
  return angle / std::sqrt(denom_sq);
}

std::optional<double> ml_trace_bound(const EvolutionRecord& record) {
  const int pts = record.points();
  std::vector<double> norms(pts);
  Vector scratch(record.dim());
  for (int k = 0; k < pts; ++k) {
    norms[k] = point_costs(record, k, scratch).trace_norm;
  }
  const double denom = time_average(norms, record.tau());
  const double angle = record_bures_angle(record);
  if (denom < kTinyDenominator) {
    return angle < kTinyDenominator ? std::optional<double>(0.0) : std::nullopt;
  }
  const double sl = std::sin(angle);
  return sl * sl / denom;
}

QSLReport qsl_report(const EvolutionRecord& record,
                     const CDConvention& convention) {
  QSLReport rep;
  rep.tau = record.tau();
  rep.bures_angle = record_bures_angle(record);
  rep.tau_mt = mt_bound(record);
  rep.tau_wex = excess_work_bound(record, convention);
  rep.tau_ml = ml_trace_bound(record);

  const double limit = record.tau() * (1.0 + 1e-9);
  auto ok = [limit](const std::optional<double>& b) {
    return !b || *b <= limit;
  };
  rep.ordering_ok = ok(rep.tau_mt) && ok(rep.tau_wex) && ok(rep.tau_ml);
  return rep;
}

// The margins use the spectrum the state actually evolved under, so the
// convention argument is kept for signature symmetry only.
QslChain chain_diagnostics(const EvolutionRecord& record,
                           const CDConvention& /*convention*/) {
  require_ground_start(record);
  const Eigen::MatrixXd& total = record.total_eigenvalues();
  const int pts = record.points();
  const int n = record.dim();

  std::vector<double> wex(pts), gap(pts), root(pts);
  double bd_min = std::numeric_limits<double>::infinity();
  Vector scratch(record.dim());
  for (int k = 0; k < pts; ++k) {
    const PointCosts pc = point_costs(record, k, scratch);
    gap[k] = total(n - 1, k) - total(0, k);
    wex[k] = pc.mean - total(0, k);
    const double product = gap[k] * wex[k];
    bd_min = std::min(bd_min, product - pc.std_dev * pc.std_dev);
    root[k] = std::sqrt(std::max(0.0, product));
  }
  QslChain chain;
  chain.bd_margin_min = bd_min;
  chain.cs_margin =
      std::sqrt(time_average(gap, record.tau()) *
                time_average(wex, record.tau())) -
      time_average(root, record.tau());
  return chain;
}

}  // namespace cdwork
