#include "cdwork/energetics.hpp"

#include <cmath>

namespace cdwork {

namespace {

// Mean of H(s_k) without object churn; hermiticity was enforced at storage.
double mean_energy_at(const EvolutionRecord& rec, int k, Vector& scratch) {
  scratch.noalias() = rec.ham_block(k) * rec.states().col(k);
  return rec.states().col(k).dot(scratch).real();
}

// The eigenvalue family the convention prescribes, plus its eigenvectors for
// the initial-state identification.
const Eigen::MatrixXd& family_eigenvalues(const EvolutionRecord& rec,
                                          Basis basis,
                                          const CDConvention& conv) {
  if (conv.mode == CdMode::off) {
    throw ConfigError("bookkeeping convention must be standard or tau_d_fixed");
  }
  if (conv.mode == CdMode::standard || basis == Basis::h0) {
    return rec.h0_eigenvalues();
  }
  // tau_d_fixed with the total basis: the stored spectra must carry the
  // intensity 1/tau_d the convention refers to.
  if (rec.meta().mode == CdMode::off ||
      rec.meta().intensity_time != conv.tau_d) {
    throw ConfigError(
        "record was not driven with intensity time matching tau_d = " +
        std::to_string(conv.tau_d));
  }
  return rec.total_eigenvalues();
}

bool family_is_total(const EvolutionRecord& rec, Basis basis,
                     const CDConvention& conv) {
  return conv.mode == CdMode::tau_d_fixed && basis == Basis::total &&
         !(rec.meta().mode == CdMode::off);
}

int locate_initial_level(const EvolutionRecord& rec, bool total_family) {
  const auto block = total_family ? rec.total_vec_block(0) : rec.h0_vec_block(0);
  const Vector amp = block.adjoint() * rec.states().col(0);
  int best = 0;
  double bestp = 0.0;
  for (int i = 0; i < rec.dim(); ++i) {
    const double p = std::norm(amp(i));
    if (p > bestp) {
      bestp = p;
      best = i;
    }
  }
  if (bestp < 1.0 - 1e-8) {
    throw InitialNotEigenstateError(
        "initial state overlaps the nearest eigenstate by only " +
        std::to_string(bestp));
  }
  return best;
}

}  // namespace

WorkSeries work_series(const EvolutionRecord& record, Basis adiabatic_basis,
                       const CDConvention& convention) {
  const Eigen::MatrixXd& family =
      family_eigenvalues(record, adiabatic_basis, convention);
  const bool total = family_is_total(record, adiabatic_basis, convention);
  const int level = locate_initial_level(record, total);
  const int pts = record.points();

  WorkSeries ws;
  ws.convention = convention;
  ws.level = level;
  ws.s = record.s_grid();
  ws.mean_energy.resize(pts);
  ws.work.resize(pts);
  ws.work_adiabatic.resize(pts);
  ws.work_excess.resize(pts);

  Vector scratch(record.dim());
  for (int k = 0; k < pts; ++k) {
    ws.mean_energy[k] = mean_energy_at(record, k, scratch);
  }
  const double e0 = ws.mean_energy[0];
  const double f0 = family(level, 0);
  for (int k = 0; k < pts; ++k) {
    ws.work[k] = ws.mean_energy[k] - e0;
    ws.work_adiabatic[k] = family(level, k) - f0;
    ws.work_excess[k] = ws.work[k] - ws.work_adiabatic[k];
  }
  return ws;
}

WorkDecomposition work_decomposition(const EvolutionRecord& record,
                                     int s_index) {
  if (s_index < 0 || s_index >= record.points()) {
    throw OutOfRangeError("grid index outside the record");
  }
  const int level = locate_initial_level(record, /*total_family=*/true);

  WorkDecomposition wd;
  wd.level = level;
  const auto block = record.total_vec_block(s_index);
  const Vector amp = block.adjoint() * record.states().col(s_index);
  wd.probabilities = amp.cwiseAbs2();
  wd.energies = record.total_eigenvalues().col(s_index);

  const double e_ref = record.total_eigenvalues()(level, 0);
  double w = 0.0;
  for (int m = 0; m < record.dim(); ++m) {
    w += wd.probabilities(m) * (wd.energies(m) - e_ref);
  }
  wd.work_reconstructed = w;
  return wd;
}

double excess_work_closed_form_lz(const LZParams& params, double s,
                                  double tau_d) {
  const double c = lz_cd_amplitude(params, s, tau_d);
  const double b = protocol_value(params.protocol, s);
  const double r0sq = b * b + params.j * params.j;
  return std::sqrt(r0sq + c * c) - std::sqrt(r0sq);
}

double time_average(const std::vector<double>& values, double tau) {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  const int n = static_cast<int>(values.size());
  if (n < 2) throw ConfigError("need at least two samples to average");
  double acc = 0.5 * (values.front() + values.back());
  for (int k = 1; k + 1 < n; ++k) acc += values[k];
  return acc / (n - 1);
}

TimeAveragedCosts time_averaged_costs(const EvolutionRecord& record,
                                      const CDConvention& convention) {
  const Eigen::MatrixXd& family =
      family_eigenvalues(record, Basis::total, convention);
  const int pts = record.points();
  const int n = record.dim();

  std::vector<double> wex(pts), gap(pts);
  Vector scratch(n);
  for (int k = 0; k < pts; ++k) {
    wex[k] = mean_energy_at(record, k, scratch) - family(0, k);
    gap[k] = record.total_eigenvalues()(n - 1, k) -
             record.total_eigenvalues()(0, k);
  }
  TimeAveragedCosts costs;
  costs.avg_excess_work = time_average(wex, record.tau());
  costs.avg_max_gap = time_average(gap, record.tau());
  return costs;
}

double avg_excess_work_closed_form_lz(const LZParams& params, double tau_d,
                                      int quad_points) {
  if (quad_points < 3) throw ConfigError("quadrature needs at least 3 points");
  std::vector<double> w(quad_points);
  for (int k = 0; k < quad_points; ++k) {
    const double s = static_cast<double>(k) / (quad_points - 1);
    w[k] = excess_work_closed_form_lz(params, s, tau_d);
  }
  return time_average(w, tau_d);
}

double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("slope fit needs matching vectors of length >= 2");
  }
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < n; ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) {
      throw ConfigError("log-log fit requires positive data");
    }
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace cdwork
