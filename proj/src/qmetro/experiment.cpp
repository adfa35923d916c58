#include "qmetro/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qmetro/analytics.hpp"

namespace qmetro {

using json = nlohmann::ordered_json;

void RunCounters::add(const TrajectoryStats& s) {
  max_trace_drift = std::max(max_trace_drift, s.max_trace_drift);
  max_hermiticity_drift = std::max(max_hermiticity_drift, s.max_hermiticity_drift);
  min_eigenvalue = std::min(min_eigenvalue, s.min_eigenvalue);
  renormalizations += s.renormalizations;
  propagators += s.propagators;
}

void RunCounters::merge(const RunCounters& o) {
  max_trace_drift = std::max(max_trace_drift, o.max_trace_drift);
  max_hermiticity_drift = std::max(max_hermiticity_drift, o.max_hermiticity_drift);
  min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
  renormalizations += o.renormalizations;
  propagators += o.propagators;
  clamped_qfi += o.clamped_qfi;
  richardson_failures += o.richardson_failures;
  max_richardson_discrepancy = std::max(max_richardson_discrepancy, o.max_richardson_discrepancy);
  cross_checks += o.cross_checks;
  cross_check_failures += o.cross_check_failures;
  rank_warnings += o.rank_warnings;
  refinement_warnings += o.refinement_warnings;
  unsaturated_backflow += o.unsaturated_backflow;
  linear_response += o.linear_response;
}

namespace {

struct PointResult {
  Table table;
  RunCounters counters;
};

PointResult run_evolve(const ExperimentConfig& c) {
  const TimeGrid times = c.grid.build();
  const Trajectory traj = evolve(Liouvillian::build(c.params), c.initial.state(c.params), times);
  PointResult r;
  r.counters.add(traj.stats);
  r.table.columns = {"t", "probe_ee", "probe_gg", "probe_eg_re", "probe_eg_im", "ancilla_ee", "purity"};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Mat4& rho = traj.states[k];
    const Mat2 p = partial_trace(rho, Factor::Ancilla);
    const Mat2 a = partial_trace(rho, Factor::Probe);
    const double purity = (rho * rho).trace().real();
    r.table.rows.push_back({times[k], p(0, 0).real(), p(1, 1).real(), p(0, 1).real(),
                            p(0, 1).imag(), a(0, 0).real(), purity});
  }
  return r;
}

void tally(RunCounters& rc, const FisherCurve& f) {
  rc.clamped_qfi += f.clamped;
  rc.cross_checks += f.cross_checks;
  rc.cross_check_failures += f.cross_check_failures;
  rc.rank_warnings += f.rank_warnings;
}

PointResult run_qfi(const ExperimentConfig& c) {
  const TimeGrid times = c.grid.build();
  const StateDerivative d =
      state_derivative(c.params, c.target, c.initial.state(c.params), times, c.derivative);
  PointResult r;
  r.counters.add(d.stats);
  r.counters.richardson_failures += d.richardson_failures;
  r.counters.max_richardson_discrepancy = d.max_discrepancy;
  r.table.columns = {"t"};
  std::vector<FisherCurve> curves;
  for (Subsystem s : c.subsystems) {
    curves.push_back(qfi_from_derivative(d, s));
    tally(r.counters, curves.back());
    r.table.columns.push_back("qfi_" + std::string(to_string(s)));
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<Cell> row{times[k]};
    for (const FisherCurve& f : curves) row.emplace_back(f.values[k]);
    r.table.rows.push_back(std::move(row));
  }
  return r;
}

PointResult run_nonmarkov(const ExperimentConfig& c) {
  const DensityMatrix ancilla(c.initial.ancilla.matrix(c.params));
  BackflowCurve b;
  if (c.saturate) {
    b = saturated_backflow(c.params, ancilla, c.saturation);
  } else {
    GridSpec g = c.grid;
    if (!g.spacing) g.spacing = Spacing::Linear;
    b = backflow(c.params, ancilla, g.build());
  }
  PointResult r;
  r.counters.refinement_warnings += b.warnings.size();
  if (c.saturate && !b.saturated) ++r.counters.unsaturated_backflow;
  r.table.columns = {"t", "D", "N"};
  for (std::size_t k = 0; k < b.times.size(); ++k)
    r.table.rows.push_back({b.times[k], b.distance[k], b.n_cumulative[k]});
  return r;
}

PointResult run_steady(const ExperimentConfig& c) {
  const SystemParams& p = c.params;
  PointResult r;
  const SteadyState ss = steady_state(Liouvillian::build(p));
  const Mat4 rho = ss.rho.matrix();
  const Mat2 rp = partial_trace(rho, Factor::Ancilla);
  const double delta_numeric = 0.5 * (rp(0, 0) - rp(1, 1)).real();

  double f_numeric[3];
  const EstimationTarget targets[3] = {EstimationTarget::Temperature,
                                       EstimationTarget::AncillaFrequency,
                                       EstimationTarget::BathCoupling};
  for (int i = 0; i < 3; ++i) {
    const SteadyDerivative d = steady_state_derivative(p, targets[i], c.steady_method, c.derivative);
    if (d.method == SteadyDerivativeMethod::LinearResponse) ++r.counters.linear_response;
    if (d.method == SteadyDerivativeMethod::FiniteDifference) {
      r.counters.max_richardson_discrepancy =
          std::max(r.counters.max_richardson_discrepancy, d.discrepancy);
      if (!(d.discrepancy <= c.derivative.richardson_tolerance)) ++r.counters.richardson_failures;
    }
    const DensityMatrix probe(partial_trace(d.rho, Factor::Ancilla), StateTolerance{1e-8, 1e-8, -1e-8});
    const SldQfi q = qfi_sld(probe, partial_trace(d.drho, Factor::Ancilla));
    if (q.rank_warning) ++r.counters.rank_warnings;
    f_numeric[i] = q.value;
  }

  r.table.columns = {"T", "omega_a", "gamma", "g"};
  std::vector<Cell> row{p.temperature, p.omega_a, p.gamma, p.g};
  if (p.interaction == InteractionKind::XX) {
    const SteadyStateClosedForm cf = closed_form(p);
    for (const char* col : {"delta_p", "f_T", "f_wA", "f_gamma"}) r.table.columns.push_back(col);
    row.insert(row.end(), {cf.delta_p, cf.f_T, cf.f_wA, cf.f_gamma});
  }
  for (const char* col : {"delta_p_numeric", "f_T_numeric", "f_wA_numeric", "f_gamma_numeric"})
    r.table.columns.push_back(col);
  row.insert(row.end(), {delta_numeric, f_numeric[0], f_numeric[1], f_numeric[2]});
  r.table.rows.push_back(std::move(row));
  return r;
}

PointResult run_fi_compare(const ExperimentConfig& c) {
  const TimeGrid times = c.grid.build();
  const FisherComparison f =
      fisher_comparison(c.params, c.target, c.initial.state(c.params), times, c.derivative);
  PointResult r;
  r.counters.richardson_failures += f.richardson_failures;
  r.counters.max_richardson_discrepancy = f.max_discrepancy;
  r.table.columns = {"t", "qfi", "fi_sz", "fi_sx"};
  for (std::size_t k = 0; k < times.size(); ++k)
    r.table.rows.push_back({times[k], f.qfi[k], f.fi_sigma_z[k], f.fi_sigma_x[k]});
  return r;
}

PointResult run_coherence(const ExperimentConfig& c) {
  const TimeGrid times = c.grid.build();
  const Trajectory traj = evolve(Liouvillian::build(c.params), c.initial.state(c.params), times);
  PointResult r;
  r.counters.add(traj.stats);
  r.table.columns = {"t", "coherence"};
  const std::vector<DensityMatrix> probe = reduce_probe(traj);
  for (std::size_t k = 0; k < times.size(); ++k)
    r.table.rows.push_back({times[k], coherence_l1(probe[k])});
  return r;
}

PointResult run_point(const ExperimentConfig& c) {
  switch (c.child) {
    case Experiment::Evolve: return run_evolve(c);
    case Experiment::Qfi: return run_qfi(c);
    case Experiment::Nonmarkov: return run_nonmarkov(c);
    case Experiment::Steady: return run_steady(c);
    case Experiment::FiCompare: return run_fi_compare(c);
    case Experiment::Coherence: return run_coherence(c);
    case Experiment::Sweep: break;
  }
  fail(ErrorCode::Internal, "sweep cannot be nested");
}

std::string describe_value(const SweepValue& v) {
  if (const double* x = std::get_if<double>(&v)) return format_double(*x);
  return std::string(to_string(std::get<InteractionKind>(v)));
}

Cell cell_of(const SweepValue& v) {
  if (const double* x = std::get_if<double>(&v)) return *x;
  return std::string(to_string(std::get<InteractionKind>(v)));
}

// Index tuples of the cartesian product, first axis slowest.
std::vector<std::vector<std::size_t>> sweep_points(const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (const SweepAxis& a : axes) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : out)
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        auto p = prefix;
        p.push_back(i);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, unsigned threads) {
  RunResult result;
  if (c.experiment != Experiment::Sweep) {
    try {
      PointResult p = run_point(c);
      result.table = std::move(p.table);
      result.counters = p.counters;
    } catch (const Error& e) {
      fail(e.code(), "experiment " + std::string(to_string(c.experiment)) + ": " + e.what());
    }
    result.points = 1;
    return result;
  }

  const auto points = sweep_points(c.sweep);
  std::vector<ExperimentConfig> configs;
  std::vector<std::string> labels;
  for (const auto& idx : points) {
    ExperimentConfig child = c;
    child.experiment = c.child;
    child.sweep.clear();
    std::string label;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const SweepAxis& axis = c.sweep[a];
      apply_sweep_value(child.params, axis.field, axis.values[idx[a]]);
      label += (a ? ", " : "") + axis.field + "=" + describe_value(axis.values[idx[a]]);
    }
    configs.push_back(std::move(child));
    labels.push_back(std::move(label));
  }

  std::vector<PointResult> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run_point(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!errors[i]) continue;
    const std::string where = "sweep point " + std::to_string(i) + " (" + labels[i] + ")";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      fail(e.code(), where + ": " + e.what());
    } catch (const std::exception& e) {
      fail(ErrorCode::Internal, where + ": " + e.what());
    }
  }

  // steady rows already carry T, omega_a, gamma and g
  std::vector<std::size_t> prefix;
  for (std::size_t a = 0; a < c.sweep.size(); ++a) {
    const std::string& f = c.sweep[a].field;
    const bool reported = c.child == Experiment::Steady &&
                          (f == "temperature" || f == "omega_a" || f == "gamma" || f == "g");
    if (!reported) prefix.push_back(a);
  }
  for (std::size_t a : prefix) result.table.columns.push_back(c.sweep[a].field);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const Table& t = results[i].table;
    if (i == 0) {
      result.table.columns.insert(result.table.columns.end(), t.columns.begin(), t.columns.end());
    } else if (!std::equal(t.columns.begin(), t.columns.end(),
                           result.table.columns.begin() + static_cast<long>(prefix.size()),
                           result.table.columns.end())) {
      fail(ErrorCode::Config, "sweep points produce different columns (" + labels[i] +
                                  "); run them as separate experiments");
    }
    for (const auto& row : t.rows) {
      std::vector<Cell> full;
      for (std::size_t a : prefix) full.push_back(cell_of(c.sweep[a].values[points[i][a]]));
      full.insert(full.end(), row.begin(), row.end());
      result.table.rows.push_back(std::move(full));
    }
    result.counters.merge(results[i].counters);
  }
  result.points = configs.size();
  return result;
}

std::string summary_json(const ExperimentConfig& c, const RunResult& r, double wall_seconds,
                         unsigned threads) {
  const RunCounters& k = r.counters;
  json j;
  j["config"] = json::parse(c.echo);
  j["points"] = r.points;
  j["rows"] = r.table.rows.size();
  j["columns"] = r.table.columns;
  j["counters"] = {{"max_trace_drift", k.max_trace_drift},
                   {"max_hermiticity_drift", k.max_hermiticity_drift},
                   {"min_eigenvalue", k.min_eigenvalue},
                   {"renormalizations", k.renormalizations},
                   {"propagators", k.propagators},
                   {"clamped_qfi", k.clamped_qfi},
                   {"richardson_failures", k.richardson_failures},
                   {"max_richardson_discrepancy", k.max_richardson_discrepancy},
                   {"sld_cross_checks", k.cross_checks},
                   {"sld_cross_check_failures", k.cross_check_failures},
                   {"rank_warnings", k.rank_warnings},
                   {"refinement_warnings", k.refinement_warnings},
                   {"unsaturated_backflow", k.unsaturated_backflow},
                   {"linear_response_derivatives", k.linear_response}};
  j["threads"] = threads;
  j["wall_seconds"] = wall_seconds;
  return j.dump(2) + "\n";
}

std::string summary_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".summary.json");
  return p.string();
}

RunOutcome run_and_write(const ExperimentConfig& c, unsigned threads,
                         const std::optional<std::string>& output) {
  RunOutcome out;
  out.csv_path = output.value_or(c.output);
  out.summary_path = summary_path(out.csv_path);
  const auto t0 = std::chrono::steady_clock::now();
  out.result = run_experiment(c, threads);
  const std::string csv = to_csv(out.result.table);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_file_atomic(out.csv_path, csv);
  try {
    write_file_atomic(out.summary_path, summary_json(c, out.result, out.wall_seconds, threads));
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(out.csv_path, ec);
    throw;
  }
  return out;
}

unsigned resolve_threads(std::optional<long> flag) {
  long n = 1;
  if (flag) {
    n = *flag;
  } else if (const char* env = std::getenv("QMETRO_THREADS")) {
    char* end = nullptr;
    n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0')
      fail(ErrorCode::Config, std::string("QMETRO_THREADS is not an integer: '") + env + "'");
  }
  if (n < 1 || n > 1024) fail(ErrorCode::Config, "thread count must be between 1 and 1024");
  return static_cast<unsigned>(n);
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::InvalidArgument:
      return 2;
    case ErrorCode::InvariantViolation:
    case ErrorCode::DegenerateNullspace:
    case ErrorCode::DegenerateMeasurement:
    case ErrorCode::Numerical:
      return 3;
    case ErrorCode::Io:
    case ErrorCode::Internal:
      return 4;
  }
  return 4;
}

}  // namespace qmetro
