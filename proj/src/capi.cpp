#include "qmetro/qmetro.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "qmetro/analytics.hpp"
#include "qmetro/experiment.hpp"

struct qm_params {
  qmetro::SystemParams p;
};

struct qm_config {
  qmetro::ExperimentConfig c;
};

namespace {

using namespace qmetro;

thread_local std::string last_error;

qm_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return QM_ERR_INVALID_ARGUMENT;
    case ErrorCode::InvariantViolation: return QM_ERR_INVARIANT;
    case ErrorCode::DegenerateNullspace: return QM_ERR_DEGENERATE_NULLSPACE;
    case ErrorCode::DegenerateMeasurement: return QM_ERR_DEGENERATE_MEASUREMENT;
    case ErrorCode::Numerical: return QM_ERR_NUMERICAL;
    case ErrorCode::Config: return QM_ERR_CONFIG;
    case ErrorCode::Io: return QM_ERR_IO;
    case ErrorCode::Internal: return QM_ERR_INTERNAL;
  }
  return QM_ERR_INTERNAL;
}

template <typename F>
qm_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return QM_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return QM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return QM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return QM_ERR_INTERNAL;
  }
}

void need(const void* ptr, const char* name) {
  if (!ptr) fail(ErrorCode::InvalidArgument, std::string(name) + " is NULL");
}

double* field_of(SystemParams& p, const char* field) {
  need(field, "field");
  const std::string f(field);
  if (f == "omega_p") return &p.omega_p;
  if (f == "omega_a") return &p.omega_a;
  if (f == "g") return &p.g;
  if (f == "gamma") return &p.gamma;
  if (f == "temperature") return &p.temperature;
  fail(ErrorCode::InvalidArgument, "unknown parameter field '" + f + "'");
}

template <typename M>
void store(const M& m, qm_complex* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[i * m.cols() + j] = {m(i, j).real(), m(i, j).imag()};
}

ComplexMatrix load(const qm_complex* in, int dim) {
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cplx(in[i * dim + j].re, in[i * dim + j].im);
  return m;
}

TimeGrid load_grid(const double* times, size_t n) {
  need(times, "times");
  if (n == 0) fail(ErrorCode::InvalidArgument, "time grid is empty");
  return TimeGrid(times, times + n);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* qm_version(void) { return "0.1.0"; }

const char* qm_last_error(void) { return last_error.c_str(); }

int qm_exit_code(qm_status status) {
  switch (status) {
    case QM_OK: return 0;
    case QM_ERR_INVALID_ARGUMENT:
    case QM_ERR_CONFIG: return 2;
    case QM_ERR_INVARIANT:
    case QM_ERR_DEGENERATE_NULLSPACE:
    case QM_ERR_DEGENERATE_MEASUREMENT:
    case QM_ERR_NUMERICAL: return 3;
    case QM_ERR_IO:
    case QM_ERR_INTERNAL: return 4;
  }
  return 4;
}

qm_status qm_params_create(qm_params** out) {
  return guarded([&] {
    need(out, "out");
    *out = new qm_params{};
  });
}

void qm_params_destroy(qm_params* p) { delete p; }

qm_status qm_params_set(qm_params* p, const char* field, double value) {
  return guarded([&] {
    need(p, "params");
    *field_of(p->p, field) = value;
  });
}

qm_status qm_params_get(const qm_params* p, const char* field, double* value) {
  return guarded([&] {
    need(p, "params");
    need(value, "value");
    SystemParams copy = p->p;
    *value = *field_of(copy, field);
  });
}

qm_status qm_params_set_interaction(qm_params* p, qm_interaction kind) {
  return guarded([&] {
    need(p, "params");
    switch (kind) {
      case QM_INTERACTION_XX: p->p.interaction = InteractionKind::XX; return;
      case QM_INTERACTION_XX_PLUS_ZX: p->p.interaction = InteractionKind::XXplusZX; return;
      case QM_INTERACTION_ZX: p->p.interaction = InteractionKind::ZX; return;
      case QM_INTERACTION_XZ: p->p.interaction = InteractionKind::XZ; return;
    }
    fail(ErrorCode::InvalidArgument, "unknown interaction");
  });
}

qm_status qm_params_get_interaction(const qm_params* p, qm_interaction* kind) {
  return guarded([&] {
    need(p, "params");
    need(kind, "kind");
    switch (p->p.interaction) {
      case InteractionKind::XX: *kind = QM_INTERACTION_XX; return;
      case InteractionKind::XXplusZX: *kind = QM_INTERACTION_XX_PLUS_ZX; return;
      case InteractionKind::ZX: *kind = QM_INTERACTION_ZX; return;
      case InteractionKind::XZ: *kind = QM_INTERACTION_XZ; return;
    }
  });
}

qm_status qm_thermal_occupation(double omega_a, double temperature, double* n_th, int* underflow) {
  return guarded([&] {
    need(n_th, "n_th");
    const ThermalOccupation t = thermal_occupation(omega_a, temperature);
    *n_th = t.n_th;
    if (underflow) *underflow = t.underflow ? 1 : 0;
  });
}

qm_status qm_decay_rates(const qm_params* p, double* down, double* up) {
  return guarded([&] {
    need(p, "params");
    need(down, "down");
    need(up, "up");
    p->p.validate();
    const DecayRates r = decay_rates(p->p);
    *down = r.down;
    *up = r.up;
  });
}

qm_status qm_hamiltonian(const qm_params* p, qm_complex out[16]) {
  return guarded([&] {
    need(p, "params");
    need(out, "out");
    store(total_hamiltonian(p->p), out);
  });
}

qm_status qm_liouvillian(const qm_params* p, qm_complex out[256]) {
  return guarded([&] {
    need(p, "params");
    need(out, "out");
    store(Liouvillian::build(p->p).matrix(), out);
  });
}

qm_status qm_steady_probe(const qm_params* p, qm_complex out[4]) {
  return guarded([&] {
    need(p, "params");
    need(out, "out");
    p->p.validate();
    const SteadyState ss = steady_state(Liouvillian::build(p->p));
    const Mat4 rho = ss.rho.matrix();
    store(partial_trace(rho, Factor::Ancilla), out);
  });
}

qm_status qm_closed_form_eval(const qm_params* p, qm_closed_form* out) {
  return guarded([&] {
    need(p, "params");
    need(out, "out");
    const SteadyStateClosedForm c = closed_form(p->p);
    *out = {c.delta_p, c.f_T,  c.f_wA,       c.f_gamma, c.omega_cap, c.chi,
            c.xi,      c.lambda_cap, c.a_T, c.a_wA,    c.a_gamma,   c.scaled ? 1 : 0};
  });
}

qm_status qm_qfi_bloch(const qm_complex rho[4], const qm_complex drho[4], double* out) {
  return guarded([&] {
    need(rho, "rho");
    need(drho, "drho");
    need(out, "out");
    const Mat2 d = load(drho, 2);
    *out = qfi_bloch(DensityMatrix(load(rho, 2)), d);
  });
}

qm_status qm_qfi_sld(int dim, const qm_complex* rho, const qm_complex* drho, double* out,
                     double* excluded_weight) {
  return guarded([&] {
    need(rho, "rho");
    need(drho, "drho");
    need(out, "out");
    if (dim != 2 && dim != 4) fail(ErrorCode::InvalidArgument, "dim must be 2 or 4");
    const SldQfi q = qfi_sld(DensityMatrix(load(rho, dim)), load(drho, dim));
    *out = q.value;
    if (excluded_weight) *excluded_weight = q.excluded_weight;
  });
}

qm_status qm_qfi_curve(const qm_params* p, qm_target target, qm_subsystem subsystem,
                       const double* times, size_t n, double* out) {
  return guarded([&] {
    need(p, "params");
    need(out, "out");
    const TimeGrid grid = load_grid(times, n);
    EstimationTarget t;
    switch (target) {
      case QM_TARGET_TEMPERATURE: t = EstimationTarget::Temperature; break;
      case QM_TARGET_OMEGA_A: t = EstimationTarget::AncillaFrequency; break;
      case QM_TARGET_GAMMA: t = EstimationTarget::BathCoupling; break;
      default: fail(ErrorCode::InvalidArgument, "unknown estimation target");
    }
    Subsystem s;
    switch (subsystem) {
      case QM_SUBSYSTEM_PROBE: s = Subsystem::Probe; break;
      case QM_SUBSYSTEM_ANCILLA: s = Subsystem::Ancilla; break;
      case QM_SUBSYSTEM_FULL: s = Subsystem::Full; break;
      default: fail(ErrorCode::InvalidArgument, "unknown subsystem");
    }
    p->p.validate();
    const FisherCurve c = qfi_curve(p->p, t, default_initial_state(), grid, s);
    std::copy(c.values.begin(), c.values.end(), out);
  });
}

qm_status qm_backflow(const qm_params* p, const double* times, size_t n, double* distance,
                      double* n_cumulative) {
  return guarded([&] {
    need(p, "params");
    need(distance, "distance");
    need(n_cumulative, "n_cumulative");
    const TimeGrid grid = load_grid(times, n);
    const BackflowCurve c = backflow(p->p, DensityMatrix(states::excited()), grid);
    std::copy(c.distance.begin(), c.distance.end(), distance);
    std::copy(c.n_cumulative.begin(), c.n_cumulative.end(), n_cumulative);
  });
}

qm_status qm_config_create(const char* json_text, const char* experiment,
                           const char* const* overrides, size_t n_overrides, qm_config** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    if (n_overrides > 0) need(overrides, "overrides");
    std::vector<std::string> ov;
    for (size_t i = 0; i < n_overrides; ++i) {
      need(overrides[i], "override");
      ov.emplace_back(overrides[i]);
    }
    std::optional<std::string_view> exp;
    if (experiment) exp = experiment;
    *out = new qm_config{parse_config(json_text, ov, exp)};
  });
}

void qm_config_destroy(qm_config* c) { delete c; }

qm_status qm_config_echo(const qm_config* c, char** out) {
  return guarded([&] {
    need(c, "config");
    need(out, "out");
    *out = copy_string(c->c.echo);
  });
}

qm_status qm_run(const qm_config* c, unsigned threads, const char* output, char** summary_path) {
  return guarded([&] {
    need(c, "config");
    std::optional<std::string> out;
    if (output) out = output;
    const RunOutcome r = run_and_write(c->c, threads == 0 ? 1 : threads, out);
    if (summary_path) *summary_path = copy_string(r.summary_path);
  });
}

qm_status qm_resolve_threads(long threads, unsigned* out) {
  return guarded([&] {
    need(out, "out");
    *out = resolve_threads(threads > 0 ? std::optional<long>(threads) : std::nullopt);
  });
}

void qm_string_free(char* s) { std::free(s); }

}  // extern "C"
