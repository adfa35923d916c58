#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmetro/analytics.hpp"
#include "qmetro/experiment.hpp"
#include "qmetro/propagator.hpp"

using namespace qmetro;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

const InteractionKind kKinds[] = {InteractionKind::XX, InteractionKind::XXplusZX,
                                  InteractionKind::ZX, InteractionKind::XZ};
const EstimationTarget kTargets[] = {EstimationTarget::Temperature,
                                     EstimationTarget::AncillaFrequency,
                                     EstimationTarget::BathCoupling};
const double kCouplings[] = {0.01, 0.03, 0.06, 0.09};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

// omega_p 1, omega_a 0.99, T 0.3, gamma 0.05
SystemParams reference_params(InteractionKind k, double g) {
  SystemParams p;
  p.interaction = k;
  p.g = g;
  return p;
}

double closed_value(const SteadyStateClosedForm& c, EstimationTarget t) {
  switch (t) {
    case EstimationTarget::Temperature: return c.f_T;
    case EstimationTarget::AncillaFrequency: return c.f_wA;
    case EstimationTarget::BathCoupling: return c.f_gamma;
  }
  return 0.0;
}

double steady_probe_qfi(const SystemParams& p, EstimationTarget t, bool& used_lr) {
  const SteadyDerivative d = steady_state_derivative(p, t, SteadyDerivativeMethod::Automatic);
  used_lr = d.method == SteadyDerivativeMethod::LinearResponse;
  const Mat2 rho = partial_trace(d.rho, Factor::Ancilla);
  const Mat2 drho = partial_trace(d.drho, Factor::Ancilla);
  return qfi_sld(DensityMatrix(rho, {1e-8, 1e-8, -1e-8}), drho).value;
}

// Samples of probe QFI curves shared with the dual-formula criterion.
struct CrossCheckTally {
  std::size_t samples = 0;
  std::size_t failures = 0;
  std::size_t boundary = 0;
  double worst = 0.0;

  void add(const FisherCurve& c) {
    samples += c.cross_checks;
    boundary += c.boundary_samples;
    failures += c.cross_check_failures;
    worst = std::max(worst, c.cross_check_max_rel);
  }
};

Outcome steady_closed_form() {
  Stopwatch sw;
  double worst = 0.0;
  std::string where;
  int lr = 0;
  for (double T : linspace(0.01, 1.0, 5))
    for (double wa : linspace(0.5, 0.99, 5)) {
      SystemParams p;
      p.temperature = T;
      p.omega_a = wa;
      const SteadyStateClosedForm cf = closed_form(p);
      for (EstimationTarget t : kTargets) {
        bool used_lr = false;
        const double num = steady_probe_qfi(p, t, used_lr);
        lr += used_lr;
        const double ref = closed_value(cf, t);
        const double rel = std::abs(num - ref) / std::max(std::abs(ref), 1e-300);
        if (rel > worst) {
          worst = rel;
          where = std::string(to_string(t)) + " at T=" + fmt(T) + ", omega_a=" + fmt(wa);
        }
      }
    }
  const double s = sw.seconds();
  return {1, "closed-form steady QFI vs numerical pipeline", worst < 1e-5 && s < 10.0,
          "max rel err " + fmt(worst) + " (" + where + "), " + std::to_string(lr) +
              "/75 derivatives by linear response, " + fmt(s) + " s (limit 10 s)"};
}

Outcome xz_steady_state() {
  Stopwatch sw;
  double dev = 0.0, qfi = 0.0;
  int points = 0;
  for (double T : linspace(0.01, 1.0, 5))
    for (double wa : linspace(0.5, 0.99, 5)) {
      // T=0.01 has a degenerate XZ nullspace
      if (T < 0.1) continue;
      ++points;
      SystemParams p = reference_params(InteractionKind::XZ, 0.08);
      p.temperature = T;
      p.omega_a = wa;
      const Mat2 probe =
          partial_trace(Mat4(steady_state(Liouvillian::build(p)).rho.matrix()), Factor::Ancilla);
      dev = std::max(dev, (probe - Mat2::Identity() / 2.0).cwiseAbs().maxCoeff());
      for (EstimationTarget t : kTargets) {
        bool used_lr = false;
        qfi = std::max(qfi, steady_probe_qfi(p, t, used_lr));
      }
    }
  const double s = sw.seconds();
  return {2, "XZ steady probe is maximally mixed", dev <= 1e-8 && qfi < 1e-10 && s < 1.0,
          std::to_string(points) + " points with T >= 0.2575, max |rho_P - I/2| " + fmt(dev) +
              ", max steady QFI " + fmt(qfi) + ", " + fmt(s) + " s (limit 1 s)"};
}

Outcome population_splitting() {
  double worst = 0.0;
  for (double T : linspace(0.01, 1.0, 5))
    for (double wa : linspace(0.5, 0.99, 5)) {
      SystemParams p;
      p.temperature = T;
      p.omega_a = wa;
      const Mat2 probe =
          partial_trace(Mat4(steady_state(Liouvillian::build(p)).rho.matrix()), Factor::Ancilla);
      const double numeric = 0.5 * (probe(0, 0) - probe(1, 1)).real();
      worst = std::max(worst, std::abs(closed_form(p).delta_p - numeric));
    }
  return {3, "closed-form population splitting", worst <= 1e-8,
          "max abs deviation " + fmt(worst) + " over 25 points (limit 1e-8)"};
}

Outcome dual_formula(const CrossCheckTally& curves) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> len(0.0, 0.999);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    BlochVector r{u(rng), u(rng), u(rng)};
    const double scale = len(rng) / r.norm();
    r = {r.x * scale, r.y * scale, r.z * scale};
    const DensityMatrix rho = density_from_bloch(r);
    const Mat2 drho = 0.5 * (u(rng) * pauli::x() + u(rng) * pauli::y() + u(rng) * pauli::z());
    const double a = qfi_bloch(rho, drho);
    const double b = qfi_sld(rho, drho).value;
    worst = std::max(worst, std::abs(a - b) / std::abs(b));
  }
  const bool pass = worst < 1e-8 && curves.failures == 0 && curves.samples > 0;
  return {4, "Bloch and SLD QFI agree", pass,
          "random pairs max rel " + fmt(worst) + "; curve samples " +
              std::to_string(curves.samples) + " checked (" + std::to_string(curves.boundary) +
              " on the pure boundary), " + std::to_string(curves.failures) +
              " beyond 1e-8 rel (max rel " + fmt(curves.worst) + ")"};
}

Outcome backflow_shape() {
  Stopwatch sw;
  std::map<InteractionKind, std::vector<double>> sat;
  std::vector<std::string> problems;
  for (InteractionKind k : kKinds)
    for (double g : kCouplings) {
      const BackflowCurve c =
          saturated_backflow(reference_params(k, g), DensityMatrix(states::excited()));
      const std::string tag = std::string(to_string(k)) + " g=" + fmt(g);
      for (std::size_t i = 1; i < c.n_cumulative.size(); ++i)
        if (c.n_cumulative[i] < c.n_cumulative[i - 1]) {
          problems.push_back(tag + " not monotone");
          break;
        }
      const double t_end = c.times.back();
      const double n_end = c.n_cumulative.back();
      std::size_t j = 0;
      while (j + 1 < c.times.size() && c.times[j + 1] <= t_end / 10.0) ++j;
      const double change = n_end - c.n_cumulative[j];
      if (!c.saturated || !(change < 0.01 * n_end))
        problems.push_back(tag + " last-decade change " + fmt(change / n_end));
      sat[k].push_back(n_end);
    }
  std::string values;
  for (InteractionKind k : kKinds) {
    const auto& v = sat[k];
    values += std::string(values.empty() ? "" : "; ") + std::string(to_string(k)) + " N=";
    for (std::size_t i = 0; i < v.size(); ++i) values += (i ? "," : "") + fmt(v[i], 4);
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) {
        problems.push_back(std::string(to_string(k)) + " saturation not increasing in g");
        break;
      }
  }
  const double xz = sat[InteractionKind::XZ].back();
  for (InteractionKind k : {InteractionKind::XX, InteractionKind::XXplusZX, InteractionKind::ZX})
    if (!(xz > sat[k].back()))
      problems.push_back("XZ at g=0.09 does not exceed " + std::string(to_string(k)));
  const double s = sw.seconds();
  if (s >= 60.0) problems.push_back("runtime " + fmt(s) + " s");
  std::string detail = problems.empty() ? "all properties hold" : "";
  for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
  return {5, "backflow N(t) shape", problems.empty(),
          detail + " [" + values + "] " + fmt(s) + " s (limit 60 s)"};
}

FisherCurve probe_curve(const SystemParams& p, EstimationTarget t, const TimeGrid& grid) {
  const StateDerivative d = state_derivative(p, t, default_initial_state(), grid);
  return qfi_from_derivative(d, Subsystem::Probe, 1);
}

double supremum(const FisherCurve& c) { return *std::max_element(c.values.begin(), c.values.end()); }

Outcome temperature_qfi_ordering(CrossCheckTally& tally) {
  const TimeGrid grid = log_grid(1e6, 2000, 0.1);
  std::vector<std::string> problems;
  std::string values;
  for (double g : kCouplings) {
    std::map<InteractionKind, double> sup;
    for (InteractionKind k : kKinds) {
      const FisherCurve c = probe_curve(reference_params(k, g), EstimationTarget::Temperature, grid);
      tally.add(c);
      sup[k] = supremum(c);
      if (c.values.front() != 0.0)
        problems.push_back(std::string(to_string(k)) + " g=" + fmt(g) + " starts at " +
                           fmt(c.values.front()));
    }
    const double xx = sup[InteractionKind::XX];
    if (!(sup[InteractionKind::ZX] < 1e-3 * xx)) problems.push_back("ZX not negligible at g=" + fmt(g));
    if (!(sup[InteractionKind::XZ] > xx)) problems.push_back("XZ below XX at g=" + fmt(g));
    values += (values.empty() ? "" : "; ") + std::string("g=") + fmt(g) + " sup XX " + fmt(xx) +
              ", ZX/XX " + fmt(sup[InteractionKind::ZX] / xx) + ", XZ " +
              fmt(sup[InteractionKind::XZ]);
  }
  std::string detail = problems.empty() ? "all properties hold" : "";
  for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
  return {6, "temperature QFI ordering across interactions", problems.empty(),
          detail + " [" + values + "]"};
}

Outcome gamma_qfi_transient(CrossCheckTally& tally) {
  TimeGrid grid = log_grid(1e5, 2000, 0.1);
  if (std::find(grid.begin(), grid.end(), 1e4) == grid.end()) {
    grid.push_back(1e4);
    std::sort(grid.begin(), grid.end());
  }
  const std::size_t i_1e4 =
      static_cast<std::size_t>(std::find(grid.begin(), grid.end(), 1e4) - grid.begin());
  std::vector<std::string> problems;
  std::string values;
  for (double g : kCouplings) {
    const FisherCurve c = probe_curve(reference_params(InteractionKind::XX, g),
                                      EstimationTarget::BathCoupling, grid);
    tally.add(c);
    const auto peak_it = std::max_element(c.values.begin(), c.values.end());
    const std::size_t peak = static_cast<std::size_t>(peak_it - c.values.begin());
    const double ratio = c.values[i_1e4] / *peak_it;
    const std::string tag = "g=" + fmt(g);
    if (peak == 0 || peak + 1 >= c.values.size() || !(c.values.back() < *peak_it))
      problems.push_back(tag + " has no interior maximum followed by decay");
    if (g >= 0.03 && !(ratio < 0.05)) problems.push_back(tag + " F(1e4)/peak " + fmt(ratio));
    values += (values.empty() ? "" : "; ") + tag + " peak " + fmt(*peak_it) + " at t=" +
              fmt(c.times[peak]) + ", F(1e4)/peak " + fmt(ratio);
  }
  std::string detail = problems.empty() ? "all properties hold" : "";
  for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
  return {7, "transient gamma QFI for XX", problems.empty(), detail + " [" + values + "]"};
}

Outcome measurement_optimality() {
  const TimeGrid grid = log_grid(2e4, 2000, 0.1);
  std::vector<std::string> problems;
  std::string values;
  for (EstimationTarget t : kTargets) {
    const FisherComparison xx =
        fisher_comparison(reference_params(InteractionKind::XX, 0.08), t, default_initial_state(), grid);
    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(xx.qfi.begin(), xx.qfi.end()) - xx.qfi.begin());
    const double ratio = xx.fi_sigma_z[peak] / xx.qfi[peak];
    const double sx = *std::max_element(xx.fi_sigma_x.begin(), xx.fi_sigma_x.end());
    const std::string tag = std::string(to_string(t));
    if (!(ratio >= 0.99)) problems.push_back("XX " + tag + " FI(sz)/QFI at peak " + fmt(ratio));
    if (!(sx < 1e-10)) problems.push_back("XX " + tag + " FI(sx) reaches " + fmt(sx));

    const FisherComparison xz =
        fisher_comparison(reference_params(InteractionKind::XZ, 0.08), t, default_initial_state(), grid);
    const double sx_xz = *std::max_element(xz.fi_sigma_x.begin(), xz.fi_sigma_x.end());
    double excess = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      excess = std::max(excess, xz.fi_sigma_z[k] - xz.qfi[k] * (1 + 1e-8) - 1e-14);
    if (!(sx_xz > 1e-10)) problems.push_back("XZ " + tag + " FI(sx) vanishes");
    if (excess > 0.0) problems.push_back("XZ " + tag + " FI(sz) exceeds QFI by " + fmt(excess));
    values += (values.empty() ? "" : "; ") + tag + ": XX FI(sz)/QFI@peak " + fmt(ratio, 6) +
              ", XX max FI(sx) " + fmt(sx) + ", XZ max FI(sx) " + fmt(sx_xz);
  }
  std::string detail = problems.empty() ? "all properties hold" : "";
  for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
  return {8, "sigma_z measurement optimality", problems.empty(), detail + " [" + values + "]"};
}

Outcome coherence() {
  const TimeGrid grid = log_grid(2e4, 2000, 0.1);
  std::map<InteractionKind, double> peak;
  for (InteractionKind k : kKinds) {
    const auto c = probe_coherence(reference_params(k, 0.08),
                                   product_state(states::ground(), states::excited()), grid);
    peak[k] = *std::max_element(c.begin(), c.end());
  }
  const bool pass = peak[InteractionKind::XX] < 1e-10 && peak[InteractionKind::ZX] < 1e-10 &&
                    peak[InteractionKind::XZ] > peak[InteractionKind::XXplusZX] &&
                    peak[InteractionKind::XXplusZX] > 0.0;
  return {9, "probe coherence", pass,
          "max C: XX " + fmt(peak[InteractionKind::XX]) + ", ZX " + fmt(peak[InteractionKind::ZX]) +
              ", XXplusZX " + fmt(peak[InteractionKind::XXplusZX]) + ", XZ " +
              fmt(peak[InteractionKind::XZ])};
}

Outcome partial_trace_monotonicity() {
  const TimeGrid grid{0.0, 10.0, 1e4, 2e4};
  std::size_t violations = 0, points = 0;
  int within = 0;
  double lo = 0.0, hi = 0.0;
  double best_full = -1.0, gap_at_best = 0.0, best_T = 0.0, worst_gap = 0.0, worst_T = 0.0;
  for (int i = 0; i <= 38; ++i) {
    SystemParams p = reference_params(InteractionKind::XZ, 0.08);
    p.temperature = 0.05 + 0.025 * i;
    const StateDerivative d =
        state_derivative(p, EstimationTarget::Temperature, default_initial_state(), grid);
    const FisherCurve fp = qfi_from_derivative(d, Subsystem::Probe);
    const FisherCurve fa = qfi_from_derivative(d, Subsystem::Ancilla);
    const FisherCurve fs = qfi_from_derivative(d, Subsystem::Full);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      ++points;
      const double bound = fs.values[k] * (1 + 1e-6) + 1e-12;
      if (fp.values[k] > bound || fa.values[k] > bound) ++violations;
    }
    const double gap = std::abs(fp.values[3] - fs.values[3]) / fs.values[3];
    if (gap < 0.05) {
      if (within++ == 0) lo = p.temperature;
      hi = p.temperature;
    }
    if (fs.values[3] > best_full) {
      best_full = fs.values[3];
      gap_at_best = gap;
      best_T = p.temperature;
    }
    if (gap > worst_gap) {
      worst_gap = gap;
      worst_T = p.temperature;
    }
  }
  const bool pass = violations == 0 && worst_gap < 0.05;
  return {10, "QFI monotone under partial trace", pass,
          std::to_string(violations) + "/" + std::to_string(points) +
              " (T, t) points violate F_sub <= F_S; at t=2e4 |F_P-F_S|/F_S < 5% at " +
              std::to_string(within) + "/39 temperatures (T in [" + fmt(lo) + ", " + fmt(hi) +
              "]), " + fmt(gap_at_best) + " at the F_S maximum (T=" + fmt(best_T) +
              "), largest " + fmt(worst_gap) + " at T=" + fmt(worst_T)};
}

Mat4 rk4(const Liouvillian& l, Mat4 rho, double t, double dt) {
  const int n = static_cast<int>(std::lround(t / dt));
  for (int k = 0; k < n; ++k) {
    const Mat4 k1 = l.apply(rho);
    const Mat4 k2 = l.apply(Mat4(rho + 0.5 * dt * k1));
    const Mat4 k3 = l.apply(Mat4(rho + 0.5 * dt * k2));
    const Mat4 k4 = l.apply(Mat4(rho + dt * k3));
    rho += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

Outcome propagator_integrity() {
  double semigroup = 0.0, drift = 0.0, rk = 0.0, purity = 0.0;
  const DensityMatrix rho0 = default_initial_state();
  for (InteractionKind k : kKinds) {
    const Liouvillian l = Liouvillian::build(reference_params(k, 0.08));
    for (auto [s, t] : {std::pair{1.0, 2.5}, {30.0, 70.0}, {1e3, 9e3}}) {
      const Mat16 lhs = expm(Mat16(l.matrix() * (s + t)));
      const Mat16 rhs = expm(Mat16(l.matrix() * s)) * expm(Mat16(l.matrix() * t));
      semigroup = std::max(semigroup, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    const Trajectory tr = evolve(l, rho0, default_grid(2e4));
    drift = std::max(drift, tr.stats.max_trace_drift);
    drift = std::max(drift, std::abs(tr.states.back().trace() - 1.0));

    const Trajectory spot = evolve(l, rho0, {0.0, 1.0, 5.0, 20.0});
    Mat4 r = rho0.matrix();
    double t_prev = 0.0;
    for (std::size_t i = 1; i < spot.times.size(); ++i) {
      r = rk4(l, r, spot.times[i] - t_prev, 1e-3);
      t_prev = spot.times[i];
      rk = std::max(rk, (r - spot.states[i]).cwiseAbs().maxCoeff());
    }

    SystemParams closed = reference_params(k, 0.08);
    closed.gamma = 0.0;
    const Trajectory u = evolve(Liouvillian::build(closed), rho0, default_grid(2e4));
    for (const Mat4& m : u.states) purity = std::max(purity, std::abs((m * m).trace().real() - 1.0));
  }
  const bool pass = semigroup < 1e-9 && drift < 1e-9 && rk < 1e-6 && purity < 1e-9;
  return {11, "propagator integrity", pass,
          "semigroup " + fmt(semigroup) + ", trace drift " + fmt(drift) + ", RK4 " + fmt(rk) +
              ", purity (gamma=0) " + fmt(purity)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const fs::path& config, const fs::path& work) {
  Stopwatch sw;
  const nlohmann::ordered_json doc = nlohmann::ordered_json::parse(read_file(config));
  std::size_t files = 0, bytes = 0;
  std::vector<std::string> differing;
  for (const auto& [name, run] : doc.at("runs").items()) {
    const std::string text = run.dump();
    const ExperimentConfig c = parse_config(text);
    std::string first;
    for (const char* pass : {"a", "b"}) {
      const fs::path dir = work / pass;
      fs::create_directories(dir);
      const fs::path out = dir / (name + ".csv");
      // second pass on more workers: row order must not depend on scheduling
      run_and_write(c, std::string(pass) == "a" ? 1 : 3, out.string());
      const std::string csv = read_file(out);
      if (std::string(pass) == "a") first = csv;
      else if (csv != first) differing.push_back(name);
    }
    ++files;
    bytes += first.size();
  }
  const bool pass = differing.empty() && files > 0;
  std::string detail = std::to_string(files) + " CSVs, " + std::to_string(bytes) +
                       " bytes each pass, " + std::to_string(differing.size()) + " differ";
  for (const auto& d : differing) detail += " " + d;
  return {12, "repeat runs are byte-identical", pass, detail + ", " + fmt(sw.seconds()) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string config = "configs/acceptance.json";
  std::string work = "acceptance_work";
  app.add_option("--config", config, "run set for the determinism check")->check(CLI::ExistingFile);
  app.add_option("--work", work, "scratch directory");
  CLI11_PARSE(app, argc, argv);

  std::vector<Outcome> outcomes;
  auto run = [&](int id, auto&& f) {
    Stopwatch sw;
    try {
      outcomes.push_back(f());
    } catch (const std::exception& e) {
      outcomes.push_back({id, "criterion raised an error", false, e.what()});
    }
    std::cerr << "criterion " << id << " evaluated in " << fmt(sw.seconds()) << " s\n";
  };

  CrossCheckTally tally;
  run(1, steady_closed_form);
  run(2, xz_steady_state);
  run(3, population_splitting);
  run(5, backflow_shape);
  run(6, [&] { return temperature_qfi_ordering(tally); });
  run(7, [&] { return gamma_qfi_transient(tally); });
  run(4, [&] { return dual_formula(tally); });
  run(8, measurement_optimality);
  run(9, coherence);
  run(10, partial_trace_monotonicity);
  run(11, propagator_integrity);
  run(12, [&] {
    fs::remove_all(work);
    return determinism(config, work);
  });

  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  int failed = 0;
  for (const Outcome& o : outcomes) {
    std::printf("criterion %2d %s  %s: %s\n", o.id, o.pass ? "PASS" : "FAIL", o.name.c_str(),
                o.detail.c_str());
    failed += !o.pass;
  }
  std::printf("%zu criteria, %d passed, %d failed\n", outcomes.size(),
              static_cast<int>(outcomes.size()) - failed, failed);
  return failed ? 1 : 0;
}
