#include "qmetro/nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "qmetro/propagator.hpp"

namespace qmetro {
namespace {

constexpr double kWarnIncrement = 0.1;
constexpr std::size_t kMaxWarnings = 100;

void check_distance(double d, double t) {
  if (!std::isfinite(d) || d < 0.0 || d > 1.0 + 1e-9) {
    std::ostringstream os;
    os << "trace distance " << d << " outside [0, 1] at t = " << t;
    fail(ErrorCode::Numerical, os.str());
  }
}

// Running N(t) with refinement warnings.
struct Accumulator {
  double n = 0.0;
  double last = 1.0;
  double t_last = 0.0;
  double max_increment = 0.0;
  std::vector<RefinementWarning> warnings;

  void start(double d, double t) {
    check_distance(d, t);
    last = d;
    t_last = t;
  }

  void push(double d, double t) {
    check_distance(d, t);
    const double inc = d - last;
    if (inc > 0.0) {
      n += inc;
      if (inc > kWarnIncrement && warnings.size() < kMaxWarnings)
        warnings.push_back({t_last, t, inc});
    }
    last = d;
    t_last = t;
  }
};

Mat2 pair_operator(const BlochVector& axis) {
  // |psi><psi| - |psi_perp><psi_perp| for the antipodal pure pair along `axis`
  return axis.x * pauli::x() + axis.y * pauli::y() + axis.z * pauli::z();
}

void check_ancilla(const DensityMatrix& rho_a0) {
  if (rho_a0.dim() != 2)
    fail(ErrorCode::InvalidArgument, "backflow needs a single-qubit ancilla state");
}

}  // namespace

BackflowCurve backflow(const SystemParams& p, const DensityMatrix& rho_a0,
                       const TimeGrid& times) {
  check_ancilla(rho_a0);
  validate_grid(times);
  const Liouvillian l = Liouvillian::build(p);
  const Mat2 ra = rho_a0.matrix();
  const Trajectory a = evolve(l, product_state(states::plus(), ra), times);
  const Trajectory b = evolve(l, product_state(states::minus(), ra), times);

  BackflowCurve c;
  c.times = times;
  c.fine_step = times.size() > 1 ? times[1] - times[0] : 0.0;
  c.fine_horizon = times.back();
  Accumulator acc;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Mat2 diff = partial_trace(Mat4(a.states[k] - b.states[k]), Factor::Ancilla);
    const double d = 0.5 * bloch_components(diff).norm();
    if (k == 0)
      acc.start(d, times[k]);
    else
      acc.push(d, times[k]);
    c.distance.push_back(d);
    c.n_cumulative.push_back(acc.n);
  }
  c.warnings = std::move(acc.warnings);
  c.tail_bound = std::numeric_limits<double>::infinity();
  return c;
}

namespace {

// Spectral data of the real generator used to bound the remaining growth of N.
class TailBound {
 public:
  explicit TailBound(const RealMat16& r) {
    Eigen::EigenSolver<RealMat16> es(r, true);
    if (es.info() != Eigen::Success) return;
    lambda_ = es.eigenvalues();
    v_ = es.eigenvectors();
    lu_.compute(v_);
    for (int k = 0; k < 16; ++k)
      probe_norm_(k) = std::sqrt(std::norm(v_(4, k)) + std::norm(v_(8, k)) + std::norm(v_(12, k)));
    ok_ = true;
  }

  // Upper bound on the integral of |dD/dt| from the current state onward:
  // 1/2 sum_k |lambda_k| |c_k| |R v_k| / |Re lambda_k|.
  double operator()(const RealVec16& x) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!ok_) return inf;
    const Eigen::Matrix<cplx, 16, 1> xc = x.cast<cplx>();
    const Eigen::Matrix<cplx, 16, 1> c = lu_.solve(xc);
    const double scale = std::max(x.norm(), 1e-300);
    if ((v_ * c - xc).norm() > 1e-8 * scale) return inf;
    double sum = 0.0;
    for (int k = 0; k < 16; ++k) {
      const double w = std::abs(c(k)) * probe_norm_(k);
      const double rate = std::abs(lambda_(k));
      if (w * rate < 1e-15 * scale) continue;
      const double decay = -lambda_(k).real();
      if (!(decay > 1e-12)) return inf;
      sum += rate * w / decay;
    }
    return 0.5 * sum;
  }

 private:
  bool ok_ = false;
  Eigen::Matrix<cplx, 16, 1> lambda_;
  Eigen::Matrix<cplx, 16, 16> v_;
  Eigen::PartialPivLU<Eigen::Matrix<cplx, 16, 16>> lu_;
  Eigen::Matrix<double, 16, 1> probe_norm_;
};

double probe_distance(const RealVec16& x) { return 0.5 * probe_bloch(x).norm(); }

// Keeps at most about 2 * target samples by doubling the stride when full.
class Thinner {
 public:
  explicit Thinner(std::size_t target) : target_(std::max<std::size_t>(target, 2)) {}

  void offer(std::size_t index, double t, double d, double n) {
    if (index % stride_ != 0) return;
    times_.push_back(t);
    d_.push_back(d);
    n_.push_back(n);
    if (times_.size() >= 2 * target_) {
      compact(times_);
      compact(d_);
      compact(n_);
      stride_ *= 2;
    }
  }

  void force(double t, double d, double n) {
    if (!times_.empty() && times_.back() == t) return;
    times_.push_back(t);
    d_.push_back(d);
    n_.push_back(n);
  }

  void move_into(BackflowCurve& c, std::size_t limit) {
    // uniform index selection down to `limit`, keeping both ends
    const std::size_t m = times_.size();
    if (m <= limit) {
      c.times = std::move(times_);
      c.distance = std::move(d_);
      c.n_cumulative = std::move(n_);
      return;
    }
    std::size_t prev = m;
    for (std::size_t i = 0; i < limit; ++i) {
      const std::size_t k = static_cast<std::size_t>(
          std::llround(static_cast<double>(i) * static_cast<double>(m - 1) /
                       static_cast<double>(limit - 1)));
      if (k == prev) continue;
      c.times.push_back(times_[k]);
      c.distance.push_back(d_[k]);
      c.n_cumulative.push_back(n_[k]);
      prev = k;
    }
  }

 private:
  static void compact(std::vector<double>& v) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < v.size(); i += 2) v[j++] = v[i];
    v.resize(j);
  }

  std::size_t target_;
  std::size_t stride_ = 1;
  std::vector<double> times_, d_, n_;
};

BackflowCurve run_saturated(const RealMat16& r, const RealMat16& step, const TailBound& tail,
                            const RealVec16& x0, const SaturationOptions& opts) {
  BackflowCurve c;
  c.fine_step = opts.step;
  const std::size_t fine_out =
      opts.output_points > opts.extend_points + 2 ? opts.output_points - opts.extend_points
                                                  : 2;
  Thinner thin(fine_out);
  Accumulator acc;

  RealVec16 x = x0;
  double d = probe_distance(x);
  acc.start(d, 0.0);
  thin.offer(0, 0.0, d, 0.0);

  const auto max_steps = static_cast<std::size_t>(std::ceil(opts.max_horizon / opts.step));
  std::size_t k = 0;
  double bound = std::numeric_limits<double>::infinity();
  double t = 0.0;
  while (k < max_steps) {
    x = step * x;
    ++k;
    t = opts.step * static_cast<double>(k);
    d = probe_distance(x);
    acc.push(d, t);
    thin.offer(k, t, d, acc.n);
    if (k % opts.check_every == 0) {
      if (!x.allFinite()) {
        std::ostringstream os;
        os << "backflow propagation produced non-finite entries at t = " << t;
        fail(ErrorCode::Numerical, os.str());
      }
      bound = tail(x);
      if (bound <= std::max(opts.tail_relative * acc.n, opts.tail_absolute)) {
        c.saturated = true;
        break;
      }
    }
  }
  thin.force(t, d, acc.n);
  c.fine_horizon = t;
  c.tail_bound = bound;
  thin.move_into(c, fine_out);

  if (opts.extend_factor > 1.0 && opts.extend_points > 0 && t > 0.0) {
    const double ratio = std::pow(opts.extend_factor, 1.0 / static_cast<double>(opts.extend_points));
    double t_prev = t;
    for (std::size_t i = 1; i <= opts.extend_points; ++i) {
      const double t_next = i == opts.extend_points
                                ? t * opts.extend_factor
                                : t * std::pow(ratio, static_cast<double>(i));
      x = expm(RealMat16(r * (t_next - t_prev))) * x;
      d = probe_distance(x);
      acc.push(d, t_next);
      c.times.push_back(t_next);
      c.distance.push_back(d);
      c.n_cumulative.push_back(acc.n);
      t_prev = t_next;
    }
  }
  c.warnings = std::move(acc.warnings);
  return c;
}

}  // namespace

BackflowCurve saturated_backflow(const SystemParams& p, const DensityMatrix& rho_a0,
                                 const SaturationOptions& opts) {
  check_ancilla(rho_a0);
  if (!(opts.step > 0.0) || !(opts.max_horizon > opts.step) || opts.check_every == 0 ||
      opts.output_points < 4)
    fail(ErrorCode::InvalidArgument, "saturated_backflow: invalid options");

  const Liouvillian l = Liouvillian::build(p);
  const RealMat16 r = pauli_generator(l);
  const RealMat16 step = expm(RealMat16(r * opts.step));
  const TailBound tail(r);
  const Mat2 ra = rho_a0.matrix();

  auto run_axis = [&](const BlochVector& axis) {
    const RealVec16 x0 = pauli_coordinates(kron(pair_operator(axis), ra));
    BackflowCurve c = run_saturated(r, step, tail, x0, opts);
    c.pair_axis = axis;
    return c;
  };

  BackflowCurve best = run_axis({1.0, 0.0, 0.0});
  if (!opts.maximize_pair) return best;

  // antipodal pairs: one hemisphere of axes is enough
  const std::size_t np = std::max<std::size_t>(opts.pair_polar, 2);
  const std::size_t na = std::max<std::size_t>(opts.pair_azimuth, 1);
  for (std::size_t i = 0; i < np; ++i) {
    const double theta = 0.5 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(np - 1);
    const std::size_t count = i == 0 ? 1 : na;
    for (std::size_t j = 0; j < count; ++j) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(na);
      const BlochVector axis{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                             std::cos(theta)};
      BackflowCurve c = run_axis(axis);
      if (c.saturation() > best.saturation()) best = std::move(c);
    }
  }
  return best;
}

}  // namespace qmetro
