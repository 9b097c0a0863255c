#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "levi/errors.hpp"
#include "levi/integrators.hpp"
#include "levi/levitron.hpp"
#include "levi/mpe.hpp"
#include "levi/newton.hpp"
#include "levi/oscillator.hpp"
#include "levi/phase.hpp"

namespace levi {

// ---------------------------------------------------------------------------
// Experiment description

enum class ModelKind { Levitron, Oscillator };

struct ModelConfig {
  ModelKind kind = ModelKind::Levitron;
  // levitron
  double a = 0.1;
  double c = 0.1;
  bool auto_M = true;      // calibrate M at z_star when true
  double M = 0.0;
  double z_star = 1.72;
  double sin_guard = 1e-8;
  // oscillator
  double mass = 1.0;
  double stiffness = 1.0;
};

using ModelVariant = std::variant<LevitronModel, OscillatorModel>;

inline ModelVariant make_model(const ModelConfig& cfg) {
  if (cfg.kind == ModelKind::Oscillator)
    return OscillatorModel(cfg.mass, cfg.stiffness);
  LevitronParams p;
  p.a = cfg.a;
  p.c = cfg.c;
  p.M = cfg.auto_M ? calibrate_M(cfg.z_star) : cfg.M;
  p.sin_guard = cfg.sin_guard;
  return LevitronModel(p);
}

enum class IntegratorKind { Euler, Rk4, VerletVV, VerletPV, Newton, Mpe,
                            IterativeMpe };

struct IntegratorSpec {
  IntegratorKind kind = IntegratorKind::Rk4;
  int order = 4; // extrapolation order 2n, used by Mpe / IterativeMpe

  void validate() const {
    if (kind == IntegratorKind::Mpe || kind == IntegratorKind::IterativeMpe) {
      if (order < 2 || order % 2 != 0)
        throw ValidationError("integrator: extrapolation order must be even and >= 2");
    }
  }
};

struct RunConfig {
  ModelConfig model;
  IntegratorSpec integrator;
  double h = 1e-3;
  long steps = 1000;
  IterationConfig iteration;
  PhaseState initial_state;
  std::string output_path;     // empty: do not write
  std::string reference_path;  // optional, consumed by the CLI
  long stride = 1;
  double stability_bound = 0.5;

  void validate() const {
    integrator.validate();
    iteration.validate();
    if (steps < 1) throw ValidationError("run: steps must be >= 1");
    if (!(h > 0.0)) throw ValidationError("run: step size must be > 0");
    if (stride < 1) throw ValidationError("run: stride must be >= 1");
    if (!all_finite(initial_state))
      throw ValidationError("run: initial state must be finite");
  }
};

// ---------------------------------------------------------------------------
// Trajectory record and error summary

struct TrajectorySample {
  double t = 0.0;
  PhaseState state;
  double energy = 0.0;
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;

  double horizon() const {
    return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
  }
};

struct ErrorSample {
  double t = 0.0;
  double err = 0.0;       // Euclidean distance of (q1,q2,q3)
  double err_full = 0.0;  // Euclidean distance of the full (q,p) point
};

struct ErrorSummary {
  double mean_error = 0.0;
  double max_error = 0.0;
  double mean_error_full = 0.0;
  double max_error_full = 0.0;
  std::vector<ErrorSample> series;
  bool stable = false;
};

// ---------------------------------------------------------------------------
// Single-step dispatch and the state march

namespace detail {

template <HamiltonianModel M>
PhaseState one_step(const M& model, const PhaseState& s, double h,
                    const IntegratorSpec& spec, const IterationConfig& itcfg,
                    const MPETable* table) {
  switch (spec.kind) {
    case IntegratorKind::Euler: return euler_step(model, s, h);
    case IntegratorKind::Rk4: return rk4_step(model, s, h);
    case IntegratorKind::VerletVV:
      return verlet_step(model, s, h, itcfg, VerletForm::VV).new_state;
    case IntegratorKind::VerletPV:
      return verlet_step(model, s, h, itcfg, VerletForm::PV).new_state;
    case IntegratorKind::Newton:
      return newton_implicit_step(model, s, h, itcfg.tol);
    case IntegratorKind::Mpe: {
      auto kernel = [&](const PhaseState& x, double sub_h) {
        if constexpr (is_separable_v<M>)
          return verlet_separable_step(model, x, sub_h);
        else
          return verlet_step(model, x, sub_h, itcfg, VerletForm::VV).new_state;
      };
      return mpe_step(kernel, s, h, *table);
    }
    case IntegratorKind::IterativeMpe:
      return iterative_mpe_step(model, s, h, *table, itcfg).new_state;
  }
  throw ValidationError("unknown integrator");
}

/// Advance `steps` fixed steps of size h, invoking on_step(i, state) after
/// every step (i = 1..steps). Non-finite states and model singularities
/// abort with DivergenceError carrying the last completed time.
template <HamiltonianModel M, typename OnStep>
PhaseState march(const M& model, PhaseState state, double h, long steps,
                 const IntegratorSpec& spec, const IterationConfig& itcfg,
                 OnStep&& on_step) {
  std::optional<MPETable> table;
  if (spec.kind == IntegratorKind::Mpe ||
      spec.kind == IntegratorKind::IterativeMpe)
    table = mpe_coefficients(spec.order / 2);

  const double t0 = state.t;
  for (long i = 1; i <= steps; ++i) {
    PhaseState next;
    try {
      next = one_step(model, state, h, spec, itcfg,
                      table ? &*table : nullptr);
    } catch (const SingularityError& e) {
      throw DivergenceError(
          "trajectory hit the coordinate singularity at t = " +
              std::to_string(state.t) + " (" + e.what() + ")",
          state.t);
    }
    if (!all_finite(next))
      throw DivergenceError("trajectory diverged (non-finite state) at t = " +
                                std::to_string(state.t),
                            state.t);
    next.t = t0 + static_cast<double>(i) * h; // avoid accumulation drift
    state = next;
    on_step(i, state);
  }
  return state;
}

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace detail

// ---------------------------------------------------------------------------
// CSV boundary

inline const char* trajectory_csv_header() {
  return "t,q1,q2,q3,q4,q5,q6,p1,p2,p3,p4,p5,p6,H";
}

inline void write_trajectory_csv(const TrajectoryRecord& rec,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << trajectory_csv_header() << '\n';
  for (const auto& s : rec.samples) {
    out << detail::fmt_g17(s.t);
    for (int i = 0; i < 6; ++i) out << ',' << detail::fmt_g17(s.state.q[i]);
    for (int i = 0; i < 6; ++i) out << ',' << detail::fmt_g17(s.state.p[i]);
    out << ',' << detail::fmt_g17(s.energy) << '\n';
  }
  if (!out) throw IoError("write failure: " + path);
}

inline TrajectoryRecord read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || line != trajectory_csv_header())
    throw IoError("bad trajectory header in " + path);
  TrajectoryRecord rec;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<double> vals;
    while (std::getline(ls, field, ','))
      vals.push_back(std::strtod(field.c_str(), nullptr));
    if (vals.size() != 14) throw IoError("bad trajectory row in " + path);
    TrajectorySample s;
    s.t = vals[0];
    for (int i = 0; i < 6; ++i) s.state.q[i] = vals[1 + i];
    for (int i = 0; i < 6; ++i) s.state.p[i] = vals[7 + i];
    s.state.t = s.t;
    s.energy = vals[13];
    rec.samples.push_back(s);
  }
  return rec;
}

inline void write_error_csv(const ErrorSummary& sum, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "t,err\n";
  for (const auto& e : sum.series)
    out << detail::fmt_g17(e.t) << ',' << detail::fmt_g17(e.err) << '\n';
  out << "# mean_error=" << detail::fmt_g17(sum.mean_error) << '\n';
  out << "# max_error=" << detail::fmt_g17(sum.max_error) << '\n';
  if (!out) throw IoError("write failure: " + path);
}

// ---------------------------------------------------------------------------
// Operations

/// Run one experiment: advances steps x h from the initial state, records
/// every `stride`-th step (plus the initial and final states) and writes
/// the trajectory CSV when an output path is configured. A singularity or
/// non-finite state aborts with DivergenceError -- that abort is the
/// instability detector.
inline TrajectoryRecord run_simulation(const RunConfig& cfg) {
  cfg.validate();
  const ModelVariant model = make_model(cfg.model);

  TrajectoryRecord rec;
  std::visit(
      [&](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>,
                                     LevitronModel>) {
          if (!m.admissible(cfg.initial_state))
            throw ValidationError("run: initial state is inside the "
                                  "coordinate-singularity guard");
        }
        rec.samples.push_back(
            {cfg.initial_state.t, cfg.initial_state, m.energy(cfg.initial_state)});
        detail::march(m, cfg.initial_state, cfg.h, cfg.steps, cfg.integrator,
                      cfg.iteration, [&](long i, const PhaseState& s) {
                        if (i % cfg.stride == 0 || i == cfg.steps)
                          rec.samples.push_back({s.t, s, m.energy(s)});
                      });
      },
      model);

  if (!cfg.output_path.empty()) write_trajectory_csv(rec, cfg.output_path);
  return rec;
}

/// Largest |q3(t) - q3(0)| over the record.
inline double vertical_excursion(const TrajectoryRecord& rec) {
  if (rec.samples.empty()) return 0.0;
  const double z0 = rec.samples.front().state.q[2];
  double m = 0.0;
  for (const auto& s : rec.samples)
    m = std::max(m, std::abs(s.state.q[2] - z0));
  return m;
}

/// Per-sample center-of-mass error of `run` against `ref`, whose sample
/// times must be a superset of the run's (reference stride divides run
/// stride). The stability flag is true iff the run completed and its
/// vertical excursion stays within `bound`.
inline ErrorSummary compare_to_reference(const TrajectoryRecord& run,
                                         const TrajectoryRecord& ref,
                                         double bound = 0.5) {
  ErrorSummary sum;
  std::size_t j = 0;
  for (const auto& rs : run.samples) {
    const double tol = 1e-9 * std::max(1.0, std::abs(rs.t));
    while (j < ref.samples.size() && ref.samples[j].t < rs.t - tol) ++j;
    if (j >= ref.samples.size() || std::abs(ref.samples[j].t - rs.t) > tol)
      throw SampleAlignmentError(
          "reference does not sample t = " + std::to_string(rs.t));
    const PhaseState& a = rs.state;
    const PhaseState& b = ref.samples[j].state;
    double com = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = a.q[i] - b.q[i];
      com += d * d;
    }
    const double full =
        std::sqrt(norm(a.q - b.q) * norm(a.q - b.q) +
                  norm(a.p - b.p) * norm(a.p - b.p));
    sum.series.push_back({rs.t, std::sqrt(com), full});
  }
  for (const auto& e : sum.series) {
    sum.mean_error += e.err;
    sum.mean_error_full += e.err_full;
    sum.max_error = std::max(sum.max_error, e.err);
    sum.max_error_full = std::max(sum.max_error_full, e.err_full);
  }
  if (!sum.series.empty()) {
    sum.mean_error /= static_cast<double>(sum.series.size());
    sum.mean_error_full /= static_cast<double>(sum.series.size());
  }
  sum.stable = vertical_excursion(run) <= bound;
  return sum;
}

/// Transform a record into the drift series (t, H(t) - H(0)).
inline std::vector<std::pair<double, double>> energy_drift(
    const TrajectoryRecord& rec) {
  std::vector<std::pair<double, double>> out;
  if (rec.samples.empty()) return out;
  const double h0 = rec.samples.front().energy;
  out.reserve(rec.samples.size());
  for (const auto& s : rec.samples) out.emplace_back(s.t, s.energy - h0);
  return out;
}

// ---------------------------------------------------------------------------
// Convergence-order estimation

struct OrderFit {
  double slope = 0.0;
  std::vector<double> h_used;
  std::vector<double> err_used;
  std::vector<double> h_excluded; // dropped at the roundoff floor
};

namespace detail {

/// Least-squares slope of log(err) vs log(h), after trimming the trailing
/// h values where the error sequence stops decreasing (roundoff floor).
inline OrderFit loglog_slope(std::vector<double> hs, std::vector<double> errs) {
  OrderFit fit;
  std::size_t keep = hs.size();
  for (std::size_t i = 1; i < hs.size(); ++i) {
    if (!(errs[i] < errs[i - 1]) || errs[i] <= 0.0) {
      keep = i;
      break;
    }
  }
  for (std::size_t i = keep; i < hs.size(); ++i) fit.h_excluded.push_back(hs[i]);
  hs.resize(keep);
  errs.resize(keep);
  if (hs.size() < 2)
    throw DegenerateRegressionError(
        "order fit: fewer than two points above the roundoff floor");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double x = std::log(hs[i]);
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.h_used = std::move(hs);
  fit.err_used = std::move(errs);
  return fit;
}

} // namespace detail

/// Measure the global convergence order of an integrator: run to `horizon`
/// at each step size, compute the end-state error against the oracle
/// (analytic flow for the oscillator, a fine RK4 reference for the
/// levitron) and fit the log-log slope. Step sizes must be sorted
/// descending, at least four of them. Runs fan out concurrently.
inline OrderFit convergence_order(const ModelConfig& model_cfg,
                                  const IntegratorSpec& spec,
                                  const PhaseState& initial,
                                  std::vector<double> hs, double horizon,
                                  const IterationConfig& itcfg = {}) {
  if (hs.size() < 4)
    throw ValidationError("convergence_order: need at least 4 step sizes");
  if (!std::is_sorted(hs.rbegin(), hs.rend()))
    throw ValidationError("convergence_order: step sizes must be descending");
  for (const double h : hs) {
    const long steps = std::lround(horizon / h);
    if (steps < 1 || std::abs(steps * h - horizon) > 1e-9 * horizon)
      throw ValidationError("convergence_order: step size " +
                            std::to_string(h) +
                            " does not divide the horizon");
  }
  const ModelVariant model = make_model(model_cfg);

  // oracle end state
  PhaseState oracle;
  std::visit(
      [&](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>,
                                     OscillatorModel>) {
          oracle = m.exact_flow(initial, horizon);
        } else {
          const double h_ref = hs.back() / 16.0;
          const long steps = std::lround(horizon / h_ref);
          oracle = detail::march(m, initial, h_ref, steps,
                                 IntegratorSpec{IntegratorKind::Rk4, 4},
                                 itcfg, [](long, const PhaseState&) {});
        }
      },
      model);

  std::vector<std::future<double>> errs;
  for (const double h : hs) {
    errs.push_back(std::async(std::launch::async, [&, h]() {
      const long steps = std::max(1l, std::lround(horizon / h));
      double err = 0.0;
      std::visit(
          [&](const auto& m) {
            const PhaseState end =
                detail::march(m, initial, h, steps, spec, itcfg,
                              [](long, const PhaseState&) {});
            const double dq = norm(end.q - oracle.q);
            const double dp = norm(end.p - oracle.p);
            err = std::sqrt(dq * dq + dp * dp);
          },
          model);
      return err;
    }));
  }
  std::vector<double> err_vals;
  err_vals.reserve(hs.size());
  for (auto& f : errs) err_vals.push_back(f.get());
  return detail::loglog_slope(std::move(hs), std::move(err_vals));
}

// ---------------------------------------------------------------------------
// Spin-rate scan

struct SpinSample {
  double p6 = 0.0;
  bool stable = false;
  double survival = 0.0;
};

/// Probe the stability window in the spin momentum: for each sampled p6,
/// run a fixed-horizon simulation from the base config's start point (with
/// the pure-spin convention p5 = p6 cos q4) and record whether the run
/// survives with bounded vertical excursion. Individual divergences are
/// data, not errors. Samples are evaluated concurrently and reported in
/// index order.
inline std::vector<SpinSample> spin_scan(const RunConfig& base, double p6_min,
                                         double p6_max, int samples) {
  base.validate();
  if (base.model.kind != ModelKind::Levitron)
    throw ValidationError("spin_scan: model must be levitron");
  if (samples < 1) throw ValidationError("spin_scan: samples must be >= 1");
  if (!(p6_max >= p6_min) || !(p6_min >= 0.0))
    throw ValidationError("spin_scan: need 0 <= p6_min <= p6_max");

  const ModelVariant model = make_model(base.model);
  const auto& m = std::get<LevitronModel>(model);
  const double horizon = base.h * static_cast<double>(base.steps);

  auto probe = [&](double p6) -> SpinSample {
    PhaseState s0 = base.initial_state;
    s0.p[4] = p6 * std::cos(s0.q[3]);
    s0.p[5] = p6;
    SpinSample out{p6, false, 0.0};
    try {
      TrajectoryRecord rec;
      rec.samples.push_back({s0.t, s0, m.energy(s0)});
      detail::march(m, s0, base.h, base.steps, base.integrator, base.iteration,
                    [&](long i, const PhaseState& s) {
                      if (i % base.stride == 0 || i == base.steps)
                        rec.samples.push_back({s.t, s, m.energy(s)});
                    });
      out.survival = horizon;
      out.stable = vertical_excursion(rec) <= base.stability_bound;
    } catch (const DivergenceError& e) {
      out.survival = e.time_reached - base.initial_state.t;
      out.stable = false;
    }
    return out;
  };

  std::vector<std::future<SpinSample>> futs;
  for (int i = 0; i < samples; ++i) {
    const double p6 =
        samples == 1
            ? p6_min
            : p6_min + (p6_max - p6_min) * static_cast<double>(i) /
                           static_cast<double>(samples - 1);
    futs.push_back(std::async(std::launch::async, probe, p6));
  }
  std::vector<SpinSample> out;
  out.reserve(samples);
  for (auto& f : futs) out.push_back(f.get());
  return out;
}

inline void write_scan_csv(const std::vector<SpinSample>& scan,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "p6,stable,survival\n";
  for (const auto& s : scan)
    out << detail::fmt_g17(s.p6) << ',' << (s.stable ? 1 : 0) << ','
        << detail::fmt_g17(s.survival) << '\n';
  if (!out) throw IoError("write failure: " + path);
}

/// Middle sample of the longest stable stretch, if any sample is stable.
inline std::optional<double> pick_stable_spin(
    const std::vector<SpinSample>& scan) {
  std::size_t best_len = 0, best_begin = 0;
  std::size_t i = 0;
  while (i < scan.size()) {
    if (!scan[i].stable) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < scan.size() && scan[j].stable) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_begin = i;
    }
    i = j;
  }
  if (best_len == 0) return std::nullopt;
  return scan[best_begin + best_len / 2].p6;
}

} // namespace levi
