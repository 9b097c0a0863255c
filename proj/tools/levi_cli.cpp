// Benchmark CLI for the levitron integration library.
//
// Subcommands:
//   run      advance one trajectory and emit a CSV
//   compare  per-sample error of a run against a reference trajectory
//   order    log-log convergence-order fit over a step-size ladder
//   scan     spin-rate stability scan
//
// Exit codes: 0 success, 2 trajectory divergence, 1 usage or I/O error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "levi/levi.hpp"

namespace {

struct ModelFlags {
  std::string model = "levitron";
  double a = 0.1;
  double c = 0.1;
  std::string M = "auto";
  double z_star = 1.72;
  double sin_guard = 1e-8;
  double mhat = 1.0;
  double khat = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "model: levitron | oscillator")
        ->check(CLI::IsMember({"levitron", "oscillator"}))
        ->capture_default_str();
    cmd->add_option("--a", a, "transverse inertia (levitron)")
        ->capture_default_str();
    cmd->add_option("--c", c, "axial inertia (levitron)")
        ->capture_default_str();
    cmd->add_option("--M", M,
                    "magnetic/gravitational energy ratio, or 'auto' to "
                    "calibrate the equilibrium at --z0")
        ->capture_default_str();
    cmd->add_option("--z0", z_star, "equilibrium height (levitron)")
        ->capture_default_str();
    cmd->add_option("--sin-guard", sin_guard,
                    "minimum |sin q4| before the run aborts (levitron)")
        ->capture_default_str();
    cmd->add_option("--mhat", mhat, "oscillator mass")->capture_default_str();
    cmd->add_option("--khat", khat, "oscillator stiffness")
        ->capture_default_str();
  }

  levi::ModelConfig build() const {
    levi::ModelConfig cfg;
    cfg.kind = model == "oscillator" ? levi::ModelKind::Oscillator
                                     : levi::ModelKind::Levitron;
    cfg.a = a;
    cfg.c = c;
    cfg.z_star = z_star;
    cfg.sin_guard = sin_guard;
    cfg.mass = mhat;
    cfg.stiffness = khat;
    if (M == "auto") {
      cfg.auto_M = true;
    } else {
      cfg.auto_M = false;
      cfg.M = std::stod(M);
    }
    return cfg;
  }
};

struct IntegratorFlags {
  std::string integrator = "rk4";
  int order = 4;
  int iters = 4;
  double tol = 1e-4;
  std::string init = "previous-step";

  void attach(CLI::App* cmd) {
    cmd->add_option("--integrator", integrator,
                    "euler | rk4 | verlet-vv | verlet-pv | newton | mpe | "
                    "iterative-mpe")
        ->check(CLI::IsMember({"euler", "rk4", "verlet-vv", "verlet-pv",
                               "newton", "mpe", "iterative-mpe"}))
        ->capture_default_str();
    cmd->add_option("--order", order, "extrapolation order 2n (mpe)")
        ->capture_default_str();
    cmd->add_option("--iters", iters, "max fixed-point iterations I")
        ->capture_default_str();
    cmd->add_option("--tol", tol, "iteration stopping tolerance err")
        ->capture_default_str();
    cmd->add_option("--init", init,
                    "iteration start: previous-step | explicit-euler | rk4")
        ->check(CLI::IsMember({"previous-step", "explicit-euler", "rk4"}))
        ->capture_default_str();
  }

  levi::IntegratorSpec spec() const {
    levi::IntegratorSpec s;
    if (integrator == "euler") s.kind = levi::IntegratorKind::Euler;
    else if (integrator == "rk4") s.kind = levi::IntegratorKind::Rk4;
    else if (integrator == "verlet-vv") s.kind = levi::IntegratorKind::VerletVV;
    else if (integrator == "verlet-pv") s.kind = levi::IntegratorKind::VerletPV;
    else if (integrator == "newton") s.kind = levi::IntegratorKind::Newton;
    else if (integrator == "mpe") s.kind = levi::IntegratorKind::Mpe;
    else s.kind = levi::IntegratorKind::IterativeMpe;
    s.order = order;
    return s;
  }

  levi::IterationConfig iteration() const {
    levi::IterationConfig c;
    c.max_iters = iters;
    c.tol = tol;
    if (init == "explicit-euler") c.init = levi::InitScheme::ExplicitEuler;
    else if (init == "rk4") c.init = levi::InitScheme::Rk4;
    else c.init = levi::InitScheme::PreviousStep;
    return c;
  }
};

struct StartFlags {
  double tilt = 0.01;
  double spin = 1.6;
  std::vector<double> state; // full 12-component override

  void attach(CLI::App* cmd) {
    cmd->add_option("--tilt", tilt, "initial tilt q4 (levitron)")
        ->capture_default_str();
    cmd->add_option("--spin", spin, "initial spin momentum p6 (levitron)")
        ->capture_default_str();
    cmd->add_option("--state", state,
                    "explicit initial state q1..q6,p1..p6 (overrides the "
                    "default start)")
        ->expected(12);
  }

  levi::PhaseState build(const levi::ModelConfig& model) const {
    if (!state.empty()) {
      levi::PhaseState s;
      for (int i = 0; i < 6; ++i) s.q[i] = state[i];
      for (int i = 0; i < 6; ++i) s.p[i] = state[6 + i];
      return s;
    }
    if (model.kind == levi::ModelKind::Levitron)
      return levi::spinning_start(model.z_star, tilt, spin);
    levi::PhaseState s;
    s.q[0] = 1.0; // default oscillator start: unit displacement, at rest
    return s;
  }
};

int run_command(const ModelFlags& mf, const IntegratorFlags& inf,
                const StartFlags& sf, double dt, long steps, long stride,
                double bound, const std::string& out_path,
                const std::string& ref_path) {
  levi::RunConfig cfg;
  cfg.model = mf.build();
  cfg.integrator = inf.spec();
  cfg.iteration = inf.iteration();
  cfg.h = dt;
  cfg.steps = steps;
  cfg.stride = stride;
  cfg.stability_bound = bound;
  cfg.initial_state = sf.build(cfg.model);
  cfg.output_path = out_path;
  cfg.reference_path = ref_path;

  const levi::TrajectoryRecord rec = levi::run_simulation(cfg);
  std::cout << "completed " << steps << " steps to t = "
            << levi::detail::fmt_g17(rec.samples.back().t) << ", |H(end)-H(0)| = "
            << levi::detail::fmt_g17(std::abs(rec.samples.back().energy -
                                              rec.samples.front().energy))
            << '\n';
  if (!ref_path.empty()) {
    const levi::TrajectoryRecord ref = levi::read_trajectory_csv(ref_path);
    const levi::ErrorSummary sum =
        levi::compare_to_reference(rec, ref, bound);
    std::cout << "vs reference: mean_error = "
              << levi::detail::fmt_g17(sum.mean_error)
              << ", max_error = " << levi::detail::fmt_g17(sum.max_error)
              << ", full-state mean = "
              << levi::detail::fmt_g17(sum.mean_error_full)
              << ", stable = " << (sum.stable ? "true" : "false") << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric integrators and benchmark harness for the "
               "levitating-top Hamiltonian"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file ('#' comments); "
                                 "command-line flags take precedence");
  app.get_config_formatter_base()->comment('#');

  // ---- run ----
  auto* run = app.add_subcommand("run", "integrate one trajectory");
  ModelFlags run_model;
  IntegratorFlags run_integ;
  StartFlags run_start;
  double dt = 1e-3;
  long steps = 1000;
  long stride = 1;
  double bound = 0.5;
  std::string out_path = "traj.csv";
  std::string ref_path;
  run_model.attach(run);
  run_integ.attach(run);
  run_start.attach(run);
  run->add_option("--dt", dt, "time step")->capture_default_str();
  run->add_option("--steps", steps, "number of steps")->capture_default_str();
  run->add_option("--stride", stride, "output every n-th step")
      ->capture_default_str();
  run->add_option("--bound", bound, "vertical excursion bound for stability")
      ->capture_default_str();
  run->add_option("--out", out_path, "trajectory CSV path")
      ->capture_default_str();
  run->add_option("--ref", ref_path, "reference trajectory CSV to compare");

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare",
                                 "error of a run against a reference CSV");
  std::string cmp_run, cmp_ref, cmp_out = "err.csv";
  double cmp_bound = 0.5;
  cmp->add_option("--run", cmp_run, "run trajectory CSV")->required();
  cmp->add_option("--ref", cmp_ref, "reference trajectory CSV")->required();
  cmp->add_option("--out", cmp_out, "error CSV path")->capture_default_str();
  cmp->add_option("--bound", cmp_bound, "stability bound")
      ->capture_default_str();

  // ---- order ----
  auto* ord = app.add_subcommand("order", "convergence-order fit");
  ModelFlags ord_model;
  ord_model.model = "oscillator"; // the analytic-oracle default
  IntegratorFlags ord_integ;
  StartFlags ord_start;
  double h0 = 0.2, factor = 2.0, horizon = 1.0;
  int levels = 4;
  ord_model.attach(ord);
  ord_integ.attach(ord);
  ord_start.attach(ord);
  ord->add_option("--h0", h0, "largest step size")->capture_default_str();
  ord->add_option("--levels", levels, "number of step sizes (>= 4)")
      ->capture_default_str();
  ord->add_option("--factor", factor, "step-size reduction factor")
      ->capture_default_str();
  ord->add_option("--horizon", horizon, "integration horizon")
      ->capture_default_str();

  // ---- scan ----
  auto* scn = app.add_subcommand("scan", "spin-rate stability scan");
  ModelFlags scn_model;
  IntegratorFlags scn_integ;
  StartFlags scn_start;
  double p6_min = 0.0, p6_max = 4.0, scan_dt = 1e-3, scan_horizon = 2.0,
         scan_bound = 0.5;
  int scan_samples = 17;
  std::string scan_out = "scan.csv";
  scn_model.attach(scn);
  scn_integ.attach(scn);
  scn_start.attach(scn);
  scn->add_option("--p6-min", p6_min, "smallest spin momentum")
      ->capture_default_str();
  scn->add_option("--p6-max", p6_max, "largest spin momentum")
      ->capture_default_str();
  scn->add_option("--samples", scan_samples, "number of samples")
      ->capture_default_str();
  scn->add_option("--dt", scan_dt, "time step")->capture_default_str();
  scn->add_option("--horizon", scan_horizon, "horizon per sample")
      ->capture_default_str();
  scn->add_option("--bound", scan_bound, "vertical excursion bound")
      ->capture_default_str();
  scn->add_option("--out", scan_out, "scan CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run)
      return run_command(run_model, run_integ, run_start, dt, steps, stride,
                         bound, out_path, ref_path);

    if (*cmp) {
      const auto rec = levi::read_trajectory_csv(cmp_run);
      const auto ref = levi::read_trajectory_csv(cmp_ref);
      const auto sum = levi::compare_to_reference(rec, ref, cmp_bound);
      levi::write_error_csv(sum, cmp_out);
      std::cout << "mean_error = " << levi::detail::fmt_g17(sum.mean_error)
                << "\nmax_error = " << levi::detail::fmt_g17(sum.max_error)
                << "\nfull-state mean = "
                << levi::detail::fmt_g17(sum.mean_error_full)
                << "\nfull-state max = "
                << levi::detail::fmt_g17(sum.max_error_full)
                << "\nstable = " << (sum.stable ? "true" : "false") << '\n';
      return 0;
    }

    if (*ord) {
      std::vector<double> hs;
      for (int i = 0; i < levels; ++i)
        hs.push_back(h0 / std::pow(factor, i));
      const auto model_cfg = ord_model.build();
      const auto fit = levi::convergence_order(
          model_cfg, ord_integ.spec(), ord_start.build(model_cfg), hs, horizon,
          ord_integ.iteration());
      for (std::size_t i = 0; i < fit.h_used.size(); ++i)
        std::cout << "h = " << levi::detail::fmt_g17(fit.h_used[i])
                  << "  err = " << levi::detail::fmt_g17(fit.err_used[i])
                  << '\n';
      for (const double h : fit.h_excluded)
        std::cout << "h = " << levi::detail::fmt_g17(h)
                  << "  excluded (roundoff floor)\n";
      std::cout << "slope = " << levi::detail::fmt_g17(fit.slope) << '\n';
      return 0;
    }

    if (*scn) {
      levi::RunConfig base;
      base.model = scn_model.build();
      base.integrator = scn_integ.spec();
      base.iteration = scn_integ.iteration();
      base.h = scan_dt;
      base.steps = std::lround(scan_horizon / scan_dt);
      base.stability_bound = scan_bound;
      base.initial_state = scn_start.build(base.model);
      const auto scan = levi::spin_scan(base, p6_min, p6_max, scan_samples);
      levi::write_scan_csv(scan, scan_out);
      const levi::SpinSample* first = nullptr;
      const levi::SpinSample* last = nullptr;
      for (const auto& s : scan)
        if (s.stable) {
          if (!first) first = &s;
          last = &s;
        }
      if (first)
        std::cout << "stable window: first p6 = "
                  << levi::detail::fmt_g17(first->p6)
                  << ", last p6 = " << levi::detail::fmt_g17(last->p6) << '\n';
      else
        std::cout << "no stable sample in range\n";
      return 0;
    }
  } catch (const levi::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return 2;
  } catch (const levi::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 1;
  } catch (const levi::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
