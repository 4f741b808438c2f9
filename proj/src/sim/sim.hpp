#pragma once

#include <array>
#include <functional>
#include <iosfwd>

#include "synth/synth.hpp"

namespace ioc {

struct SimConfig {
  double dt = 1e-3;
  double t_max = 50.0;
  double convergence_radius = 1e-6;
  double divergence_radius = 1e6;
  int stride = 1;  // record every Nth step (the final state is always kept)
};

struct Trajectory {
  int order = 2;
  std::vector<double> t;
  std::vector<std::array<double, 3>> x;
  std::vector<double> u;
  std::vector<double> cost;  // running integral of L(x, u)
  long steps = 0;  // integrator steps taken (recording may be strided)
  bool converged = false;
  bool diverged = false;

  double final_cost() const { return cost.back(); }
  const std::array<double, 3>& final_state() const { return x.back(); }
};

/// Closed-loop fixed-step RK4; the cost integral rides along as an extra
/// state so it sees the same stages as the dynamics.
Trajectory simulate(const SynthesisResult& res, const Problem& p, std::span<const double> x0,
                    const SimConfig& cfg = {});

/// Same integrator with the control law replaced; the running cost uses the
/// actual control, L = L_state + r*u^2.
Trajectory simulate_with_control(
    const SynthesisResult& res, const Problem& p, std::span<const double> x0,
    const std::function<double(std::span<const double>)>& control, const SimConfig& cfg = {});

/// |J(0..T) - (V(x0) - V(x_T))|; dV/dt = -L holds along closed-loop
/// trajectories, so the gap is pure integration error for any horizon.
double cost_consistency_gap(const SynthesisResult& res, const Trajectory& traj,
                            std::span<const double> x0);

struct PerturbationResult {
  double eps = 0.0;
  std::string policy;   // text form of the perturbation p(x)
  double j_nominal = 0.0;
  double j_perturbed = 0.0;
  double gap = 0.0;  // j_perturbed - j_nominal; >= 0 when u is optimal
};

/// Race the nominal policy against u + eps*p(x) for seeded random low-degree
/// polynomial perturbations p with p(0) = 0. Each run is scored by
/// int L dt + V(x(T)), which upper-bounds the optimal cost V(x0).
std::vector<PerturbationResult> perturbation_optimality(const SynthesisResult& res,
                                                        const Problem& p,
                                                        std::span<const double> x0,
                                                        int n_policies, unsigned seed,
                                                        const SimConfig& cfg = {});

void write_csv(const Trajectory& traj, std::ostream& out);
std::string trajectory_summary_json(const Trajectory& traj);

/// SVG phase portrait (x1 against x2) with the minimizer set of the running
/// cost overlaid as dots.
std::string phase_svg(const SynthesisResult& res, const Problem& p, const Trajectory& traj);

}  // namespace ioc
