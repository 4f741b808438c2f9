#include "sim/sim.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "json.hpp"

namespace ioc {

namespace {

double norm2(std::span<const double> x, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

struct ClosedLoop {
  int n;
  std::array<Expr, 3> drift;  // open-loop part per state
  int input_state;            // index receiving b*u
  double b;
  Expr L_state;
  double r;
  std::function<double(std::span<const double>)> control;

  void deriv(const std::array<double, 3>& x, std::array<double, 4>& dx) const {
    double u = control(std::span<const double>(x.data(), n));
    for (int i = 0; i < n; ++i)
      dx[i] = drift[i].is_zero() ? 0.0 : drift[i].eval(x);
    dx[input_state] += b * u;
    dx[3] = L_state.eval(x) + r * u * u;  // running cost
  }
};

ClosedLoop make_loop(const SynthesisResult& res, const Problem& p,
                     std::function<double(std::span<const double>)> control) {
  ClosedLoop loop;
  loop.n = p.order();
  if (p.order() == 2) {
    loop.drift = {p.second().f1, p.second().f2, Expr()};
    loop.input_state = 1;
  } else {
    const auto& s = p.third();
    loop.drift = {s.f, s.d * s.f + s.g, Expr()};
    loop.input_state = 2;
  }
  loop.b = res.b;
  loop.L_state = res.L_state;
  loop.r = res.r;
  loop.control = std::move(control);
  return loop;
}

Trajectory run(const ClosedLoop& loop, std::span<const double> x0, const SimConfig& cfg) {
  Trajectory traj;
  traj.order = loop.n;
  std::array<double, 3> x{0, 0, 0};
  for (int i = 0; i < loop.n; ++i) x[i] = x0[i];
  double J = 0.0;
  double t = 0.0;
  int step = 0;
  int stride = std::max(1, cfg.stride);

  auto record = [&]() {
    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.u.push_back(loop.control(std::span<const double>(x.data(), loop.n)));
    traj.cost.push_back(J);
  };
  record();

  long max_steps = std::lround(cfg.t_max / cfg.dt);
  std::array<double, 4> k1{}, k2{}, k3{}, k4{};
  std::array<double, 3> xs{0, 0, 0};
  while (step < max_steps) {
    double h = cfg.dt;
    loop.deriv(x, k1);
    for (int i = 0; i < loop.n; ++i) xs[i] = x[i] + 0.5 * h * k1[i];
    loop.deriv(xs, k2);
    for (int i = 0; i < loop.n; ++i) xs[i] = x[i] + 0.5 * h * k2[i];
    loop.deriv(xs, k3);
    for (int i = 0; i < loop.n; ++i) xs[i] = x[i] + h * k3[i];
    loop.deriv(xs, k4);
    for (int i = 0; i < loop.n; ++i)
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    J += h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]);
    t += h;
    ++step;

    double nrm = norm2(x, loop.n);
    bool last = false;
    if (nrm <= cfg.convergence_radius) {
      traj.converged = true;
      last = true;
    } else if (nrm > cfg.divergence_radius || !std::isfinite(nrm)) {
      traj.diverged = true;
      last = true;
    }
    if (step % stride == 0 || last || step == max_steps) record();
    if (last) break;
  }
  traj.steps = step;
  return traj;
}

}  // namespace

Trajectory simulate(const SynthesisResult& res, const Problem& p, std::span<const double> x0,
                    const SimConfig& cfg) {
  const Expr u = res.u;
  return run(make_loop(res, p, [u](std::span<const double> x) { return u.eval(x); }), x0, cfg);
}

Trajectory simulate_with_control(const SynthesisResult& res, const Problem& p,
                                 std::span<const double> x0,
                                 const std::function<double(std::span<const double>)>& control,
                                 const SimConfig& cfg) {
  return run(make_loop(res, p, control), x0, cfg);
}

double cost_consistency_gap(const SynthesisResult& res, const Trajectory& traj,
                            std::span<const double> x0) {
  const auto& xT = traj.final_state();
  double v0 = res.V.eval(x0);
  double vT = res.V.eval(std::span<const double>(xT.data(), traj.order));
  return std::fabs(traj.final_cost() - (v0 - vT));
}

std::vector<PerturbationResult> perturbation_optimality(const SynthesisResult& res,
                                                        const Problem& p,
                                                        std::span<const double> x0,
                                                        int n_policies, unsigned seed,
                                                        const SimConfig& cfg) {
  int n = p.order();
  auto score = [&](const Trajectory& traj) {
    const auto& xT = traj.final_state();
    return traj.final_cost() + res.V.eval(std::span<const double>(xT.data(), n));
  };
  double j_nominal = score(simulate(res, p, x0, cfg));

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::uniform_int_distribution<int> vpick(1, n);
  const double eps_levels[] = {0.01, -0.01, 0.1, -0.1};

  std::vector<PerturbationResult> out;
  for (int i = 0; i < n_policies; ++i) {
    // random polynomial with p(0) = 0: linear + one quadratic + one cubic term
    Expr pert = Expr();
    for (int v = 1; v <= n; ++v) pert = pert + coeff(rng) * Expr::variable(v);
    pert = pert + coeff(rng) * Expr::variable(vpick(rng)) * Expr::variable(vpick(rng));
    pert = pert + coeff(rng) * Expr::pow(Expr::variable(vpick(rng)), 3);

    PerturbationResult r;
    r.eps = eps_levels[i % 4];
    r.policy = pert.str();
    r.j_nominal = j_nominal;
    const Expr u = res.u;
    double eps = r.eps;
    Trajectory traj = simulate_with_control(
        res, p, x0,
        [&u, &pert, eps](std::span<const double> x) { return u.eval(x) + eps * pert.eval(x); },
        cfg);
    r.j_perturbed = traj.diverged ? std::numeric_limits<double>::infinity() : score(traj);
    r.gap = r.j_perturbed - r.j_nominal;
    out.push_back(std::move(r));
  }
  return out;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
  out << "t";
  for (int i = 0; i < traj.order; ++i) out << ",x" << (i + 1);
  out << ",u,cost\n";
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    out << format_real(traj.t[k]);
    for (int i = 0; i < traj.order; ++i) out << ',' << format_real(traj.x[k][i]);
    out << ',' << format_real(traj.u[k]) << ',' << format_real(traj.cost[k]) << '\n';
  }
}

std::string trajectory_summary_json(const Trajectory& traj) {
  nlohmann::json j;
  j["order"] = traj.order;
  j["steps"] = traj.steps;
  j["t_final"] = traj.t.back();
  j["converged"] = traj.converged;
  j["diverged"] = traj.diverged;
  j["cost"] = traj.final_cost();
  nlohmann::json xf = nlohmann::json::array();
  for (int i = 0; i < traj.order; ++i) xf.push_back(traj.x.back()[i]);
  j["x_final"] = xf;
  return j.dump(2);
}

}  // namespace ioc
