#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "sim/sim.hpp"

using namespace ioc;

namespace {

Problem make_problem(const char* f1, const char* f2, double half_width = 2.0) {
  Problem p;
  p.name = "sim-test";
  p.system = SecondOrderSystem{parse(f1), parse(f2), 1.0, 1.0};
  p.domain = Domain::cube(2, half_width);
  return p;
}

}  // namespace

TEST_CASE("RK4 is step-size converged at the default dt") {
  Problem p = make_problem("x2", "0");
  auto res = synthesize(p);
  std::array<double, 2> x0{1.0, 1.0};

  SimConfig coarse;
  coarse.t_max = 10.0;
  SimConfig fine = coarse;
  fine.dt = coarse.dt / 2.0;

  auto a = simulate(res, p, x0, coarse);
  auto b = simulate(res, p, x0, fine);
  for (int i = 0; i < 2; ++i)
    CHECK(std::fabs(a.final_state()[i] - b.final_state()[i]) <= 1e-6);
  CHECK(std::fabs(a.final_cost() - b.final_cost()) <= 1e-6);
}

TEST_CASE("closed-loop cost matches the value function difference") {
  // dV/dt = -L along trajectories, so J(0..T) = V(x0) - V(x(T)) at any T
  std::vector<Problem> problems;
  problems.push_back(make_problem("x2", "0"));
  {
    Problem p = make_problem("x2", "-x1^3");
    p.cost = CostCaseII{parse("0"), 1.0};
    problems.push_back(p);
  }
  {
    Problem p = make_problem("x2", "-x1 + 0.5*(1 - x1^2)*x2");
    p.cost = CostCaseII{parse("0"), 1.0};
    problems.push_back(p);
  }
  for (auto& p : problems) {
    auto res = synthesize(p);
    SimConfig cfg;
    cfg.t_max = 15.0;
    for (std::array<double, 2> x0 :
         {std::array<double, 2>{1.0, -0.5}, {-0.8, 0.9}, {0.3, 0.3}}) {
      auto traj = simulate(res, p, x0, cfg);
      CHECK_FALSE(traj.diverged);
      CHECK(cost_consistency_gap(res, traj, x0) <= 1e-3);
    }
  }
}

TEST_CASE("a stabilized trajectory converges and J approaches V(x0)") {
  Problem p = make_problem("x2", "0");
  auto res = synthesize(p);
  std::array<double, 2> x0{0.5, -0.25};
  auto traj = simulate(res, p, x0);
  CHECK(traj.converged);
  CHECK_FALSE(traj.diverged);
  double v0 = res.V.eval(x0);
  CHECK(std::fabs(traj.final_cost() - v0) <= 1e-6 * (1.0 + v0));
}

TEST_CASE("divergence is detected and flagged") {
  Problem p = make_problem("x2", "0");
  auto res = synthesize(p);
  std::array<double, 2> x0{1.0, 0.0};
  auto traj = simulate_with_control(
      res, p, x0, [](std::span<const double> x) { return x[0]; });
  CHECK(traj.diverged);
  CHECK_FALSE(traj.converged);
}

TEST_CASE("perturbed policies never beat the synthesized control") {
  Problem p = make_problem("x2", "0");
  auto res = synthesize(p);
  std::array<double, 2> x0{0.4, 0.4};
  SimConfig cfg;
  cfg.t_max = 20.0;
  auto results = perturbation_optimality(res, p, x0, 12, 424242, cfg);
  CHECK(results.size() == 12);
  for (const auto& r : results) {
    CAPTURE(r.policy);
    CAPTURE(r.eps);
    CHECK(r.gap >= -1e-3);
  }
}

TEST_CASE("csv output has one row per recorded sample") {
  Problem p = make_problem("x2", "0");
  auto res = synthesize(p);
  std::array<double, 2> x0{0.2, 0.0};
  SimConfig cfg;
  cfg.t_max = 0.01;  // 10 steps
  cfg.stride = 2;
  auto traj = simulate(res, p, x0, cfg);
  CHECK(traj.t.size() == 6);  // initial sample + every 2nd of 10 steps
  std::ostringstream out;
  write_csv(traj, out);
  std::string s = out.str();
  CHECK(s.rfind("t,x1,x2,u,cost\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 7);

  std::string j = trajectory_summary_json(traj);
  CHECK(j.find("\"steps\": 10") != std::string::npos);
}
