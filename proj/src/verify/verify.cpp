#include "verify/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

namespace ioc {

namespace {

std::string point_str(const std::array<double, 3>& x, int n) {
  std::string s = "(";
  for (int i = 0; i < n; ++i) {
    if (i) s += ", ";
    s += format_real(x[i]);
  }
  return s + ")";
}

/// Call fn on every point of a uniform grid with `per` points per axis.
/// fn returning false stops the sweep early.
template <typename Fn>
void sweep_grid(const Domain& dom, int per, Fn&& fn) {
  int n = dom.dim();
  int total = 1;
  for (int i = 0; i < n; ++i) total *= per;
  for (int t = 0; t < total; ++t) {
    std::array<double, 3> x{0, 0, 0};
    int rem = t;
    for (int i = 0; i < n; ++i) {
      int idx = rem % per;
      rem /= per;
      const auto& b = dom.bounds[i];
      x[i] = b.lo + (b.hi - b.lo) * idx / (per - 1);
    }
    if (!fn(x)) return;
  }
}

double inf_norm(const std::array<double, 3>& x, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

// 5-point central difference of V in one variable
double fd_partial(const ValueFunction& V, std::array<double, 3> x, int var, double h) {
  auto f = [&](double t) {
    auto y = x;
    y[var - 1] = t;
    return V.eval(y);
  };
  double c = x[var - 1];
  return (-f(c + 2 * h) + 8 * f(c + h) - 8 * f(c - h) + f(c - 2 * h)) / (12 * h);
}

}  // namespace

VerificationReport verify(const SynthesisResult& res, const Problem& p,
                          const VerifyConfig& cfg) {
  VerificationReport report;
  report.system = p.name;
  int n = p.order();
  int per = cfg.resolution > 0 ? cfg.resolution : (n == 2 ? 41 : 21);

  HamiltonianEvaluator H(res, p);
  Expr L_full = res.running_cost();

  // 1. pointwise Hamiltonian residual on the grid
  {
    CheckResult c{"hjb_residual", true, true, ""};
    double worst = 0.0;
    std::array<double, 3> worst_x{0, 0, 0};
    sweep_grid(p.domain, per, [&](const std::array<double, 3>& x) {
      double L, r;
      try {
        L = L_full.eval(x);
        r = H.residual(x);
      } catch (const EvalError&) {
        return true;
      }
      double rel = std::fabs(r) / (1.0 + std::fabs(L));
      if (rel > worst) {
        worst = rel;
        worst_x = x;
      }
      return true;
    });
    c.passed = worst <= 1e-8;
    c.detail = "max relative residual " + format_real(worst) + " at " + point_str(worst_x, n);
    report.checks.push_back(c);
  }

  // 2. state part of the running cost is non-negative
  {
    CheckResult c{"state_cost_nonneg", true, true, ""};
    double worst = 0.0;
    std::array<double, 3> worst_x{0, 0, 0};
    sweep_grid(p.domain, per, [&](const std::array<double, 3>& x) {
      double v;
      try {
        v = res.L_state.eval(x);
      } catch (const EvalError&) {
        return true;
      }
      if (v < worst) {
        worst = v;
        worst_x = x;
      }
      return true;
    });
    c.passed = worst >= -1e-10;
    c.detail = c.passed ? "min grid value " + format_real(worst)
                        : "negative value " + format_real(worst) + " at " + point_str(worst_x, n);
    report.checks.push_back(c);
  }

  // 3. positive definiteness of V on the claimed region (informational)
  {
    CheckResult c{"value_positive_definite", false, true, ""};
    Domain region = res.local_claim ? p.domain.scaled(0.1) : p.domain;
    if (res.local_claim) c.detail = "on the 0.1-scaled domain: ";
    bool ok = true;
    std::array<double, 3> witness{0, 0, 0};
    double wv = 0.0;
    sweep_grid(region, per, [&](const std::array<double, 3>& x) {
      double nrm2 = 0.0;
      for (int i = 0; i < n; ++i) nrm2 += x[i] * x[i];
      if (nrm2 < 1e-16) return true;
      double v;
      try {
        v = res.V.eval(x);
      } catch (const EvalError&) {
        return true;
      }
      if (v <= 1e-12) {
        ok = false;
        witness = x;
        wv = v;
        return false;
      }
      return true;
    });
    c.passed = ok;
    c.detail += ok ? "V > 0 at all non-origin grid points"
                   : "V = " + format_real(wv) + " at " + point_str(witness, n);
    report.checks.push_back(c);
  }

  // 4. stationarity of the Hamiltonian in u
  {
    CheckResult c{"stationarity", true, true, ""};
    double worst = 0.0;
    sweep_grid(p.domain, per, [&](const std::array<double, 3>& x) {
      double u, s;
      try {
        u = res.u.eval(x);
        s = H.stationarity(x);
      } catch (const EvalError&) {
        return true;
      }
      worst = std::max(worst, std::fabs(s) / (1.0 + std::fabs(u)));
      return true;
    });
    c.passed = worst <= 1e-8;
    c.detail = "max relative defect " + format_real(worst);
    report.checks.push_back(c);
  }

  // 5. symbolic gradient of V against finite differences
  {
    CheckResult c{"gradient_consistency", true, true, ""};
    std::vector<Expr> grad;
    for (int i = 1; i <= n; ++i) grad.push_back(res.V.partial(i));
    std::mt19937 rng(cfg.seed);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      std::array<double, 3> x{0, 0, 0};
      for (int i = 0; i < n; ++i) {
        std::uniform_real_distribution<double> u(0.9 * p.domain.bounds[i].lo,
                                                 0.9 * p.domain.bounds[i].hi);
        x[i] = u(rng);
      }
      for (int v = 1; v <= n; ++v) {
        double sym, num;
        try {
          sym = grad[v - 1].eval(x);
          num = fd_partial(res.V, x, v, 1e-5);
        } catch (const EvalError&) {
          continue;
        }
        worst = std::max(worst, std::fabs(sym - num) / (1.0 + std::fabs(sym)));
      }
    }
    c.passed = worst <= 1e-6;
    c.detail = "max relative gradient gap " + format_real(worst);
    report.checks.push_back(c);
  }

  // 6. trajectory battery: decrease of V, dV/dt = -L, terminal cost
  {
    CheckResult c{"trajectories", true, true, ""};
    std::vector<std::array<double, 3>> starts;
    Domain half = p.domain.scaled(0.5);
    // corners of the half-domain first, then seeded random fill
    int corners = 1 << n;
    for (int mask = 0; mask < corners && (int)starts.size() < cfg.trajectories; ++mask) {
      std::array<double, 3> x{0, 0, 0};
      for (int i = 0; i < n; ++i)
        x[i] = (mask >> i & 1) ? half.bounds[i].hi : half.bounds[i].lo;
      starts.push_back(x);
    }
    std::mt19937 rng(cfg.seed + 1);
    while ((int)starts.size() < cfg.trajectories) {
      std::array<double, 3> x{0, 0, 0};
      for (int i = 0; i < n; ++i) {
        std::uniform_real_distribution<double> u(half.bounds[i].lo, half.bounds[i].hi);
        x[i] = u(rng);
      }
      starts.push_back(x);
    }

    SimConfig sim;
    sim.dt = cfg.dt;
    sim.t_max = cfg.t_max;
    int converged_count = 0;
    for (const auto& x0 : starts) {
      auto traj = simulate(res, p, std::span<const double>(x0.data(), n), sim);
      if (traj.diverged) {
        c.passed = false;
        c.detail = "divergence from " + point_str(x0, n);
        break;
      }
      if (traj.converged) ++converged_count;
      // probe every 50th step; 5-point central difference in time keeps the
      // truncation error well below the tolerance
      double prev_v = res.V.eval(std::span<const double>(x0.data(), n));
      for (std::size_t k = 50; k + 2 < traj.x.size(); k += 50) {
        auto sp = [&](std::size_t i) {
          return std::span<const double>(traj.x[i].data(), n);
        };
        double vm2 = res.V.eval(sp(k - 2));
        double vm = res.V.eval(sp(k - 1));
        double v0 = res.V.eval(sp(k));
        double vp = res.V.eval(sp(k + 1));
        double vp2 = res.V.eval(sp(k + 2));
        double L = L_full.eval(sp(k));
        double dvdt = (-vp2 + 8.0 * vp - 8.0 * vm + vm2) / (12.0 * sim.dt);
        if (std::fabs(dvdt + L) > 1e-6 * (1.0 + std::fabs(L))) {
          c.passed = false;
          c.detail = "dV/dt + L = " + format_real(dvdt + L) + " at t = " +
                     format_real(traj.t[k]) + " from " + point_str(x0, n);
          break;
        }
        if (v0 > prev_v + 1e-9 * (1.0 + std::fabs(prev_v))) {
          c.passed = false;
          c.detail = "V increased along the trajectory from " + point_str(x0, n);
          break;
        }
        prev_v = v0;
      }
      if (!c.passed) break;
      if (traj.converged) {
        double Lf = L_full.eval(std::span<const double>(traj.final_state().data(), n));
        if (Lf > 1e-8) {
          c.passed = false;
          c.detail = "terminal running cost " + format_real(Lf) + " from " + point_str(x0, n);
          break;
        }
      }
    }
    if (c.passed)
      c.detail = std::to_string(starts.size()) + " trajectories, " +
                 std::to_string(converged_count) + " converged within t_max";
    report.checks.push_back(c);
  }

  // 7. re-evaluated synthesis conditions (informational)
  {
    CheckResult c{"synthesis_conditions", false, true, ""};
    std::string failed;
    for (const auto& cond : res.conditions) {
      if (cond.status == CheckStatus::Failed) {
        if (!failed.empty()) failed += ", ";
        failed += cond.name;
      }
    }
    c.passed = failed.empty();
    c.detail = c.passed ? "no failed synthesis conditions" : "failed: " + failed;
    report.checks.push_back(c);
  }

  // 8. radial growth probe on twice the domain (informational)
  {
    CheckResult c{"radial_growth", false, true, ""};
    double edge = 0.0;
    for (int i = 0; i < n; ++i)
      edge = std::max(edge, std::max(-p.domain.bounds[i].lo, p.domain.bounds[i].hi));
    bool ok = true;
    std::array<double, 3> witness{0, 0, 0};
    double wv = 0.0;
    sweep_grid(p.domain.scaled(2.0), n == 2 ? 81 : 41, [&](const std::array<double, 3>& x) {
      if (inf_norm(x, n) < edge) return true;
      double v;
      try {
        v = res.V.eval(x);
      } catch (const EvalError&) {
        return true;
      }
      if (v <= 1e-2) {
        ok = false;
        witness = x;
        wv = v;
        return false;
      }
      return true;
    });
    c.passed = ok;
    c.detail = ok ? "V stays above 1e-2 outside the domain edge"
                  : "V = " + format_real(wv) + " at far point " + point_str(witness, n);
    report.checks.push_back(c);
  }

  bool mandatory_fail = false, informational_fail = false;
  for (const auto& c : report.checks) {
    if (!c.passed) (c.mandatory ? mandatory_fail : informational_fail) = true;
  }
  report.overall = mandatory_fail ? "fail" : (informational_fail ? "partial" : "pass");
  return report;
}

PdRegion hessian_pd_region(const ValueFunction& V, const Domain& scan, int resolution) {
  int n = scan.dim();
  int per = resolution > 0 ? resolution : (n == 2 ? 41 : 21);
  std::vector<std::vector<Expr>> Hs(n, std::vector<Expr>(n));
  for (int i = 0; i < n; ++i) {
    Expr gi = V.partial(i + 1);
    for (int j = 0; j < n; ++j) Hs[i][j] = gi.diff(j + 1);
  }
  auto pd_at = [&](const std::array<double, 3>& x) {
    double h[3][3];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        try {
          h[i][j] = Hs[i][j].eval(x);
        } catch (const EvalError&) {
          return true;  // outside the expression's domain: no verdict here
        }
      }
    double m1 = h[0][0];
    if (m1 <= 1e-12) return false;
    double m2 = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if (m2 <= 1e-12) return false;
    if (n == 3) {
      double m3 = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) -
                  h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0]) +
                  h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
      if (m3 <= 1e-12) return false;
    }
    return true;
  };
  auto pd_on = [&](double t) {
    bool ok = true;
    sweep_grid(scan.scaled(t), per, [&](const std::array<double, 3>& x) {
      if (!pd_at(x)) {
        ok = false;
        return false;
      }
      return true;
    });
    return ok;
  };

  PdRegion out;
  if (pd_on(1.0)) {
    out.t = 1.0;
    out.box = scan;
    return out;
  }
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 40; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (pd_on(mid) ? lo : hi) = mid;
  }
  out.t = lo;
  out.box = scan.scaled(lo);
  return out;
}

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  j["system"] = system;
  j["overall"] = overall;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name},
                   {"mandatory", c.mandatory},
                   {"passed", c.passed},
                   {"detail", c.detail}});
  j["checks"] = arr;
  return j.dump(2);
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  out << "system: " << system << "\n";
  std::size_t w = 0;
  for (const auto& c : checks) w = std::max(w, c.name.size());
  for (const auto& c : checks) {
    out << "  " << c.name << std::string(w - c.name.size() + 2, ' ')
        << (c.passed ? "pass" : "FAIL") << "  " << (c.mandatory ? "[mandatory]" : "[info]     ")
        << "  " << c.detail << "\n";
  }
  out << "overall: " << overall << "\n";
  return out.str();
}

}  // namespace ioc
