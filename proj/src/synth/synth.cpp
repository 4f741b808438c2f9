#include "synth/synth.hpp"

#include <array>
#include <cmath>
#include <random>

#include "json.hpp"

namespace ioc {

namespace {

constexpr unsigned kSampleSeed = 0x5eedu;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::array<double, 3> origin3() { return {0.0, 0.0, 0.0}; }

void require_origin(const Expr& e, const char* what) {
  auto z = origin3();
  if (std::fabs(e.eval(z)) > 1e-12)
    throw SynthesisError(std::string(what) + " must vanish at the origin");
}

/// Sampled non-negativity over the verification domain: a coarse grid plus
/// seeded random points. Points where the expression is undefined (square
/// root of a negative) are skipped.
CheckStatus sample_nonneg(const Expr& e, const Domain& dom, double margin = 1e-9) {
  if (e.is_constant())
    return e.value() >= -margin ? CheckStatus::VerifiedSymbolic : CheckStatus::Failed;
  int n = dom.dim();
  auto probe = [&](std::array<double, 3> x) -> bool {
    try {
      return e.eval(x) >= -margin;
    } catch (const EvalError&) {
      return true;
    }
  };
  int per = n == 2 ? 21 : 9;
  std::array<int, 3> idx{0, 0, 0};
  int total = 1;
  for (int i = 0; i < n; ++i) total *= per;
  for (int t = 0; t < total; ++t) {
    std::array<double, 3> x{0, 0, 0};
    int rem = t;
    for (int i = 0; i < n; ++i) {
      idx[i] = rem % per;
      rem /= per;
      const auto& b = dom.bounds[i];
      x[i] = b.lo + (b.hi - b.lo) * idx[i] / (per - 1);
    }
    if (!probe(x)) return CheckStatus::Failed;
  }
  std::mt19937 rng(kSampleSeed);
  for (int t = 0; t < 2000; ++t) {
    std::array<double, 3> x{0, 0, 0};
    for (int i = 0; i < n; ++i) {
      std::uniform_real_distribution<double> u(dom.bounds[i].lo, dom.bounds[i].hi);
      x[i] = u(rng);
    }
    if (!probe(x)) return CheckStatus::Failed;
  }
  return CheckStatus::VerifiedSampled;
}

CheckStatus sample_nonpos(const Expr& e, const Domain& dom, double margin = 1e-9) {
  return sample_nonneg(-1.0 * e, dom, margin);
}

/// Strict sign of a univariate expression away from zero of its variable.
CheckStatus sample_strict_1d(const Expr& e, const Domain& dom, int var, int want) {
  const auto& b = dom.bounds[var - 1];
  const int N = 801;
  double cut = 1e-6 * (b.hi - b.lo);
  for (int i = 0; i < N; ++i) {
    double t = b.lo + (b.hi - b.lo) * i / (N - 1);
    if (std::fabs(t) < cut) continue;
    std::array<double, 3> x{0, 0, 0};
    x[var - 1] = t;
    double v;
    try {
      v = e.eval(x);
    } catch (const EvalError&) {
      continue;
    }
    if (want > 0 ? v <= 0.0 : v >= 0.0) return CheckStatus::Failed;
  }
  return CheckStatus::VerifiedSampled;
}

/// Positive definiteness of V probed along rays: per-axis amplitudes taken
/// from the domain, a fan of directions, several radii. Catches degenerate
/// directions (e.g. V = (x1+x2)^2) that random sampling misses.
CheckStatus sample_pd(const ValueFunction& V, const Domain& dom, double scale) {
  int n = dom.dim();
  std::array<double, 3> amp{0, 0, 0};
  for (int i = 0; i < n; ++i)
    amp[i] = scale * std::min(-dom.bounds[i].lo, dom.bounds[i].hi);
  std::vector<std::array<double, 3>> dirs;
  if (n == 2) {
    for (int i = 0; i < 128; ++i) {
      double th = 2.0 * M_PI * i / 128.0;
      dirs.push_back({std::cos(th), std::sin(th), 0.0});
    }
  } else {
    std::mt19937 rng(kSampleSeed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 256; ++i) {
      std::array<double, 3> d{g(rng), g(rng), g(rng)};
      double nrm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
      if (nrm < 1e-6) continue;
      for (auto& c : d) c /= nrm;
      dirs.push_back(d);
    }
    for (int i = 0; i < n; ++i) {
      std::array<double, 3> d{0, 0, 0};
      d[i] = 1.0;
      dirs.push_back(d);
      d[i] = -1.0;
      dirs.push_back(d);
    }
  }
  for (const auto& d : dirs) {
    for (double rho : {0.01, 0.1, 0.5, 1.0}) {
      std::array<double, 3> x{0, 0, 0};
      double norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] = d[i] * amp[i] * rho;
        norm2 += x[i] * x[i];
      }
      if (norm2 < 1e-16) continue;
      double v;
      try {
        v = V.eval(x);
      } catch (const EvalError&) {
        continue;
      }
      if (v <= 1e-12) return CheckStatus::Failed;
    }
  }
  return CheckStatus::VerifiedSampled;
}

/// Append the definite integral coeff * int_0^{x_var} integrand, preferring
/// a closed form.
void add_definite_integral(ValueFunction& V, const Expr& integrand, int var, double coeff) {
  if (coeff == 0.0 || integrand.is_zero()) return;
  if (auto F = integrand.antiderivative(var)) {
    auto z = origin3();
    double F0 = F->eval(z);
    V.symbolic = V.symbolic + coeff * (*F - F0);
  } else {
    V.integral_terms.push_back({integrand, var, coeff});
  }
}

/// Degree of x_var as an exact power factor of one expanded term.
int term_degree(const Expr& t, int var) {
  switch (t.kind()) {
    case Expr::Kind::Variable:
      return t.var_index() == var ? 1 : 0;
    case Expr::Kind::Pow: {
      const Expr& base = t.operands()[0];
      if (base.kind() == Expr::Kind::Variable && base.var_index() == var && t.exponent() > 0)
        return t.exponent();
      return 0;
    }
    case Expr::Kind::Mul: {
      int d = 0;
      for (const auto& f : t.operands()) d += term_degree(f, var);
      return d;
    }
    default:
      return 0;
  }
}

/// Largest m with x_var^{2m} dividing every term of the expanded sum.
int even_power_factor(const Expr& expanded_sum, int var) {
  int p = -1;
  auto consider = [&](const Expr& t) {
    int d = term_degree(t, var);
    p = (p < 0) ? d : std::min(p, d);
  };
  if (expanded_sum.kind() == Expr::Kind::Add) {
    for (const auto& t : expanded_sum.operands()) consider(t);
  } else {
    consider(expanded_sum);
  }
  return p <= 0 ? 0 : p / 2;
}

void check_result_origin(const SynthesisResult& out) {
  auto z = origin3();
  if (std::fabs(out.u.eval(z)) > 1e-9)
    throw SynthesisError("synthesized control does not vanish at the origin");
  if (std::fabs(out.L_state.eval(z)) > 1e-9)
    throw SynthesisError("synthesized running cost does not vanish at the origin");
}

CheckStatus smoothness_status(const Expr& e) {
  return e.is_smooth() ? CheckStatus::VerifiedSymbolic : CheckStatus::Unknown;
}

}  // namespace

std::string check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::VerifiedSymbolic: return "verified-symbolic";
    case CheckStatus::VerifiedSampled: return "verified-sampled";
    case CheckStatus::Failed: return "failed";
    case CheckStatus::Unknown: return "unknown";
  }
  return "?";
}

double ValueFunction::eval(std::span<const double> x) const {
  double v = symbolic.eval(x);
  for (const auto& t : integral_terms) {
    double hi = x[t.var - 1];
    if (hi == 0.0) continue;
    v += t.coeff * quadrature(t.integrand, t.var, 0.0, hi, 1e-12);
  }
  return v;
}

Expr ValueFunction::partial(int var) const {
  Expr d = symbolic.diff(var);
  for (const auto& t : integral_terms)
    if (t.var == var) d = d + t.coeff * t.integrand;
  return d;
}

std::string ValueFunction::str() const {
  std::string s = symbolic.str();
  for (const auto& t : integral_terms) {
    std::string v = "x" + std::to_string(t.var);
    s += " + " + format_real(t.coeff) + "*int_0^" + v + "(" + t.integrand.str() + ")";
  }
  return s;
}

Expr stabilizing_root(const Expr& fdrift, const Expr& Qpos, double b, double r, int var,
                      const Domain& domain) {
  if (b == 0.0) throw SynthesisError("input gain b must be nonzero");
  if (r <= 0.0) throw SynthesisError("input weight r must be positive");
  if (sample_nonneg(Qpos, domain, 1e-9) == CheckStatus::Failed)
    throw SynthesisError("state weight under the square root must be non-negative");

  Expr radicand = ((1.0 / (b * b)) * fdrift * fdrift + (1.0 / r) * Qpos).expanded();
  Expr drift_part = (-1.0 / b) * fdrift;
  if (radicand.is_zero()) return drift_part;

  Expr xv = Expr::variable(var);
  int m = even_power_factor(radicand, var);
  Expr root_part;
  if (m > 0) {
    Expr reduced = (radicand * Expr::pow(xv, -2 * m)).expanded();
    Expr root = Expr::sqrt(reduced);
    Expr xm = Expr::pow(xv, m);
    if (m % 2 == 1) {
      root_part = sgn(b) * xm * root;
    } else {
      root_part = sgn(b) * Expr::sign(xv) * xm * root;
    }
  } else {
    root_part = Expr::sign(b * xv) * Expr::sqrt(radicand);
  }
  return drift_part - root_part;
}

SynthesisResult synthesize_case1(const SecondOrderSystem& sys, const Expr& g, const Expr& Q2,
                                 const Domain& domain) {
  if (sys.f2.depends_on(1)) throw SynthesisError("f2 not free of x1");
  if (identically_zero(sys.f2)) throw SynthesisError("f2 must not be identically zero");
  if (Q2.depends_on(1)) throw SynthesisError("Q2 must depend on x2 only");
  if (g.depends_on(2)) throw SynthesisError("g must depend on x1 only");
  if (identically_zero(Q2)) throw SynthesisError("Q2 must not be identically zero");
  require_origin(Q2, "Q2");
  require_origin(g, "g");

  SynthesisResult out;
  out.tag = CaseTag::CaseI;
  out.order = 2;
  out.b = sys.b;
  out.r = sys.r;

  Expr u2 = stabilizing_root(sys.f2, Q2, sys.b, sys.r, 2, domain);
  out.u = u2;
  out.L_state = ((-1.0) * g * sys.f1 + Q2).expanded();
  add_definite_integral(out.V, u2, 2, -2.0 * sys.r / sys.b);
  add_definite_integral(out.V, g, 1, 1.0);

  out.conditions = {
      {"Q2_nonneg", "Q2(x2) >= 0 on the domain", sample_nonneg(Q2, domain)},
      {"state_cost_nonneg", "-g*f1 + Q2 >= 0 on the domain", sample_nonneg(out.L_state, domain)},
      {"g_strictly_increasing", "g'(x1) > 0 away from x1 = 0",
       sample_strict_1d(g.diff(1), domain, 1, +1)},
      {"u2_strictly_decreasing", "u2'(x2) < 0 away from x2 = 0",
       sample_strict_1d(u2.diff(2), domain, 2, -1)},
      {"u2_smooth", "control law has no sign/abs kinks", smoothness_status(u2)},
  };
  check_result_origin(out);
  return out;
}

SynthesisResult synthesize_case1b(const SecondOrderSystem& sys, double k, const Domain& domain) {
  if (sys.f1.depends_on(1)) throw SynthesisError("f1 must depend on x2 only");
  if (identically_zero(sys.f1)) throw SynthesisError("f1 must not be identically zero");
  if (k == 0.0) throw SynthesisError("feedback scale k must be nonzero");
  auto [f21, f22] = split_f2(sys);
  if (identically_zero(f21)) throw SynthesisError("f2 must contain an x2-free part");

  SynthesisResult out;
  out.tag = CaseTag::CaseIb;
  out.order = 2;
  out.b = sys.b;
  out.r = sys.r;
  out.gains["k"] = k;

  double b = sys.b, r = sys.r;
  out.u = k * sys.f1;
  out.L_state = (r * k * k * sys.f1 * sys.f1 + (2.0 * r * k / b) * sys.f1 * f22).expanded();
  add_definite_integral(out.V, sys.f1, 2, -2.0 * r * k / b);
  add_definite_integral(out.V, f21, 1, 2.0 * r * k / b);

  out.conditions = {
      {"coupling_nonneg", "k*f1*f22/b >= 0 on the domain",
       sample_nonneg((k / b) * sys.f1 * f22, domain)},
      {"kf1_strictly_decreasing", "(k/b)*f1'(x2) < 0 away from x2 = 0",
       sample_strict_1d((k / b) * sys.f1.diff(2), domain, 2, -1)},
      {"kf21_strictly_increasing", "(k/b)*f21'(x1) > 0 away from x1 = 0",
       sample_strict_1d((k / b) * f21.diff(1), domain, 1, +1)},
  };
  check_result_origin(out);
  return out;
}

SynthesisResult synthesize_case2(const SecondOrderSystem& sys, const Expr& Q1, double q2,
                                 const Domain& domain) {
  auto ap = extract_affine_x2(sys);
  if (!ap) throw SynthesisError("f1 and f2 must be affine in x2");
  if (identically_zero(ap->g2))
    throw SynthesisError("the x2 coefficient of f1 must not vanish identically");
  require_origin(ap->g1, "the x2-free part of f1");
  require_origin(ap->g3, "the x2-free part of f2");
  if (Q1.depends_on(2)) throw SynthesisError("Q1 must depend on x1 only");
  if (q2 <= 0.0) throw SynthesisError("q2 must be positive");
  require_origin(Q1, "Q1");

  SynthesisResult out;
  out.tag = CaseTag::CaseII;
  out.order = 2;
  out.b = sys.b;
  out.r = sys.r;

  double b = sys.b, r = sys.r;
  double k2 = sgn(b) * std::sqrt(q2 / r);
  out.gains["k2"] = k2;

  Expr x2 = Expr::variable(2);
  Expr u1 = stabilizing_root(ap->g3, Q1, b, r, 1, domain);
  Expr u1p = u1.diff(1);
  out.u = u1 - k2 * x2;

  Expr g2inv = Expr::pow(ap->g2, -1);
  Expr hp = g2inv * ((-2.0 * r * k2) * (u1 + (1.0 / b) * ap->g3) +
                     (2.0 * r / b) * (u1 * ap->g4 + u1p * ap->g1));
  if (hp.depends_on(2))
    throw SynthesisError("cross-term slope depends on x2; the scheme does not apply");

  out.L_state = (Q1 + q2 * x2 * x2 + (2.0 * r / b) * (u1p * ap->g2 - k2 * ap->g4) * x2 * x2 -
                 hp * ap->g1)
                    .expanded();
  out.V.symbolic = (r / b) * (-2.0 * u1 * x2 + k2 * x2 * x2);
  add_definite_integral(out.V, g2inv * (u1 + (1.0 / b) * ap->g3), 1, -2.0 * r * k2);
  add_definite_integral(out.V, g2inv * (u1 * ap->g4 + u1p * ap->g1), 1, 2.0 * r / b);

  out.conditions = {
      {"Q1_nonneg", "Q1(x1) >= 0 on the domain", sample_nonneg(Q1, domain)},
      {"x2_weight_nonneg", "k2^2 + (2/b)*(u1'*g2 - k2*g4) >= 0 on the domain",
       sample_nonneg(k2 * k2 + (2.0 / b) * (u1p * ap->g2 - k2 * ap->g4), domain)},
      {"hprime_g1_nonpos", "h'(x1)*g1(x1) <= 0 on the domain",
       sample_nonpos(hp * ap->g1, domain)},
      {"u1_smooth", "inner control law has no sign/abs kinks", smoothness_status(u1)},
      {"V_positive_definite", "V > 0 away from the origin (ray sampling)",
       sample_pd(out.V, domain, 1.0)},
  };
  check_result_origin(out);
  return out;
}

SynthesisResult synthesize_case3(const SecondOrderSystem& sys, double q1, double q2,
                                 const Domain& domain) {
  auto c3 = extract_case3(sys);
  if (!c3)
    throw SynthesisError("dynamics are not affine in x1 with a shared scalar nonlinearity");
  if (c3->a == 0.0 && c3->c != 0.0)
    throw SynthesisError("a zero x1 coefficient in f1 requires a zero x1 coefficient in f2");
  if (q2 <= 0.0) throw SynthesisError("q2 must be positive");

  double b = sys.b, r = sys.r;
  double a = c3->a, c = c3->c, d = c3->d;
  Condition q1c{"q1_consistent", "", CheckStatus::VerifiedSymbolic};
  double q1_eff = q1;
  if (a != 0.0) {
    q1_eff = q2 * c * c / (a * a) + 2.0 * r * c * (a * d - c) / (b * b);
    if (q1 > 0.0 && std::fabs(q1 - q1_eff) > 1e-9 * (1.0 + std::fabs(q1_eff))) {
      q1c.status = CheckStatus::Unknown;
      q1c.description =
          "requested q1 = " + format_real(q1) + " overridden: the structure forces q1 = " +
          format_real(q1_eff);
    } else {
      q1c.description = "q1 = " + format_real(q1_eff) + " fixed by the system structure";
    }
  } else {
    if (q1_eff < 0.0) throw SynthesisError("q1 must be non-negative");
    if (q1_eff < q2 * d * d - 1e-12)
      throw SynthesisError("q1 must be at least q2*d^2 when f1 has no x1 term");
    q1c.description = "q1 admissible: q1 >= q2*d^2";
  }
  if (q1_eff < 0.0)
    throw SynthesisError("derived q1 is negative; the structural conditions fail");

  SynthesisResult out;
  out.tag = CaseTag::CaseIII;
  out.order = 2;
  out.b = b;
  out.r = r;

  double k2 = std::sqrt(q2 / r);
  double k1 = (a != 0.0) ? -c / a * k2 : std::sqrt(q1_eff / r);
  double k = (d + k1 / k2) / b;
  out.gains = {{"k1", k1}, {"k2", k2}, {"k", k}, {"q1", q1_eff}, {"q2", q2}};

  Expr x1 = Expr::variable(1), x2 = Expr::variable(2);
  const Expr& f = c3->f;
  out.u = (-k1) * x1 - k2 * x2 - k * f;
  out.L_state = (q1_eff * x1 * x1 + q2 * x2 * x2 + 2.0 * r * k1 * k2 * x1 * x2 +
                 (r / (b * b)) * (k1 * k1 / (k2 * k2) - d * d) * f * f)
                    .expanded();
  out.V.symbolic = (-r * k * c / b) * x1 * x1 +
                   (r / b) * Expr::pow((k1 / std::sqrt(k2)) * x1 + std::sqrt(k2) * x2, 2);
  add_definite_integral(out.V, f, 2, 2.0 * r * k / b);

  Condition lyap{"lyapunov_claim", "b > 0, k*c <= 0 and k*int_0^x2(f) locally positive definite",
                 CheckStatus::VerifiedSampled};
  if (b <= 0.0 || k * c > 1e-12 || k == 0.0) {
    lyap.status = CheckStatus::Failed;
    if (k == 0.0) lyap.description += " (k = 0: the integral term vanishes)";
  } else {
    double amp = std::min(-domain.bounds[1].lo, domain.bounds[1].hi);
    for (double t : {-1.0, -0.5, -0.1, -0.01, 0.01, 0.1, 0.5, 1.0}) {
      double phi;
      try {
        phi = k * quadrature(f, 2, 0.0, t * amp, 1e-12);
      } catch (const EvalError&) {
        continue;
      }
      if (phi <= 0.0) {
        lyap.status = CheckStatus::Failed;
        break;
      }
    }
  }

  out.conditions = {
      {"c_ad_minus_c_nonneg", "c*(a*d - c) >= 0",
       c * (a * d - c) >= -1e-12 ? CheckStatus::VerifiedSymbolic : CheckStatus::Failed},
      {"c_sq_ge_a_sq_d_sq", "c^2 >= a^2*d^2",
       c * c >= a * a * d * d - 1e-12 ? CheckStatus::VerifiedSymbolic : CheckStatus::Failed},
      q1c,
      {"state_cost_nonneg", "state part of the running cost >= 0 on the domain",
       sample_nonneg(out.L_state, domain)},
      lyap,
      {"V_positive_definite", "V > 0 away from the origin (ray sampling)",
       sample_pd(out.V, domain, 1.0)},
  };
  check_result_origin(out);
  return out;
}

SynthesisResult synthesize_third_order(const ThirdOrderSystem& sys, const Domain& domain) {
  double b = sys.b, r = sys.r;
  if (b == 0.0) throw SynthesisError("input gain b must be nonzero");
  if (r <= 0.0 || sys.q3 <= 0.0) throw SynthesisError("r and q3 must be positive");
  if (sys.q1 < 0.0 || sys.q2 < 0.0) throw SynthesisError("q1 and q2 must be non-negative");
  if (sys.f.depends_on(1) || sys.f.depends_on(3))
    throw SynthesisError("f must depend on x2 only");
  if (sys.g.depends_on(1) || sys.g.depends_on(2))
    throw SynthesisError("g must depend on x3 only");
  require_origin(sys.f, "f");
  require_origin(sys.g, "g");

  SynthesisResult out;
  out.tag = CaseTag::ThirdOrder;
  out.order = 3;
  out.b = b;
  out.r = r;
  out.local_claim = true;

  double k1 = std::sqrt(sys.q1 / r);
  double k2 = std::sqrt(sys.q2 / r);
  double k3 = std::sqrt(sys.q3 / r);
  double k4 = (k1 + sys.d * k2) / (b * k3);
  double k5 = k2 / (b * k3);
  out.gains = {{"k1", k1}, {"k2", k2}, {"k3", k3}, {"k4", k4}, {"k5", k5}};

  Expr x1 = Expr::variable(1), x2 = Expr::variable(2), x3 = Expr::variable(3);
  const Expr& f = sys.f;
  const Expr& g = sys.g;
  Expr fp = f.diff(2);

  out.u = (-k1) * x1 - k2 * x2 - k3 * x3 - k4 * f - k5 * g;
  out.L_state = (sys.q1 * x1 * x1 + sys.q2 * x2 * x2 + sys.q3 * x3 * x3 +
                 2.0 * r * k1 * k2 * x1 * x2 + 2.0 * r * k1 * k3 * x1 * x3 +
                 2.0 * r * k2 * k3 * x2 * x3 + r * (k4 * k4 - 2.0 * sys.d * k4 * k5) * f * f +
                 r * k5 * k5 * g * g - (2.0 * r / b) * k4 * fp * x3 * (sys.d * f + g))
                    .expanded();
  out.V.symbolic =
      (r / b) * Expr::pow((k1 / std::sqrt(k3)) * x1 + (k2 / std::sqrt(k3)) * x2 +
                              std::sqrt(k3) * x3,
                          2) +
      (2.0 * r / b) * k4 * x3 * f;
  add_definite_integral(out.V, f, 2, 2.0 * r * k4 * k5);
  add_definite_integral(out.V, g, 3, 2.0 * r * k5 / b);

  out.conditions = {
      {"state_cost_nonneg", "state part of the running cost >= 0 on the domain",
       sample_nonneg(out.L_state, domain)},
      {"V_locally_pd", "V > 0 away from the origin on the 0.1-scaled domain",
       sample_pd(out.V, domain, 0.1)},
  };
  check_result_origin(out);
  return out;
}

SynthesisResult synthesize(const Problem& p, std::optional<CaseTag> requested) {
  if (p.order() == 3) {
    if (requested && *requested != CaseTag::ThirdOrder)
      throw SynthesisError("third-order systems use the third-order scheme (case 'third')");
    return synthesize_third_order(p.third(), p.domain);
  }
  const auto& sys = p.second();

  CaseTag tag;
  if (requested) {
    if (*requested == CaseTag::ThirdOrder)
      throw SynthesisError("case 'third' needs a third-order system");
    tag = *requested;
    if (p.cost && cost_case(*p.cost) != tag)
      throw SynthesisError("cost block is for case " + case_tag_name(cost_case(*p.cost)) +
                           ", not case " + case_tag_name(tag));
  } else if (p.cost) {
    tag = cost_case(*p.cost);
  } else {
    auto picked = pick_case(classify(sys));
    if (!picked) throw SynthesisError("system does not match any synthesis case");
    tag = *picked;
  }

  switch (tag) {
    case CaseTag::CaseI: {
      if (!p.cost || !std::holds_alternative<CostCaseI>(*p.cost))
        throw SynthesisError("case I needs a cost block with g and Q2");
      const auto& c = std::get<CostCaseI>(*p.cost);
      return synthesize_case1(sys, c.g, c.Q2, p.domain);
    }
    case CaseTag::CaseIb: {
      if (!p.cost || !std::holds_alternative<CostCaseIb>(*p.cost))
        throw SynthesisError("case Ib needs a cost block with the scale k");
      return synthesize_case1b(sys, std::get<CostCaseIb>(*p.cost).k, p.domain);
    }
    case CaseTag::CaseII: {
      if (!p.cost || !std::holds_alternative<CostCaseII>(*p.cost))
        throw SynthesisError("case II needs a cost block with Q1 and q2");
      const auto& c = std::get<CostCaseII>(*p.cost);
      return synthesize_case2(sys, c.Q1, c.q2, p.domain);
    }
    case CaseTag::CaseIII: {
      double q1 = 1.0, q2 = 1.0;
      if (p.cost) {
        if (!std::holds_alternative<CostCaseIII>(*p.cost))
          throw SynthesisError("case III needs a cost block with q1 and q2");
        q1 = std::get<CostCaseIII>(*p.cost).q1;
        q2 = std::get<CostCaseIII>(*p.cost).q2;
      }
      return synthesize_case3(sys, q1, q2, p.domain);
    }
    default:
      throw SynthesisError("unsupported case tag");
  }
}

HamiltonianEvaluator::HamiltonianEvaluator(const SynthesisResult& result, const Problem& p)
    : result_(&result) {
  if (p.order() == 2) {
    drift_ = {p.second().f1, p.second().f2};
  } else {
    const auto& s = p.third();
    drift_ = {s.f, s.d * s.f + s.g, Expr()};
  }
  for (int i = 1; i <= p.order(); ++i) grad_.push_back(result.V.partial(i));
  running_ = result.L_state;
}

double HamiltonianEvaluator::hamiltonian(std::span<const double> x, double u) const {
  double h = running_.eval(x) + result_->r * u * u;
  for (std::size_t i = 0; i < drift_.size(); ++i) {
    if (drift_[i].is_zero()) continue;
    h += grad_[i].eval(x) * drift_[i].eval(x);
  }
  h += grad_.back().eval(x) * result_->b * u;
  return h;
}

double HamiltonianEvaluator::residual(std::span<const double> x) const {
  return hamiltonian(x, result_->u.eval(x));
}

double HamiltonianEvaluator::stationarity(std::span<const double> x) const {
  return grad_.back().eval(x) + 2.0 * result_->r / result_->b * result_->u.eval(x);
}

double hjb_residual(const SynthesisResult& result, const Problem& p,
                    std::span<const double> x) {
  return HamiltonianEvaluator(result, p).residual(x);
}

std::string synthesis_to_json(const SynthesisResult& result) {
  nlohmann::json j;
  j["case"] = case_tag_name(result.tag);
  j["order"] = result.order;
  j["u"] = result.u.str();
  j["V"] = result.V.str();
  j["V_closed_form"] = result.V.closed_form();
  j["L_state"] = result.L_state.str();
  j["L"] = result.running_cost().str();
  j["b"] = result.b;
  j["r"] = result.r;
  j["local_claim"] = result.local_claim;
  nlohmann::json gains = nlohmann::json::object();
  for (const auto& [name, v] : result.gains) gains[name] = v;
  j["gains"] = gains;
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : result.conditions)
    conds.push_back({{"name", c.name},
                     {"description", c.description},
                     {"status", check_status_name(c.status)}});
  j["conditions"] = conds;
  return j.dump(2);
}

}  // namespace ioc
