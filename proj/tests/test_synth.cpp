#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "synth/synth.hpp"

using namespace ioc;

namespace {

const Domain kDom2 = Domain::cube(2, 2.0);
const Domain kDom3 = Domain::cube(3, 1.0);

SecondOrderSystem make2(const char* f1, const char* f2, double b = 1.0, double r = 1.0) {
  return SecondOrderSystem{parse(f1), parse(f2), b, r};
}

Problem wrap(const SecondOrderSystem& sys, const Domain& dom = kDom2) {
  Problem p;
  p.name = "test";
  p.system = sys;
  p.domain = dom;
  return p;
}

Problem wrap3(const ThirdOrderSystem& sys) {
  Problem p;
  p.name = "test3";
  p.system = sys;
  p.domain = kDom3;
  return p;
}

// grid agreement between a synthesized V and a hand-derived closed form
void check_V_matches(const ValueFunction& V, const Expr& expected, const Domain& dom,
                     double tol = 1e-10) {
  int per = dom.dim() == 2 ? 9 : 5;
  std::array<int, 3> idx{0, 0, 0};
  int total = 1;
  for (int i = 0; i < dom.dim(); ++i) total *= per;
  for (int t = 0; t < total; ++t) {
    std::array<double, 3> x{0, 0, 0};
    int rem = t;
    for (int i = 0; i < dom.dim(); ++i) {
      idx[i] = rem % per;
      rem /= per;
      x[i] = dom.bounds[i].lo + (dom.bounds[i].hi - dom.bounds[i].lo) * idx[i] / (per - 1);
    }
    double got = V.eval(x);
    double want = expected.eval(x);
    CHECK(std::fabs(got - want) <= tol * (1.0 + std::fabs(want)));
  }
}

void check_hjb_zero(const SynthesisResult& res, const Problem& p, double tol = 1e-8) {
  HamiltonianEvaluator H(res, p);
  std::mt19937 rng(31);
  for (int i = 0; i < 200; ++i) {
    std::array<double, 3> x{0, 0, 0};
    for (int k = 0; k < p.order(); ++k) {
      std::uniform_real_distribution<double> u(p.domain.bounds[k].lo, p.domain.bounds[k].hi);
      x[k] = u(rng);
    }
    double L = res.running_cost().eval(x);
    CHECK(std::fabs(H.residual(x)) <= tol * (1.0 + std::fabs(L)));
  }
}

const CheckStatus kFail = CheckStatus::Failed;

CheckStatus condition(const SynthesisResult& res, const std::string& name) {
  for (const auto& c : res.conditions)
    if (c.name == name) return c.status;
  FAIL("no condition named ", name);
  return CheckStatus::Unknown;
}

}  // namespace

TEST_CASE("stabilizing_root: frozen oracle values") {
  Expr x1 = Expr::variable(1), x2 = Expr::variable(2);

  SUBCASE("pure weight gives a linear gain") {
    Expr u = stabilizing_root(parse("0"), parse("4*x1^2"), 1.0, 1.0, 1, kDom2);
    CHECK(equivalent(u, parse("-2*x1")));
  }
  SUBCASE("stable drift with zero weight yields zero control") {
    Expr u = stabilizing_root(parse("-x1^3"), parse("0"), 1.0, 1.0, 1, kDom2);
    CHECK(u.is_zero());
  }
  SUBCASE("unstable linear drift") {
    // drift -x2 with weight x2^2: root (1 - sqrt(2))*x2
    Expr u = stabilizing_root(parse("-x2"), parse("x2^2"), 1.0, 1.0, 2, kDom2);
    CHECK(equivalent(u, (1.0 - std::sqrt(2.0)) * x2));
  }
  SUBCASE("square-root drift folds into a clean radical") {
    Expr u = stabilizing_root(parse("x2*sqrt(3*(1 + x2^2))"), parse("x2^2 + x2^4"), 1.0, 1.0, 2,
                              kDom2);
    Expr expected = (-(2.0 + std::sqrt(3.0))) * x2 * Expr::sqrt(1.0 + x2 * x2);
    CHECK(equivalent(u, expected));
    CHECK(u.is_smooth());
  }
  SUBCASE("even residual power keeps an explicit sign factor") {
    Expr u = stabilizing_root(parse("0"), parse("x1^4"), 1.0, 1.0, 1, kDom2);
    CHECK(equivalent(u, -1.0 * Expr::sign(x1) * x1 * x1));
  }
  SUBCASE("negative b flips the branch") {
    Expr u = stabilizing_root(parse("0"), parse("x1^2"), -1.0, 1.0, 1, kDom2);
    CHECK(equivalent(u, x1));
    // closed loop dx = b*u = -x1: stable
  }
  SUBCASE("negative weight is rejected") {
    CHECK_THROWS_AS(stabilizing_root(parse("0"), parse("-x1^2"), 1.0, 1.0, 1, kDom2),
                    SynthesisError);
  }
}

TEST_CASE("case I: square-root drift example") {
  auto sys = make2("-x1^3 - 2*x1*x2", "x2*sqrt(3*(1 + x2^2))");
  auto res = synthesize_case1(sys, parse("x1"), parse("x2^2 + x2^4"), kDom2);

  Expr x1 = Expr::variable(1), x2 = Expr::variable(2);
  CHECK(equivalent(res.u, (-(2.0 + std::sqrt(3.0))) * x2 * Expr::sqrt(1.0 + x2 * x2)));
  CHECK(equivalent(res.L_state, parse("x1^4 + 2*x1^2*x2 + x2^2 + x2^4")));

  // hand antiderivative: V = c*((1+x2^2)^(3/2) - 1) + x1^2/2, c = 2*(2+sqrt(3))/3
  CHECK_FALSE(res.V.closed_form());
  double c = 2.0 * (2.0 + std::sqrt(3.0)) / 3.0;
  Expr expected = c * ((1.0 + x2 * x2) * Expr::sqrt(1.0 + x2 * x2) - 1.0) + 0.5 * x1 * x1;
  check_V_matches(res.V, expected, kDom2);

  for (const auto& cond : res.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res, wrap(sys));
}

TEST_CASE("case I rejects structural violations") {
  CHECK_THROWS_WITH_AS(
      synthesize_case1(make2("x2", "-x1^3"), parse("x1"), parse("x2^2"), kDom2),
      "f2 not free of x1", SynthesisError);
  CHECK_THROWS_AS(synthesize_case1(make2("x2", "-x2"), parse("x1"), parse("0"), kDom2),
                  SynthesisError);  // Q2 identically zero
  CHECK_THROWS_AS(synthesize_case1(make2("x2", "-x2"), parse("x1"), parse("x1*x2^2"), kDom2),
                  SynthesisError);  // Q2 depends on x1
}

TEST_CASE("case Ib: coupled cubic example") {
  auto sys = make2("x2^3", "-x1^3 - x1^2*x2");
  auto res = synthesize_case1b(sys, -1.0, kDom2);

  CHECK(equivalent(res.u, parse("-x2^3")));
  CHECK(equivalent(res.L_state, parse("x2^6 + 2*x1^2*x2^4")));
  CHECK(res.V.closed_form());
  CHECK(equivalent(res.V.symbolic, parse("0.5*x1^4 + 0.5*x2^4")));
  for (const auto& cond : res.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res, wrap(sys));

  CHECK_THROWS_AS(synthesize_case1b(sys, 0.0, kDom2), SynthesisError);
  CHECK_THROWS_AS(synthesize_case1b(make2("x2^3", "-x2"), -1.0, kDom2), SynthesisError);
}

TEST_CASE("case II: mass-spring with cubic stiffness") {
  auto sys = make2("x2", "-x1^3");
  auto res = synthesize_case2(sys, parse("0"), 1.0, kDom2);
  CHECK(equivalent(res.u, parse("-x2")));
  CHECK(equivalent(res.L_state, parse("x2^2")));
  CHECK(equivalent(res.V.symbolic, parse("x2^2 + 0.5*x1^4")));
  CHECK(res.gains.at("k2") == doctest::Approx(1.0));
  for (const auto& cond : res.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res, wrap(sys));
}

TEST_CASE("case II: van der pol oscillator") {
  auto sys = make2("x2", "-x1 + 0.5*(1 - x1^2)*x2");
  auto res = synthesize_case2(sys, parse("0"), 1.0, kDom2);
  CHECK(equivalent(res.u, parse("-x2")));
  CHECK(equivalent(res.L_state, parse("x1^2*x2^2")));
  CHECK(equivalent(res.V.symbolic, parse("x1^2 + x2^2")));
  for (const auto& cond : res.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res, wrap(sys));
}

TEST_CASE("case II: strict-feedback system needs q2 >= 2*sqrt(q1)") {
  auto sys = make2("-x1^3 + x2", "0");
  auto res = synthesize_case2(sys, parse("x1^2"), 2.0, kDom2);
  double s2 = std::sqrt(2.0);
  Expr x1 = Expr::variable(1), x2 = Expr::variable(2);
  CHECK(equivalent(res.u, -1.0 * x1 - s2 * x2));
  CHECK(equivalent(res.L_state,
                   parse("x1^2") + 2.0 * s2 * parse("x1^4") + 2.0 * parse("x1^6")));
  CHECK(equivalent(res.V.symbolic,
                   2.0 * x1 * x2 + s2 * (x2 * x2 + x1 * x1) + 0.5 * parse("x1^4")));
  for (const auto& cond : res.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res, wrap(sys));

  // dropping q2 below the threshold breaks the x2^2 weight condition
  auto weak = synthesize_case2(sys, parse("x1^2"), 1.0, kDom2);
  CHECK(condition(weak, "x2_weight_nonneg") == kFail);
}

TEST_CASE("case III: double integrator") {
  auto sys = make2("x2", "0");
  auto res = synthesize_case3(sys, 1.0, 1.0, kDom2);
  CHECK(equivalent(res.u, parse("-x1 - 2*x2")));
  CHECK(equivalent(res.L_state, parse("(x1 + x2)^2 + x2^2")));
  CHECK(equivalent(res.V.symbolic, parse("(x1 + x2)^2 + x2^2")));
  for (const auto& cond : res.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res, wrap(sys));
}

TEST_CASE("case III: cubic velocity nonlinearity") {
  auto sys = make2("x2^3", "0");
  auto res = synthesize_case3(sys, 1.0, 1.0, kDom2);
  CHECK(equivalent(res.u, parse("-x1 - x2 - x2^3")));
  CHECK(equivalent(res.L_state, parse("(x1 + x2)^2 + x2^6")));
  CHECK(res.V.closed_form());
  CHECK(equivalent(res.V.symbolic, parse("(x1 + x2)^2 + 0.5*x2^4")));
  for (const auto& cond : res.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res, wrap(sys));
}

TEST_CASE("case III: heading dynamics with sine nonlinearity") {
  Domain dom = Domain::cube(2, 4.0);
  auto sys = make2("sin(x2)", "0");
  auto res = synthesize_case3(sys, 1.0, 1.0, dom);
  CHECK(equivalent(res.u, parse("-x1 - x2 - sin(x2)")));
  CHECK(equivalent(res.L_state, parse("(x1 + x2)^2 + sin(x2)^2")));
  check_V_matches(res.V, parse("(x1 + x2)^2 + 2 - 2*cos(x2)"), dom);
  for (const auto& cond : res.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res, wrap(sys, dom));
}

TEST_CASE("case III: linear combination forces q1 and can lose definiteness") {
  auto sys = make2("-x1 + x2", "x1 - x2");
  auto res = synthesize_case3(sys, 0.0, 1.0, kDom2);
  CHECK(res.gains.at("q1") == doctest::Approx(1.0));
  CHECK(res.gains.at("k1") == doctest::Approx(1.0));
  CHECK(res.gains.at("k") == doctest::Approx(0.0));
  CHECK(equivalent(res.u, parse("-x1 - x2")));
  CHECK(equivalent(res.L_state, parse("(x1 + x2)^2")));
  check_V_matches(res.V, parse("(x1 + x2)^2"), kDom2);
  // V vanishes along x1 = -x2: both definiteness claims must fail
  CHECK(condition(res, "lyapunov_claim") == kFail);
  CHECK(condition(res, "V_positive_definite") == kFail);
  check_hjb_zero(res, wrap(sys));

  // a conflicting requested q1 is overridden, not honored
  auto forced = synthesize_case3(sys, 5.0, 1.0, kDom2);
  CHECK(forced.gains.at("q1") == doctest::Approx(1.0));
  CHECK(condition(forced, "q1_consistent") == CheckStatus::Unknown);
}

TEST_CASE("case III rejects a = 0 with insufficient q1") {
  auto sys = make2("x2", "-x2");  // a=0, c=0, d=-1, f=x2
  CHECK_THROWS_AS(synthesize_case3(sys, 0.5, 1.0, kDom2), SynthesisError);  // q1 < q2*d^2
  auto ok = synthesize_case3(sys, 1.0, 1.0, kDom2);
  CHECK(ok.gains.at("k1") == doctest::Approx(1.0));
}

TEST_CASE("third order: sine coupling example") {
  ThirdOrderSystem sys{parse("sin(x2)"), parse("x3"), 0.0, 1.0, 1.0, 4.0, 1.0, 1.0};
  auto res = synthesize_third_order(sys, kDom3);
  CHECK(res.gains.at("k1") == doctest::Approx(1.0));
  CHECK(res.gains.at("k2") == doctest::Approx(2.0));
  CHECK(res.gains.at("k3") == doctest::Approx(1.0));
  CHECK(res.gains.at("k4") == doctest::Approx(1.0));  // d = 0 so k4 = k1/(b*k3)
  CHECK(res.gains.at("k5") == doctest::Approx(2.0));
  CHECK(equivalent(res.u, parse("-x1 - 2*x2 - 3*x3 - sin(x2)")));
  CHECK(equivalent(res.L_state,
                   parse("(x1 + 2*x2 + x3)^2 + (4 - 2*cos(x2))*x3^2 + sin(x2)^2")));
  check_V_matches(res.V,
                  parse("(x1 + 2*x2 + x3)^2 + 2*x3^2 + 2*x3*sin(x2) - 4*cos(x2) + 4"), kDom3);
  CHECK(res.local_claim);
  for (const auto& cond : res.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res, wrap3(sys));
}

TEST_CASE("third order: all-linear chain gives the frozen gain vector") {
  ThirdOrderSystem sys{parse("x2"), parse("x3"), 0.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  auto res = synthesize_third_order(sys, kDom3);
  CHECK(equivalent(res.u, parse("-x1 - 2*x2 - 2*x3")));
  check_hjb_zero(res, wrap3(sys), 1e-10);
  // unit weights sit below the k2^2 >= 2*k1*k3 threshold: the state cost
  // (x1+x2+x3)^2 + x2^2 - x3^2 is indefinite and the check must say so
  CHECK(condition(res, "state_cost_nonneg") == kFail);

  // raising q2 to 4 clears the threshold
  ThirdOrderSystem strong{parse("x2"), parse("x3"), 0.0, 1.0, 1.0, 4.0, 1.0, 1.0};
  auto res2 = synthesize_third_order(strong, kDom3);
  CHECK(equivalent(res2.u, parse("-x1 - 3*x2 - 3*x3")));
  for (const auto& cond : res2.conditions) CHECK(cond.status != kFail);
  check_hjb_zero(res2, wrap3(strong));
}

TEST_CASE("the synthesized control minimizes the Hamiltonian") {
  struct Entry {
    Problem p;
    SynthesisResult res;
  };
  std::vector<Entry> entries;
  {
    auto sys = make2("x2", "-x1 + 0.5*(1 - x1^2)*x2");
    entries.push_back({wrap(sys), synthesize_case2(sys, parse("0"), 1.0, kDom2)});
  }
  {
    auto sys = make2("sin(x2)", "0");
    Domain dom = Domain::cube(2, 4.0);
    entries.push_back({wrap(sys, dom), synthesize_case3(sys, 1.0, 1.0, dom)});
  }
  {
    ThirdOrderSystem sys{parse("sin(x2)"), parse("x3"), 0.0, 1.0, 1.0, 4.0, 1.0, 1.0};
    entries.push_back({wrap3(sys), synthesize_third_order(sys, kDom3)});
  }
  std::mt19937 rng(77);
  for (const auto& e : entries) {
    HamiltonianEvaluator H(e.res, e.p);
    for (int i = 0; i < 50; ++i) {
      std::array<double, 3> x{0, 0, 0};
      for (int k = 0; k < e.p.order(); ++k) {
        std::uniform_real_distribution<double> u(e.p.domain.bounds[k].lo,
                                                 e.p.domain.bounds[k].hi);
        x[k] = u(rng);
      }
      double ustar = e.res.u.eval(x);
      double base = H.hamiltonian(x, ustar);
      // H is quadratic in u, so H(u) - H(u*) = r*(u - u*)^2 exactly
      for (double delta : {-1.0, -0.1, 0.1, 1.0}) {
        double shifted = H.hamiltonian(x, ustar + delta);
        CHECK(shifted - base ==
              doctest::Approx(e.res.r * delta * delta).epsilon(1e-9).scale(1.0));
      }
      CHECK(std::fabs(H.stationarity(x)) <= 1e-8 * (1.0 + std::fabs(ustar)));
    }
  }
}

TEST_CASE("dispatch honors cost blocks, requests and classification") {
  Problem di;
  di.system = make2("x2", "0");
  di.domain = kDom2;

  SUBCASE("no cost block: classification picks case III with unit weights") {
    auto res = synthesize(di);
    CHECK(res.tag == CaseTag::CaseIII);
    CHECK(equivalent(res.u, parse("-x1 - 2*x2")));
  }
  SUBCASE("an explicit case request is honored") {
    auto res = synthesize(di, CaseTag::CaseIII);
    CHECK(res.tag == CaseTag::CaseIII);
    CHECK_THROWS_AS(synthesize(di, CaseTag::CaseI), SynthesisError);
    CHECK_THROWS_AS(synthesize(di, CaseTag::ThirdOrder), SynthesisError);
  }
  SUBCASE("cost block selects the case and must match a request") {
    di.cost = CostCaseII{parse("0"), 1.0};
    auto res = synthesize(di);
    CHECK(res.tag == CaseTag::CaseII);
    CHECK_THROWS_AS(synthesize(di, CaseTag::CaseIII), SynthesisError);
  }
  SUBCASE("case I without its cost block is an error") {
    Problem p;
    p.system = make2("-x1^3 - 2*x1*x2", "x2*sqrt(3*(1 + x2^2))");
    p.domain = kDom2;
    CHECK_THROWS_AS(synthesize(p, CaseTag::CaseI), SynthesisError);
  }
  SUBCASE("unclassifiable dynamics report no matching scheme") {
    Problem p;
    p.system = make2("x1*x2^2", "x1");  // f1(0) != 0 impossible here; f1 = x1*x2^2 vanishes
    p.domain = kDom2;
    CHECK_THROWS_AS(synthesize(p), SynthesisError);
  }
}

TEST_CASE("synthesis_to_json carries the full result") {
  auto sys = make2("x2", "-x1^3");
  auto res = synthesize_case2(sys, parse("0"), 1.0, kDom2);
  std::string j = synthesis_to_json(res);
  CHECK(j.find("\"case\": \"II\"") != std::string::npos);
  CHECK(j.find("-x2") != std::string::npos);
  CHECK(j.find("V_positive_definite") != std::string::npos);
}
