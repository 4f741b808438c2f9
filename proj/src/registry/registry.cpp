#include "registry/registry.hpp"

#include <array>
#include <cmath>

#include "json.hpp"
#include "synth/synth.hpp"

namespace ioc {

namespace {

Problem make2(const std::string& name, const char* f1, const char* f2, CostSpec cost,
              double half_width = 2.0, double b = 1.0, double r = 1.0) {
  Problem p;
  p.name = name;
  p.system = SecondOrderSystem{parse(f1), parse(f2), b, r};
  p.cost = std::move(cost);
  p.domain = Domain::cube(2, half_width);
  return p;
}

std::vector<ExampleEntry> build_registry() {
  std::vector<ExampleEntry> v;

  v.push_back({"case1_sqrt",
               "x1-coupled drift with a square-root velocity term (case I)",
               make2("case1_sqrt", "-x1^3 - 2*x1*x2", "x2*sqrt(3*(1 + x2^2))",
                     CostCaseI{parse("x1"), parse("x2^2 + x2^4")}),
               "-(2 + sqrt(3))*x2*sqrt(1 + x2^2)",
               "2.4880338717125849*((1 + x2^2)*sqrt(1 + x2^2) - 1) + 0.5*x1^2",
               "x1^4 + 2*x1^2*x2 + (8 + 4*sqrt(3))*(x2^2 + x2^4)",
               "pass"});

  v.push_back({"case1b_cubic",
               "cubic velocity drive with coupled damping (case Ib)",
               make2("case1b_cubic", "x2^3", "-x1^3 - x1^2*x2", CostCaseIb{-1.0}),
               "-x2^3",
               "0.5*x1^4 + 0.5*x2^4",
               "2*x2^6 + 2*x1^2*x2^4",
               "pass"});

  v.push_back({"mass_spring",
               "mass with a cubic spring (case II)",
               make2("mass_spring", "x2", "-x1^3", CostCaseII{parse("0"), 1.0}),
               "-x2",
               "x2^2 + 0.5*x1^4",
               "2*x2^2",
               "pass"});

  v.push_back({"van_der_pol",
               "van der pol oscillator with nonlinear damping (case II)",
               make2("van_der_pol", "x2", "-x1 + 0.5*(1 - x1^2)*x2",
                     CostCaseII{parse("0"), 1.0}),
               "-x2",
               "x1^2 + x2^2",
               "x1^2*x2^2 + x2^2",
               "pass"});

  v.push_back({"strict_feedback",
               "strict-feedback chain with cubic stiffness (case II, q2 = 2)",
               make2("strict_feedback", "-x1^3 + x2", "0",
                     CostCaseII{parse("x1^2"), 2.0}),
               "-x1 - sqrt(2)*x2",
               "2*x1*x2 + sqrt(2)*(x1^2 + x2^2) + 0.5*x1^4",
               "2*x1^2 + 2*sqrt(2)*x1^4 + 2*x1^6 + 2*sqrt(2)*x1*x2 + 2*x2^2",
               "pass"});

  v.push_back({"double_integrator",
               "double integrator (case III, linear)",
               make2("double_integrator", "x2", "0", CostCaseIII{1.0, 1.0}),
               "-x1 - 2*x2",
               "(x1 + x2)^2 + x2^2",
               "(x1 + x2)^2 + x2^2 + (x1 + 2*x2)^2",
               "pass"});

  v.push_back({"linear_combination",
               "coupled linear pair sharing one mode; V is only semidefinite",
               make2("linear_combination", "-x1 + x2", "x1 - x2", CostCaseIII{0.0, 1.0}),
               "-x1 - x2",
               "(x1 + x2)^2",
               "2*(x1 + x2)^2",
               "partial"});

  v.push_back({"cubic_spring",
               "integrator driven by a cubic velocity nonlinearity (case III)",
               make2("cubic_spring", "x2^3", "0", CostCaseIII{1.0, 1.0}),
               "-x1 - x2 - x2^3",
               "(x1 + x2)^2 + 0.5*x2^4",
               "(x1 + x2)^2 + x2^6 + (x1 + x2 + x2^3)^2",
               "pass"});

  v.push_back({"unicycle",
               "heading dynamics with a sine nonlinearity; V is not radially unbounded",
               make2("unicycle", "sin(x2)", "0", CostCaseIII{1.0, 1.0}, 4.0),
               "-x1 - x2 - sin(x2)",
               "(x1 + x2)^2 + 2 - 2*cos(x2)",
               "(x1 + x2)^2 + sin(x2)^2 + (x1 + x2 + sin(x2))^2",
               "partial"});

  {
    Problem p;
    p.name = "unicycle_3rd";
    p.system = ThirdOrderSystem{parse("sin(x2)"), parse("x3"), 0.0, 1.0, 1.0, 4.0, 1.0, 1.0};
    p.cost = CostThirdOrder{};
    p.domain = Domain::cube(3, 1.0);
    v.push_back({"unicycle_3rd",
                 "third-order heading model with actuator lag; V locally positive definite",
                 std::move(p),
                 "-x1 - 2*x2 - 3*x3 - sin(x2)",
                 "(x1 + 2*x2 + x3)^2 + 2*x3^2 + 2*x3*sin(x2) - 4*cos(x2) + 4",
                 "(x1 + 2*x2 + x3)^2 + (4 - 2*cos(x2))*x3^2 + sin(x2)^2 + "
                 "(x1 + 2*x2 + 3*x3 + sin(x2))^2",
                 "pass"});
  }
  return v;
}

}  // namespace

const std::vector<ExampleEntry>& example_registry() {
  static const std::vector<ExampleEntry> registry = build_registry();
  return registry;
}

const ExampleEntry* find_example(const std::string& name) {
  for (const auto& e : example_registry())
    if (e.name == name) return &e;
  return nullptr;
}

bool grid_equal(const ValueFunction& actual, const Expr& expected, const Domain& dom,
                double tol) {
  int n = dom.dim();
  int per = n == 2 ? 9 : 5;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= per;
  for (int t = 0; t < total; ++t) {
    std::array<double, 3> x{0, 0, 0};
    int rem = t;
    for (int i = 0; i < n; ++i) {
      int idx = rem % per;
      rem /= per;
      x[i] = dom.bounds[i].lo + (dom.bounds[i].hi - dom.bounds[i].lo) * idx / (per - 1);
    }
    double a, b;
    try {
      a = actual.eval(x);
      b = expected.eval(x);
    } catch (const EvalError&) {
      continue;
    }
    if (std::fabs(a - b) > tol * (1.0 + std::fabs(b))) return false;
  }
  return true;
}

bool expr_matches(const Expr& actual, const std::string& expected, const Domain& dom) {
  Expr e = parse(expected);
  if (equivalent(actual, e)) return true;
  ValueFunction wrap;
  wrap.symbolic = actual;
  return grid_equal(wrap, e, dom);
}

std::vector<ExampleCheck> check_examples(bool with_verify) {
  std::vector<ExampleCheck> out;
  for (const auto& entry : example_registry()) {
    ExampleCheck chk;
    chk.name = entry.name;
    chk.expected_overall = entry.expected_overall;
    try {
      SynthesisResult res = synthesize(entry.problem);
      chk.actual_u = res.u.str();
      chk.actual_V = res.V.str();
      chk.actual_L = res.running_cost().str();
      chk.u_ok = expr_matches(res.u, entry.expected_u, entry.problem.domain);
      chk.L_ok = expr_matches(res.running_cost(), entry.expected_L, entry.problem.domain);
      Expr vexp = parse(entry.expected_V);
      chk.V_ok = res.V.closed_form()
                     ? expr_matches(res.V.symbolic, entry.expected_V, entry.problem.domain)
                     : grid_equal(res.V, vexp, entry.problem.domain);
      if (with_verify) {
        auto report = verify(res, entry.problem);
        chk.actual_overall = report.overall;
        chk.verify_ok = report.overall == entry.expected_overall;
      }
    } catch (const std::exception& e) {
      chk.error = e.what();
    }
    out.push_back(std::move(chk));
  }
  return out;
}

std::string examples_to_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : example_registry()) {
    nlohmann::json j;
    j["name"] = e.name;
    j["description"] = e.description;
    j["order"] = e.problem.order();
    if (e.problem.order() == 2) {
      j["f1"] = e.problem.second().f1.str();
      j["f2"] = e.problem.second().f2.str();
    } else {
      j["f"] = e.problem.third().f.str();
      j["g"] = e.problem.third().g.str();
    }
    j["case"] = case_tag_name(cost_case(*e.problem.cost));
    j["expected_u"] = e.expected_u;
    j["expected_V"] = e.expected_V;
    j["expected_L"] = e.expected_L;
    j["expected_overall"] = e.expected_overall;
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace ioc
