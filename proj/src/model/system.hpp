#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "expr/expr.hpp"

namespace ioc {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed per-variable interval bounds for sampling and grids.
struct Domain {
  struct Interval {
    double lo, hi;
  };
  std::vector<Interval> bounds;

  static Domain cube(int dim, double half_width) {
    Domain d;
    for (int i = 0; i < dim; ++i) d.bounds.push_back({-half_width, half_width});
    return d;
  }
  int dim() const { return static_cast<int>(bounds.size()); }
  bool contains_origin() const {
    for (const auto& b : bounds)
      if (b.lo > 0.0 || b.hi < 0.0) return false;
    return true;
  }
  Domain scaled(double factor) const {
    Domain d = *this;
    for (auto& b : d.bounds) {
      b.lo *= factor;
      b.hi *= factor;
    }
    return d;
  }
};

/// dx1 = f1(x1,x2), dx2 = f2(x1,x2) + b*u with input weight r.
struct SecondOrderSystem {
  Expr f1, f2;
  double b = 1.0;
  double r = 1.0;
};

/// dx1 = f(x2), dx2 = d*f(x2) + g(x3), dx3 = b*u, with quadratic state
/// weights q1..q3 and input weight r.
struct ThirdOrderSystem {
  Expr f, g;
  double d = 0.0;
  double b = 1.0;
  double q1 = 1.0, q2 = 1.0, q3 = 1.0;
  double r = 1.0;
};

enum class CaseTag { CaseI, CaseIb, CaseII, CaseIII, ThirdOrder, Unsupported };

std::string case_tag_name(CaseTag tag);
std::optional<CaseTag> case_tag_from_name(const std::string& name);

struct CostCaseI {
  Expr g, Q2;
};
struct CostCaseIb {
  double k = -1.0;
};
struct CostCaseII {
  Expr Q1;
  double q2 = 1.0;
};
struct CostCaseIII {
  double q1 = 1.0, q2 = 1.0;
};
struct CostThirdOrder {};  // weights live in ThirdOrderSystem

using CostSpec = std::variant<CostCaseI, CostCaseIb, CostCaseII, CostCaseIII, CostThirdOrder>;

CaseTag cost_case(const CostSpec& cost);

/// One optimal-control problem instance as read from a system file or the
/// example registry.
struct Problem {
  std::string name;
  std::variant<SecondOrderSystem, ThirdOrderSystem> system;
  std::optional<CostSpec> cost;
  Domain domain;  // verification region; defaulted when absent

  int order() const { return std::holds_alternative<SecondOrderSystem>(system) ? 2 : 3; }
  const SecondOrderSystem& second() const { return std::get<SecondOrderSystem>(system); }
  const ThirdOrderSystem& third() const { return std::get<ThirdOrderSystem>(system); }
};

/// Structural classification: every tag whose hypotheses hold symbolically.
std::set<CaseTag> classify(const SecondOrderSystem& sys);

/// Ranked choice among classified tags (most specific gain formulas first).
std::optional<CaseTag> pick_case(const std::set<CaseTag>& tags);

/// f2 = f21(x1) + f22(x1,x2) with f21 collecting the x2-free terms.
/// Throws ModelError when the x2-dependent remainder has f22(0,0) != 0.
std::pair<Expr, Expr> split_f2(const SecondOrderSystem& sys);

struct AffinePair {
  // f1 = g1 + g2*x2, f2 = g3 + g4*x2
  Expr g1, g2, g3, g4;
};
std::optional<AffinePair> extract_affine_x2(const SecondOrderSystem& sys);

struct Case3Data {
  double a = 0.0, c = 0.0, d = 0.0;
  Expr f;
};
/// f1 = a*x1 + f(x2), f2 = c*x1 + d*f(x2); nullopt when the identities fail.
std::optional<Case3Data> extract_case3(const SecondOrderSystem& sys);

/// Load a problem from TOML or JSON text (format auto-detected) or a file.
Problem load_problem(const std::string& text);
Problem load_problem_file(const std::string& path);
std::string problem_to_json(const Problem& p);

}  // namespace ioc
