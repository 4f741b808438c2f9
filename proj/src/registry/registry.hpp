#pragma once

#include "verify/verify.hpp"

namespace ioc {

/// Worked example with frozen expected results. Expected expressions are
/// stored in the text grammar; V is compared on a grid when the synthesized
/// value function keeps a quadrature term.
struct ExampleEntry {
  std::string name;
  std::string description;
  Problem problem;
  std::string expected_u;
  std::string expected_V;
  std::string expected_L;  // full running cost including r*u^2
  std::string expected_overall;
};

const std::vector<ExampleEntry>& example_registry();
const ExampleEntry* find_example(const std::string& name);

struct ExampleCheck {
  std::string name;
  bool u_ok = false, V_ok = false, L_ok = false, verify_ok = true;
  std::string expected_overall, actual_overall;
  std::string actual_u, actual_V, actual_L;  // for mismatch diffs
  std::string error;                         // synthesis failure, if any

  bool ok() const { return u_ok && V_ok && L_ok && verify_ok && error.empty(); }
};

/// Reproduce every entry and compare against the frozen expectations.
/// with_verify additionally runs the full verification battery and compares
/// the overall verdict.
std::vector<ExampleCheck> check_examples(bool with_verify = true);

std::string examples_to_json();

/// Grid agreement of two expressions over a domain (relative 1e-10); used as
/// the fallback when canonical equivalence cannot decide.
bool grid_equal(const ValueFunction& actual, const Expr& expected, const Domain& dom,
                double tol = 1e-10);
bool expr_matches(const Expr& actual, const std::string& expected, const Domain& dom);

}  // namespace ioc
