#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "model/system.hpp"

namespace ioc {

/// Structural precondition of a synthesis theorem is violated.
struct SynthesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CheckStatus { VerifiedSymbolic, VerifiedSampled, Failed, Unknown };
std::string check_status_name(CheckStatus s);

struct Condition {
  std::string name;
  std::string description;
  CheckStatus status = CheckStatus::Unknown;
};

/// Value function: a symbolic part plus definite integrals from 0 in a
/// single variable each (the fallback when an antiderivative has no closed
/// form). The gradient is always symbolic because d/dx of the integral term
/// is the integrand itself.
struct ValueFunction {
  struct IntegralTerm {
    Expr integrand;  // univariate in `var`
    int var = 1;
    double coeff = 1.0;
  };
  Expr symbolic;
  std::vector<IntegralTerm> integral_terms;

  bool closed_form() const { return integral_terms.empty(); }
  double eval(std::span<const double> x) const;
  Expr partial(int var) const;
  std::string str() const;
};

struct SynthesisResult {
  CaseTag tag = CaseTag::Unsupported;
  int order = 2;
  Expr u;        // control law
  Expr L_state;  // state part Q(x) of the running cost
  ValueFunction V;
  double b = 1.0, r = 1.0;
  /// Positivity of V is only claimed near the origin (third-order scheme).
  bool local_claim = false;
  std::map<std::string, double> gains;
  std::vector<Condition> conditions;

  /// Full running cost L(x, u(x)) = Q(x) + r u(x)^2.
  Expr running_cost() const { return L_state + r * u * u; }
};

/// Stabilizing branch of Qpos - r w^2 - 2 b^-1 r w fdrift = 0, solved for w.
/// The square root has even powers of x_var factored out so the result is
/// sign-free whenever Qpos carries an x_var^2 factor.
Expr stabilizing_root(const Expr& fdrift, const Expr& Qpos, double b, double r, int var,
                      const Domain& domain);

SynthesisResult synthesize_case1(const SecondOrderSystem& sys, const Expr& g, const Expr& Q2,
                                 const Domain& domain);
SynthesisResult synthesize_case1b(const SecondOrderSystem& sys, double k, const Domain& domain);
SynthesisResult synthesize_case2(const SecondOrderSystem& sys, const Expr& Q1, double q2,
                                 const Domain& domain);
SynthesisResult synthesize_case3(const SecondOrderSystem& sys, double q1, double q2,
                                 const Domain& domain);
SynthesisResult synthesize_third_order(const ThirdOrderSystem& sys, const Domain& domain);

/// Dispatch on the problem's cost block / requested case / classification.
SynthesisResult synthesize(const Problem& p, std::optional<CaseTag> requested = {});

/// Pointwise Hamiltonian residual H(x, u(x), grad V(x)); zero in theory.
class HamiltonianEvaluator {
 public:
  HamiltonianEvaluator(const SynthesisResult& result, const Problem& p);
  double residual(std::span<const double> x) const;
  /// Hamiltonian with the control overridden (for minimizer checks).
  double hamiltonian(std::span<const double> x, double u) const;
  /// Stationarity defect V_{x_last} + 2 b^-1 r u at x.
  double stationarity(std::span<const double> x) const;

 private:
  const SynthesisResult* result_;
  std::vector<Expr> drift_;  // open-loop drift per state
  std::vector<Expr> grad_;
  Expr running_;
};

double hjb_residual(const SynthesisResult& result, const Problem& p, std::span<const double> x);

std::string synthesis_to_json(const SynthesisResult& result);

}  // namespace ioc
