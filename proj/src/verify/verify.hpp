#pragma once

#include "sim/sim.hpp"

namespace ioc {

struct CheckResult {
  std::string name;
  bool mandatory = true;
  bool passed = true;
  std::string detail;
};

/// Outcome of the whole battery. A failed mandatory check makes the overall
/// verdict "fail"; a failed informational check alone gives "partial".
struct VerificationReport {
  std::string system;
  std::string overall;
  std::vector<CheckResult> checks;

  std::string to_json() const;
  std::string to_text() const;
};

struct VerifyConfig {
  int resolution = 0;  // grid points per axis; 0 picks 41 (2nd order) / 21 (3rd)
  int trajectories = 16;
  unsigned seed = 20260823u;
  double t_max = 20.0;
  double dt = 1e-3;
};

VerificationReport verify(const SynthesisResult& res, const Problem& p,
                          const VerifyConfig& cfg = {});

/// Largest scale t in (0, 1] such that the Hessian of V stays positive
/// definite on a grid over the scan box scaled by t (bisection on
/// proportional box growth).
struct PdRegion {
  double t = 0.0;
  Domain box;
};
PdRegion hessian_pd_region(const ValueFunction& V, const Domain& scan, int resolution = 0);

}  // namespace ioc
