#include "model/system.hpp"

#include <array>
#include <cmath>

namespace ioc {

std::string case_tag_name(CaseTag tag) {
  switch (tag) {
    case CaseTag::CaseI: return "I";
    case CaseTag::CaseIb: return "Ib";
    case CaseTag::CaseII: return "II";
    case CaseTag::CaseIII: return "III";
    case CaseTag::ThirdOrder: return "third";
    case CaseTag::Unsupported: return "unsupported";
  }
  return "?";
}

std::optional<CaseTag> case_tag_from_name(const std::string& name) {
  if (name == "I" || name == "i") return CaseTag::CaseI;
  if (name == "Ib" || name == "ib" || name == "IB") return CaseTag::CaseIb;
  if (name == "II" || name == "ii") return CaseTag::CaseII;
  if (name == "III" || name == "iii") return CaseTag::CaseIII;
  if (name == "third" || name == "3" || name == "THIRD") return CaseTag::ThirdOrder;
  return std::nullopt;
}

CaseTag cost_case(const CostSpec& cost) {
  if (std::holds_alternative<CostCaseI>(cost)) return CaseTag::CaseI;
  if (std::holds_alternative<CostCaseIb>(cost)) return CaseTag::CaseIb;
  if (std::holds_alternative<CostCaseII>(cost)) return CaseTag::CaseII;
  if (std::holds_alternative<CostCaseIII>(cost)) return CaseTag::CaseIII;
  return CaseTag::ThirdOrder;
}

namespace {

bool vanishes_at_origin(const Expr& e) {
  std::array<double, 3> zero{0.0, 0.0, 0.0};
  return std::fabs(e.eval(zero)) <= 1e-12;
}

}  // namespace

std::pair<Expr, Expr> split_f2(const SecondOrderSystem& sys) {
  Expr f2 = sys.f2.expanded();
  std::vector<Expr> free_terms, dep_terms;
  auto push = [&](const Expr& t) { (t.depends_on(2) ? dep_terms : free_terms).push_back(t); };
  if (f2.kind() == Expr::Kind::Add) {
    for (const auto& t : f2.operands()) push(t);
  } else {
    push(f2);
  }
  Expr f21 = Expr::add(std::move(free_terms));
  Expr f22 = Expr::add(std::move(dep_terms));
  if (!vanishes_at_origin(f22))
    throw ModelError("x2-dependent remainder of f2 does not vanish at the origin");
  return {f21, f22};
}

std::optional<AffinePair> extract_affine_x2(const SecondOrderSystem& sys) {
  auto m1 = match_affine(sys.f1, 2);
  auto m2 = match_affine(sys.f2, 2);
  if (!m1 || !m2) return std::nullopt;
  AffinePair p;
  p.g1 = m1->second;
  p.g2 = m1->first;
  p.g3 = m2->second;
  p.g4 = m2->first;
  return p;
}

std::optional<Case3Data> extract_case3(const SecondOrderSystem& sys) {
  auto m1 = match_affine(sys.f1, 1);
  if (!m1 || !m1->first.is_constant()) return std::nullopt;
  Case3Data out;
  out.a = m1->first.value();
  out.f = m1->second;
  if (out.f.depends_on(1) || identically_zero(out.f) || !vanishes_at_origin(out.f))
    return std::nullopt;

  auto m2 = match_affine(sys.f2, 1);
  if (!m2 || !m2->first.is_constant()) return std::nullopt;
  out.c = m2->first.value();
  Expr rest = m2->second;
  if (rest.depends_on(1)) return std::nullopt;
  if (identically_zero(rest)) {
    out.d = 0.0;
    return out;
  }
  // rest must be proportional to f; probe a few points for the ratio, then
  // confirm the identity symbolically
  double ratio = 0.0;
  bool found = false;
  for (double t : {0.7, 1.3, -0.9, 0.31, 2.1}) {
    std::array<double, 3> x{t, t, t};
    double fv;
    try {
      fv = out.f.eval(x);
    } catch (const EvalError&) {
      continue;
    }
    if (std::fabs(fv) > 1e-9) {
      ratio = rest.eval(x) / fv;
      found = true;
      break;
    }
  }
  if (!found) return std::nullopt;
  if (!identically_zero(rest - ratio * out.f)) return std::nullopt;
  out.d = ratio;
  return out;
}

std::set<CaseTag> classify(const SecondOrderSystem& sys) {
  std::set<CaseTag> tags;

  // Case I: f2 depends on x2 only and is not identically zero
  if (!sys.f2.depends_on(1) && !identically_zero(sys.f2)) tags.insert(CaseTag::CaseI);

  // Case Ib: f1 a function of x2 only; f2 = f21(x1) + f22(x1,x2) with a
  // nontrivial split on both parts
  if (!sys.f1.depends_on(1) && !identically_zero(sys.f1)) {
    try {
      auto [f21, f22] = split_f2(sys);
      if (!identically_zero(f21) && !identically_zero(f22)) tags.insert(CaseTag::CaseIb);
    } catch (const ModelError&) {
    }
  }

  // Case II: f1, f2 affine in x2 with g2 not identically zero and
  // g1(0) = g3(0) = 0 (so that f1(0) = f2(0) = 0)
  if (auto p = extract_affine_x2(sys)) {
    if (!identically_zero(p->g2) && vanishes_at_origin(p->g1) && vanishes_at_origin(p->g3))
      tags.insert(CaseTag::CaseII);
  }

  // Case III: f1 = a*x1 + f(x2), f2 = c*x1 + d*f(x2); the gain formulas
  // additionally need a = 0 to force c = 0
  if (auto c3 = extract_case3(sys)) {
    if (!(c3->a == 0.0 && c3->c != 0.0)) tags.insert(CaseTag::CaseIII);
  }

  return tags;
}

std::optional<CaseTag> pick_case(const std::set<CaseTag>& tags) {
  for (CaseTag t : {CaseTag::CaseIII, CaseTag::CaseII, CaseTag::CaseI, CaseTag::CaseIb})
    if (tags.count(t)) return t;
  return std::nullopt;
}

}  // namespace ioc
