#include "expr/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace ioc {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  int var = 0;
  int exp = 0;
  std::vector<Expr> kids;
};

namespace {

using Kind = Expr::Kind;

int kind_rank(Kind k) { return static_cast<int>(k); }

std::shared_ptr<const Expr::Node> make_node(Expr::Node n) {
  return std::make_shared<const Expr::Node>(std::move(n));
}

}  // namespace

Expr::Expr() : node_(make_node(Node{})) {}

Expr Expr::constant(double v) {
  Node n;
  n.kind = Kind::Constant;
  n.value = v == 0.0 ? 0.0 : v;  // normalize -0.0
  return Expr(make_node(std::move(n)));
}

Expr Expr::variable(int index) {
  if (index < 1 || index > 3) throw std::invalid_argument("state index out of range");
  Node n;
  n.kind = Kind::Variable;
  n.var = index;
  return Expr(make_node(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::var_index() const { return node_->var; }
int Expr::exponent() const { return node_->exp; }
const std::vector<Expr>& Expr::operands() const { return node_->kids; }

bool Expr::is_zero() const { return kind() == Kind::Constant && value() == 0.0; }
bool Expr::is_one() const { return kind() == Kind::Constant && value() == 1.0; }

int Expr::compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind()) return kind_rank(a.kind()) < kind_rank(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case Kind::Constant:
      if (a.value() < b.value()) return -1;
      if (a.value() > b.value()) return 1;
      return 0;
    case Kind::Variable:
      return a.var_index() - b.var_index();
    case Kind::Pow: {
      int c = compare(a.operands()[0], b.operands()[0]);
      if (c != 0) return c;
      return a.exponent() - b.exponent();
    }
    default: {
      const auto& ka = a.operands();
      const auto& kb = b.operands();
      if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
      for (std::size_t i = 0; i < ka.size(); ++i) {
        int c = compare(ka[i], kb[i]);
        if (c != 0) return c;
      }
      return 0;
    }
  }
}

namespace {

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return Expr::compare(a, b) < 0; }
};

}  // namespace

// --- canonical constructors -------------------------------------------------

Expr Expr::add(std::vector<Expr> terms) {
  double const_sum = 0.0;
  std::map<Expr, double, ExprLess> collected;

  std::function<void(const Expr&)> absorb = [&](const Expr& t) {
    if (t.kind() == Kind::Add) {
      for (const auto& k : t.operands()) absorb(k);
      return;
    }
    if (t.kind() == Kind::Constant) {
      const_sum += t.value();
      return;
    }
    double coeff = 1.0;
    Expr key = t;
    if (t.kind() == Kind::Mul) {
      const auto& ops = t.operands();
      if (ops.front().kind() == Kind::Constant) {
        coeff = ops.front().value();
        std::vector<Expr> rest(ops.begin() + 1, ops.end());
        if (rest.size() == 1) {
          key = rest.front();
        } else {
          Node n;
          n.kind = Kind::Mul;
          n.kids = std::move(rest);
          key = Expr(make_node(std::move(n)));
        }
      }
    }
    collected[key] += coeff;
  };
  for (const auto& t : terms) absorb(t);

  std::vector<Expr> out;
  if (const_sum != 0.0) out.push_back(constant(const_sum));
  for (const auto& [key, coeff] : collected) {
    if (coeff == 0.0) continue;
    if (coeff == 1.0) {
      out.push_back(key);
    } else {
      std::vector<Expr> fac;
      fac.push_back(constant(coeff));
      if (key.kind() == Kind::Mul) {
        for (const auto& k : key.operands()) fac.push_back(k);
      } else {
        fac.push_back(key);
      }
      Node n;
      n.kind = Kind::Mul;
      n.kids = std::move(fac);
      out.push_back(Expr(make_node(std::move(n))));
    }
  }
  if (out.empty()) return constant(0.0);
  if (out.size() == 1) return out.front();
  std::sort(out.begin(), out.end(), ExprLess{});
  Node n;
  n.kind = Kind::Add;
  n.kids = std::move(out);
  return Expr(make_node(std::move(n)));
}

namespace {

// Base raised to twice the stored exponent (half-integer powers carry Sqrt).
void rebuild_power(const Expr& base, long long twice_exp, std::vector<Expr>& out) {
  if (twice_exp == 0) return;
  long long whole = twice_exp / 2;
  bool half = (twice_exp % 2) != 0;
  if (twice_exp < 0 && half) whole = (twice_exp - 1) / 2;
  if (whole != 0) out.push_back(Expr::pow(base, static_cast<int>(whole)));
  if (half) out.push_back(Expr::sqrt(base));
}

}  // namespace

Expr Expr::mul(std::vector<Expr> factors) {
  double const_prod = 1.0;
  // base -> exponent counted in halves
  std::map<Expr, long long, ExprLess> bases;

  std::function<void(const Expr&, long long)> absorb = [&](const Expr& f, long long te) {
    switch (f.kind()) {
      case Kind::Constant: {
        double v = f.value();
        if (te == 2) {
          const_prod *= v;
        } else if (te % 2 == 0) {
          const_prod *= std::pow(v, static_cast<double>(te / 2));
        } else {
          const_prod *= std::pow(v, static_cast<double>(te) / 2.0);
        }
        return;
      }
      case Kind::Mul:
        for (const auto& k : f.operands()) absorb(k, te);
        return;
      case Kind::Pow:
        absorb(f.operands()[0], te * f.exponent());
        return;
      case Kind::Sqrt:
        if (te % 2 == 0)
          absorb(f.operands()[0], te / 2);
        else
          bases[f] += te;  // quarter powers stay opaque
        return;
      default:
        bases[f] += te;
        return;
    }
  };
  std::function<void(const Expr&)> top = [&](const Expr& f) {
    if (f.kind() == Kind::Sqrt) {
      absorb(f.operands()[0], 1);
    } else if (f.kind() == Kind::Mul) {
      for (const auto& k : f.operands()) top(k);
    } else {
      absorb(f, 2);
    }
  };
  for (const auto& f : factors) top(f);

  if (const_prod == 0.0) return constant(0.0);

  std::vector<Expr> out;
  for (const auto& [base, te] : bases) {
    rebuild_power(base, te, out);
  }
  if (out.empty()) return constant(const_prod);
  std::sort(out.begin(), out.end(), ExprLess{});
  if (const_prod != 1.0) out.insert(out.begin(), constant(const_prod));
  if (out.size() == 1) return out.front();
  Node n;
  n.kind = Kind::Mul;
  n.kids = std::move(out);
  return Expr(make_node(std::move(n)));
}

Expr Expr::pow(Expr base, int e) {
  if (e == 0) return constant(1.0);
  if (e == 1) return base;
  switch (base.kind()) {
    case Kind::Constant:
      return constant(std::pow(base.value(), static_cast<double>(e)));
    case Kind::Mul: {
      std::vector<Expr> fac;
      for (const auto& k : base.operands()) fac.push_back(pow(k, e));
      return mul(std::move(fac));
    }
    case Kind::Pow:
      return pow(base.operands()[0], base.exponent() * e);
    case Kind::Sqrt: {
      std::vector<Expr> out;
      rebuild_power(base.operands()[0], e, out);
      if (out.empty()) return constant(1.0);
      return mul(std::move(out));
    }
    default: {
      Node n;
      n.kind = Kind::Pow;
      n.exp = e;
      n.kids = {std::move(base)};
      return Expr(make_node(std::move(n)));
    }
  }
}

Expr Expr::sqrt(Expr arg) {
  if (arg.kind() == Kind::Constant) {
    double v = arg.value();
    if (v >= 0.0) return constant(std::sqrt(v));
    Node n;
    n.kind = Kind::Sqrt;
    n.kids = {std::move(arg)};
    return Expr(make_node(std::move(n)));
  }
  if (arg.kind() == Kind::Mul) {
    const auto& ops = arg.operands();
    if (ops.front().kind() == Kind::Constant && ops.front().value() > 0.0) {
      std::vector<Expr> rest(ops.begin() + 1, ops.end());
      return mul({constant(std::sqrt(ops.front().value())), sqrt(mul(std::move(rest)))});
    }
  }
  if (arg.kind() == Kind::Add) {
    // pull a common positive constant factor out of the radicand
    double cmin = 0.0;
    bool all_pos = true;
    for (const auto& t : arg.operands()) {
      double c = t.kind() == Kind::Constant ? t.value()
                 : (t.kind() == Kind::Mul && t.operands().front().kind() == Kind::Constant)
                     ? t.operands().front().value()
                     : 1.0;
      if (c <= 0.0) {
        all_pos = false;
        break;
      }
      cmin = cmin == 0.0 ? c : std::min(cmin, c);
    }
    if (all_pos && cmin > 0.0 && cmin != 1.0) {
      std::vector<Expr> scaled;
      for (const auto& t : arg.operands()) scaled.push_back(mul({constant(1.0 / cmin), t}));
      return mul({constant(std::sqrt(cmin)), sqrt(add(std::move(scaled)))});
    }
  }
  Node n;
  n.kind = Kind::Sqrt;
  n.kids = {std::move(arg)};
  return Expr(make_node(std::move(n)));
}

Expr Expr::sin(Expr arg) {
  if (arg.is_constant()) return constant(std::sin(arg.value()));
  Node n;
  n.kind = Kind::Sin;
  n.kids = {std::move(arg)};
  return Expr(make_node(std::move(n)));
}

Expr Expr::cos(Expr arg) {
  if (arg.is_constant()) return constant(std::cos(arg.value()));
  Node n;
  n.kind = Kind::Cos;
  n.kids = {std::move(arg)};
  return Expr(make_node(std::move(n)));
}

Expr Expr::sign(Expr arg) {
  if (arg.is_constant()) {
    double v = arg.value();
    return constant(v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
  }
  Node n;
  n.kind = Kind::Sign;
  n.kids = {std::move(arg)};
  return Expr(make_node(std::move(n)));
}

Expr Expr::abs(Expr arg) {
  if (arg.is_constant()) return constant(std::fabs(arg.value()));
  Node n;
  n.kind = Kind::Abs;
  n.kids = {std::move(arg)};
  return Expr(make_node(std::move(n)));
}

Expr operator-(const Expr& a) { return Expr::mul({Expr::constant(-1.0), a}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add({a, -b}); }

// --- queries -----------------------------------------------------------------

bool Expr::depends_on(int var) const {
  if (kind() == Kind::Variable) return var_index() == var;
  for (const auto& k : operands())
    if (k.depends_on(var)) return true;
  return false;
}

bool Expr::contains_kind(Kind target) const {
  if (kind() == target) return true;
  for (const auto& k : operands())
    if (k.contains_kind(target)) return true;
  return false;
}

bool Expr::is_smooth() const {
  return !contains_kind(Kind::Sign) && !contains_kind(Kind::Abs);
}

// --- evaluation --------------------------------------------------------------

namespace {

double int_pow(double v, int e) {
  if (e < 0) return 1.0 / int_pow(v, -e);
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= v;
    v *= v;
    e >>= 1;
  }
  return r;
}

}  // namespace

double Expr::eval(std::span<const double> x) const {
  switch (kind()) {
    case Kind::Constant:
      return value();
    case Kind::Variable: {
      int i = var_index() - 1;
      if (i >= static_cast<int>(x.size())) throw EvalError("state vector too short");
      return x[i];
    }
    case Kind::Add: {
      double s = 0.0;
      for (const auto& k : operands()) s += k.eval(x);
      return s;
    }
    case Kind::Mul: {
      double p = 1.0;
      for (const auto& k : operands()) p *= k.eval(x);
      return p;
    }
    case Kind::Pow:
      return int_pow(operands()[0].eval(x), exponent());
    case Kind::Sin:
      return std::sin(operands()[0].eval(x));
    case Kind::Cos:
      return std::cos(operands()[0].eval(x));
    case Kind::Sqrt: {
      double v = operands()[0].eval(x);
      if (v < 0.0) {
        if (v > -1e-12) return 0.0;
        throw EvalError("sqrt of negative value " + format_real(v));
      }
      return std::sqrt(v);
    }
    case Kind::Sign: {
      double v = operands()[0].eval(x);
      return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    }
    case Kind::Abs:
      return std::fabs(operands()[0].eval(x));
  }
  throw EvalError("corrupt expression node");
}

// --- differentiation ---------------------------------------------------------

Expr Expr::diff(int var) const {
  if (!depends_on(var)) return constant(0.0);
  switch (kind()) {
    case Kind::Constant:
      return constant(0.0);
    case Kind::Variable:
      return constant(var_index() == var ? 1.0 : 0.0);
    case Kind::Add: {
      std::vector<Expr> terms;
      for (const auto& k : operands()) terms.push_back(k.diff(var));
      return add(std::move(terms));
    }
    case Kind::Mul: {
      std::vector<Expr> terms;
      const auto& ops = operands();
      for (std::size_t i = 0; i < ops.size(); ++i) {
        std::vector<Expr> fac;
        fac.push_back(ops[i].diff(var));
        for (std::size_t j = 0; j < ops.size(); ++j)
          if (j != i) fac.push_back(ops[j]);
        terms.push_back(mul(std::move(fac)));
      }
      return add(std::move(terms));
    }
    case Kind::Pow: {
      const Expr& b = operands()[0];
      return mul({constant(static_cast<double>(exponent())), pow(b, exponent() - 1), b.diff(var)});
    }
    case Kind::Sin:
      return mul({cos(operands()[0]), operands()[0].diff(var)});
    case Kind::Cos:
      return mul({constant(-1.0), sin(operands()[0]), operands()[0].diff(var)});
    case Kind::Sqrt: {
      const Expr& u = operands()[0];
      // u' / (2 sqrt(u))
      return mul({constant(0.5), u.diff(var), pow(u, -1), sqrt(u)});
    }
    case Kind::Sign:
      return constant(0.0);  // a.e. derivative, valid away from arg == 0
    case Kind::Abs:
      return mul({sign(operands()[0]), operands()[0].diff(var)});
  }
  throw std::logic_error("corrupt expression node");
}

// --- antidifferentiation -----------------------------------------------------

namespace {

// Antiderivative of a single var-dependent atom, nullopt outside the subclass.
std::optional<Expr> anti_atomic(const Expr& e, int var) {
  auto affine_const = [&](const Expr& a) -> std::optional<double> {
    auto m = match_affine(a, var);
    if (!m) return std::nullopt;
    if (!m->first.is_constant() || m->first.value() == 0.0) return std::nullopt;
    return m->first.value();
  };
  switch (e.kind()) {
    case Kind::Pow: {
      const Expr& b = e.operands()[0];
      int n = e.exponent();
      if (n == -1) return std::nullopt;
      auto a = affine_const(b);
      if (!a) return std::nullopt;
      return Expr::mul({Expr::constant(1.0 / ((n + 1) * *a)), Expr::pow(b, n + 1)});
    }
    case Kind::Sin: {
      auto a = affine_const(e.operands()[0]);
      if (!a) return std::nullopt;
      return Expr::mul({Expr::constant(-1.0 / *a), Expr::cos(e.operands()[0])});
    }
    case Kind::Cos: {
      auto a = affine_const(e.operands()[0]);
      if (!a) return std::nullopt;
      return Expr::mul({Expr::constant(1.0 / *a), Expr::sin(e.operands()[0])});
    }
    default: {
      auto a = affine_const(e);
      if (!a) return std::nullopt;
      return Expr::mul({Expr::constant(0.5 / *a), Expr::pow(e, 2)});
    }
  }
}

}  // namespace

std::optional<Expr> Expr::antiderivative(int var) const {
  if (!depends_on(var)) return mul({*this, variable(var)});
  switch (kind()) {
    case Kind::Add: {
      std::vector<Expr> terms;
      for (const auto& k : operands()) {
        auto a = k.antiderivative(var);
        if (!a) return std::nullopt;
        terms.push_back(*a);
      }
      return add(std::move(terms));
    }
    case Kind::Mul: {
      std::vector<Expr> free, dep;
      for (const auto& k : operands())
        (k.depends_on(var) ? dep : free).push_back(k);
      if (dep.size() != 1) return std::nullopt;
      auto a = anti_atomic(dep.front(), var);
      if (!a) return std::nullopt;
      free.push_back(*a);
      return mul(std::move(free));
    }
    default:
      return anti_atomic(*this, var);
  }
}

// --- expansion ---------------------------------------------------------------

namespace {

// Cross-multiply a running term list by one (already expanded) factor.
// Terms are plain products; distribution happens here, not in mul().
void distribute_factor(std::vector<Expr>& partial, const Expr& factor) {
  std::vector<Expr> next;
  if (factor.kind() == Kind::Add) {
    for (const auto& t : factor.operands())
      for (const auto& p : partial) next.push_back(Expr::mul({p, t}));
  } else {
    for (const auto& p : partial) next.push_back(Expr::mul({p, factor}));
  }
  Expr s = Expr::add(std::move(next));
  if (s.kind() == Kind::Add)
    partial.assign(s.operands().begin(), s.operands().end());
  else
    partial = {s};
}

}  // namespace

Expr Expr::expanded() const {
  switch (kind()) {
    case Kind::Constant:
    case Kind::Variable:
      return *this;
    case Kind::Add: {
      std::vector<Expr> terms;
      for (const auto& k : operands()) terms.push_back(k.expanded());
      return add(std::move(terms));
    }
    case Kind::Mul: {
      std::vector<Expr> partial{constant(1.0)};
      for (const auto& kraw : operands()) {
        Expr k = kraw.expanded();
        if (k.kind() == Kind::Pow && k.operands()[0].kind() == Kind::Add &&
            k.exponent() > 1 && k.exponent() <= 16) {
          for (int i = 0; i < k.exponent(); ++i) distribute_factor(partial, k.operands()[0]);
        } else {
          distribute_factor(partial, k);
        }
      }
      return add(std::move(partial));
    }
    case Kind::Pow: {
      Expr b = operands()[0].expanded();
      int n = exponent();
      if (b.kind() == Kind::Add && n > 1 && n <= 16) {
        std::vector<Expr> partial{constant(1.0)};
        for (int i = 0; i < n; ++i) distribute_factor(partial, b);
        return add(std::move(partial));
      }
      return pow(std::move(b), n);
    }
    case Kind::Sin:
      return sin(operands()[0].expanded());
    case Kind::Cos:
      return cos(operands()[0].expanded());
    case Kind::Sqrt:
      return sqrt(operands()[0].expanded());
    case Kind::Sign:
      return sign(operands()[0].expanded());
    case Kind::Abs:
      return abs(operands()[0].expanded());
  }
  throw std::logic_error("corrupt expression node");
}

// --- identity tests ----------------------------------------------------------

bool identically_zero(const Expr& e) {
  Expr x = e.expanded();
  auto term_coeff = [](const Expr& t) {
    if (t.kind() == Kind::Constant) return t.value();
    if (t.kind() == Kind::Mul && t.operands().front().kind() == Kind::Constant)
      return t.operands().front().value();
    return 1.0;
  };
  if (x.kind() == Kind::Add) {
    for (const auto& t : x.operands())
      if (std::fabs(term_coeff(t)) > 1e-9) return false;
    return true;
  }
  return std::fabs(term_coeff(x)) <= 1e-9 || (x.is_constant() && std::fabs(x.value()) <= 1e-9);
}

bool equivalent(const Expr& a, const Expr& b) { return identically_zero(a - b); }

std::optional<std::pair<Expr, Expr>> match_affine(const Expr& e, int var) {
  Expr coeff = e.diff(var);
  if (coeff.depends_on(var)) return std::nullopt;
  Expr offset = (e - coeff * Expr::variable(var)).expanded();
  if (offset.depends_on(var)) return std::nullopt;
  return std::make_pair(coeff, offset);
}

// --- quadrature --------------------------------------------------------------

namespace {

struct SimpsonState {
  const Expr* e;
  int var;
  double buf[3];
  long evals = 0;
  long max_evals = 4'000'000;

  double f(double t) {
    if (++evals > max_evals)
      throw EvalError("quadrature subdivision budget exceeded");
    buf[var - 1] = t;
    return e->eval(std::span<const double>(buf, 3));
  }
};

double simpson_rec(SimpsonState& s, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = s.f(lm), frm = s.f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0) throw EvalError("quadrature tolerance not reached");
  if (std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(s, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(s, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double quadrature(const Expr& e, int var, double lo, double hi, double abs_tol) {
  if (lo == hi) return 0.0;
  SimpsonState s{&e, var, {0.0, 0.0, 0.0}};
  double fa = s.f(lo), fb = s.f(hi), fm = s.f(0.5 * (lo + hi));
  double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(s, lo, hi, fa, fm, fb, whole, abs_tol, 60);
}

// --- printing ----------------------------------------------------------------

std::string format_real(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  return std::string(buf, p);
}

namespace {

std::string print_expr(const Expr& e);

std::string print_atom(const Expr& e) {
  switch (e.kind()) {
    case Kind::Constant: {
      if (e.value() < 0.0) return "(" + format_real(e.value()) + ")";
      return format_real(e.value());
    }
    case Kind::Variable:
      return "x" + std::to_string(e.var_index());
    case Kind::Sin:
      return "sin(" + print_expr(e.operands()[0]) + ")";
    case Kind::Cos:
      return "cos(" + print_expr(e.operands()[0]) + ")";
    case Kind::Sqrt:
      return "sqrt(" + print_expr(e.operands()[0]) + ")";
    case Kind::Sign:
      return "sign(" + print_expr(e.operands()[0]) + ")";
    case Kind::Abs:
      return "abs(" + print_expr(e.operands()[0]) + ")";
    case Kind::Pow: {
      std::string base = print_atom(e.operands()[0]);
      if (e.operands()[0].kind() == Kind::Add || e.operands()[0].kind() == Kind::Mul)
        base = "(" + print_expr(e.operands()[0]) + ")";
      int n = e.exponent();
      if (n < 0) return base + "^(" + std::to_string(n) + ")";
      return base + "^" + std::to_string(n);
    }
    case Kind::Add:
    case Kind::Mul:
      return "(" + print_expr(e) + ")";
  }
  return "?";
}

// (|coefficient|, factor list) of one additive term
std::pair<double, std::string> print_term(const Expr& t) {
  double coeff = 1.0;
  std::vector<const Expr*> factors;
  if (t.kind() == Kind::Constant) return {std::fabs(t.value()), format_real(std::fabs(t.value()))};
  if (t.kind() == Kind::Mul) {
    for (const auto& k : t.operands()) {
      if (k.kind() == Kind::Constant)
        coeff = k.value();
      else
        factors.push_back(&k);
    }
  } else {
    factors.push_back(&t);
  }
  std::string body;
  if (std::fabs(coeff) != 1.0 || factors.empty()) body = format_real(std::fabs(coeff));
  for (const Expr* f : factors) {
    if (!body.empty()) body += "*";
    body += print_atom(*f);
  }
  return {coeff, body};
}

std::string print_expr(const Expr& e) {
  std::vector<Expr> terms;
  if (e.kind() == Kind::Add)
    terms.assign(e.operands().begin(), e.operands().end());
  else
    terms.push_back(e);
  std::string out;
  bool first = true;
  for (const auto& t : terms) {
    auto [coeff, body] = print_term(t);
    if (first) {
      if (coeff < 0.0) out += "-";
      out += body;
      first = false;
    } else {
      out += coeff < 0.0 ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

}  // namespace

std::string Expr::str() const { return print_expr(*this); }

}  // namespace ioc
