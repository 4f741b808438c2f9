#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ioc {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg), position(pos) {}
  std::size_t position = 0;
};

/// Immutable symbolic scalar expression over state variables x1..x3.
///
/// Expressions are kept in a canonical form at construction time: sums and
/// products are flattened and sorted, constants are folded, like terms are
/// collected and integer powers of a common base are merged. Structural
/// equality on canonical forms is therefore decidable with operator==.
class Expr {
 public:
  enum class Kind { Constant, Variable, Add, Mul, Pow, Sin, Cos, Sqrt, Sign, Abs };

  Expr();  // zero

  static Expr constant(double v);
  static Expr variable(int index);  // 1-based state index
  static Expr add(std::vector<Expr> terms);
  static Expr mul(std::vector<Expr> factors);
  static Expr pow(Expr base, int exponent);
  static Expr sin(Expr arg);
  static Expr cos(Expr arg);
  static Expr sqrt(Expr arg);
  static Expr sign(Expr arg);
  static Expr abs(Expr arg);

  Kind kind() const;
  double value() const;                      // Constant only
  int var_index() const;                     // Variable only
  int exponent() const;                      // Pow only
  const std::vector<Expr>& operands() const; // composite nodes

  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_zero() const;
  bool is_one() const;
  bool depends_on(int var) const;
  bool contains_kind(Kind k) const;
  /// Differentiable everywhere (no Sign/Abs anywhere in the tree).
  bool is_smooth() const;

  /// Evaluate at a state vector (x[0] is x1). Throws EvalError when a Sqrt
  /// argument is negative beyond roundoff.
  double eval(std::span<const double> x) const;

  /// Symbolic partial derivative with respect to x_var. Sign nodes
  /// differentiate to zero and Abs to Sign, valid away from the origin of
  /// their argument; use is_smooth() to detect that situation.
  Expr diff(int var) const;

  /// Antiderivative in x_var for the closed subclass (polynomials in affine
  /// arguments, sin/cos of affine arguments, and products of those with
  /// factors free of x_var). Returns nullopt outside the subclass; callers
  /// fall back to numeric quadrature.
  std::optional<Expr> antiderivative(int var) const;

  /// Distribute products over sums and expand small integer powers of sums.
  Expr expanded() const;

  /// Grammar-conforming text form; parse(str()) reproduces the expression.
  std::string str() const;

  static int compare(const Expr& a, const Expr& b);

  friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Expr& a, const Expr& b) { return compare(a, b) != 0; }

  friend Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
  friend Expr operator-(const Expr& a);
  friend Expr operator+(double a, const Expr& b) { return constant(a) + b; }
  friend Expr operator+(const Expr& a, double b) { return a + constant(b); }
  friend Expr operator-(double a, const Expr& b) { return constant(a) - b; }
  friend Expr operator-(const Expr& a, double b) { return a - constant(b); }
  friend Expr operator*(double a, const Expr& b) { return constant(a) * b; }
  friend Expr operator*(const Expr& a, double b) { return a * constant(b); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Parse the expression grammar:
///   expr   := ['-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := atom ('^' exponent)?
///   atom   := number | 'x1'|'x2'|'x3' | '(' expr ')' | func '(' expr ')'
///   func   := sin | cos | sqrt | sign | abs
///   exponent := integer | '(' ['-'] integer ')' | '(1/2)'
/// Throws ParseError with the offending position.
Expr parse(std::string_view text);

/// True when e expands and collects to a sum whose coefficients are all
/// negligible (exact cancellation up to floating-point noise).
bool identically_zero(const Expr& e);
bool equivalent(const Expr& a, const Expr& b);

/// Decompose e = offset + coeff * x_var with both parts free of x_var.
std::optional<std::pair<Expr, Expr>> match_affine(const Expr& e, int var);

/// Adaptive Simpson quadrature of a univariate expression in x_var.
/// Throws EvalError when the tolerance is not reached within the
/// subdivision budget.
double quadrature(const Expr& e, int var, double lo, double hi,
                  double abs_tol = 1e-10);

std::string format_real(double v);

}  // namespace ioc
