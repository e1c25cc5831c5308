#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace reach {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Largest n + m + 1 supported by the forward-mode evaluator.
inline constexpr int kMaxDualWidth = 32;

struct ExprGradient {
  double value = 0.0;
  Vec grad_x;
  Vec grad_u;
  double d_t = 0.0;
};

/// Arithmetic expression over x1..xn, u1..um and t.
///
/// Grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := unary ("^" integer)?
///   unary  := "-" unary | atom
///   atom   := number | "pi" | ident | func "(" expr ")" | "(" expr ")"
///   ident  := "t" | "x"digits | "u"digits
///
/// Note that unary minus binds tighter than "^", so "-x1^2" is (-x1)^2.
/// Expressions are immutable and cheap to copy.
class Expression {
 public:
  struct Node;
  struct Instr;

  /// Throws ParseError on syntax errors, unknown identifiers or indices outside 1..n / 1..m.
  static Expression parse(std::string_view source, int n, int m);

  int state_dim() const { return n_; }
  int control_dim() const { return m_; }

  double eval(const Vec& x, const Vec& u, double t) const;
  ExprGradient eval_with_gradient(const Vec& x, const Vec& u, double t) const;

  /// Raw-buffer variant used by the dynamics hot loop. gx has n entries, gu has m.
  double eval_raw(const double* x, const double* u, double t) const;
  double eval_partials_raw(const double* x, const double* u, double t, double* gx, double* gu,
                           double* gt) const;

  /// Fully parenthesised rendering that parses back to an equivalent tree.
  std::string to_string() const;
  const std::string& source() const { return source_; }

  bool depends_on_time() const { return uses_t_; }

 private:
  std::string source_;
  int n_ = 0;
  int m_ = 0;
  bool uses_t_ = false;
  int max_depth_ = 0;
  std::shared_ptr<const Node> root_;
  std::shared_ptr<const std::vector<Instr>> tape_;
};

}  // namespace reach
