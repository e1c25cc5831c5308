#include "reach/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "reach/errors.hpp"

namespace reach {

namespace {

enum class Op {
  Const,
  VarX,
  VarU,
  VarT,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Sin,
  Cos,
  Exp,
  Log,
  Sqrt,
  Tanh,
};

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Tanh: return "tanh";
    default: return "?";
  }
}

}  // namespace

struct Expression::Node {
  Op op = Op::Const;
  double number = 0.0;
  int index = 0;     // 0-based for VarX/VarU, exponent for Pow
  std::size_t offset = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

struct Expression::Instr {
  Op op;
  double number;
  int index;
  std::size_t offset;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_node(Op op, std::size_t offset, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto node = std::make_shared<Expression::Node>();
  node->op = op;
  node->offset = offset;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

class Parser {
 public:
  Parser(std::string_view src, int n, int m) : src_(src), n_(n), m_(m) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= src_.size()) fail("empty expression", {"number", "identifier", "(", "-"});
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input", {"+", "-", "*", "/", "^", "end of input"});
    return e;
  }

  bool uses_t = false;

 private:
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) {
    std::string what = msg + " at offset " + std::to_string(pos_);
    if (!expected.empty()) {
      what += " (expected one of:";
      for (const auto& e : expected) what += " '" + e + "'";
      what += ")";
    }
    throw ParseError(what, pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('+')) {
        lhs = make_node(Op::Add, at, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(Op::Sub, at, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('*')) {
        lhs = make_node(Op::Mul, at, lhs, factor());
      } else if (accept('/')) {
        lhs = make_node(Op::Div, at, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    NodePtr base = unary();
    skip_ws();
    std::size_t at = pos_;
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a non-negative integer literal", {"integer"});
      if (pos_ - start > 6) fail("exponent too large", {"integer"});
      auto node = std::make_shared<Expression::Node>();
      node->op = Op::Pow;
      node->offset = at;
      node->index = std::stoi(std::string(src_.substr(start, pos_ - start)));
      node->lhs = base;
      return node;
    }
    return base;
  }

  NodePtr unary() {
    skip_ws();
    std::size_t at = pos_;
    if (accept('-')) return make_node(Op::Neg, at, unary());
    return atom();
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input", {"number", "identifier", "(", "-"});
    std::size_t at = pos_;
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("missing closing parenthesis", {")"});
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      std::string id(src_.substr(start, pos_ - start));
      return identifier(id, at);
    }
    fail("unexpected character '" + std::string(1, c) + "'", {"number", "identifier", "(", "-"});
  }

  NodePtr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t s = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t count = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail("malformed number", {"digit"});
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    auto node = std::make_shared<Expression::Node>();
    node->op = Op::Const;
    node->offset = start;
    node->number = std::strtod(std::string(src_.substr(start, pos_ - start)).c_str(), nullptr);
    return node;
  }

  NodePtr identifier(const std::string& id, std::size_t at) {
    static const std::pair<const char*, Op> kFunctions[] = {
        {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp},
        {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"tanh", Op::Tanh},
    };
    for (const auto& [name, op] : kFunctions) {
      if (id == name) {
        if (!accept('(')) fail("expected '(' after function name", {"("});
        NodePtr arg = expr();
        if (!accept(')')) fail("missing closing parenthesis", {")"});
        return make_node(op, at, arg);
      }
    }
    if (id == "pi") {
      auto node = std::make_shared<Expression::Node>();
      node->op = Op::Const;
      node->offset = at;
      node->number = std::numbers::pi;
      return node;
    }
    if (id == "t") {
      uses_t = true;
      return make_node(Op::VarT, at);
    }
    if ((id[0] == 'x' || id[0] == 'u') && id.size() > 1 &&
        std::all_of(id.begin() + 1, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      if (id.size() > 7) {
        pos_ = at;
        fail("variable index out of range in '" + id + "'", {});
      }
      int idx = std::stoi(id.substr(1));
      int limit = id[0] == 'x' ? n_ : m_;
      if (idx < 1 || idx > limit) {
        pos_ = at;
        fail("variable index out of range in '" + id + "' (declared " + std::string(1, id[0]) +
                 "1.." + std::string(1, id[0]) + std::to_string(limit) + ")",
             {});
      }
      auto node = std::make_shared<Expression::Node>();
      node->op = id[0] == 'x' ? Op::VarX : Op::VarU;
      node->offset = at;
      node->index = idx - 1;
      return node;
    }
    pos_ = at;
    fail("unknown identifier '" + id + "'", {"t", "x<k>", "u<k>", "pi", "sin", "cos", "exp", "log", "sqrt", "tanh"});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int n_;
  int m_;
};

void compile(const NodePtr& node, std::vector<Expression::Instr>& tape, int depth, int& max_depth) {
  int width = 0;
  if (node->lhs) {
    compile(node->lhs, tape, depth, max_depth);
    width = 1;
  }
  if (node->rhs) compile(node->rhs, tape, depth + width, max_depth);
  max_depth = std::max(max_depth, depth + 1 + (node->rhs ? 1 : 0));
  tape.push_back({node->op, node->number, node->index, node->offset});
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void render(const NodePtr& node, std::string& out) {
  switch (node->op) {
    case Op::Const:
      out += format_number(node->number);
      return;
    case Op::VarX:
      out += "x" + std::to_string(node->index + 1);
      return;
    case Op::VarU:
      out += "u" + std::to_string(node->index + 1);
      return;
    case Op::VarT:
      out += "t";
      return;
    case Op::Neg:
      out += "(-";
      render(node->lhs, out);
      out += ")";
      return;
    case Op::Pow:
      out += "(";
      render(node->lhs, out);
      out += ")^" + std::to_string(node->index);
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      static const char kSym[] = {'+', '-', '*', '/'};
      out += "(";
      render(node->lhs, out);
      out += kSym[static_cast<int>(node->op) - static_cast<int>(Op::Add)];
      render(node->rhs, out);
      out += ")";
      return;
    }
    default:
      out += function_name(node->op);
      out += "(";
      render(node->lhs, out);
      out += ")";
      return;
  }
}

[[noreturn]] void domain_fail(const char* what, std::size_t offset) {
  throw DomainError(std::string(what) + " in sub-expression at offset " + std::to_string(offset), offset);
}

double int_pow(double b, int k) {
  double r = 1.0;
  double base = b;
  while (k > 0) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

thread_local std::vector<double> g_scratch;

}  // namespace

Expression Expression::parse(std::string_view source, int n, int m) {
  if (n < 0 || m < 0 || n + m + 1 > kMaxDualWidth) throw DimensionError("expression dimensions out of range");
  Parser parser(source, n, m);
  Expression e;
  e.root_ = parser.parse();
  e.source_ = std::string(source);
  e.n_ = n;
  e.m_ = m;
  e.uses_t_ = parser.uses_t;
  auto tape = std::make_shared<std::vector<Instr>>();
  int max_depth = 0;
  compile(e.root_, *tape, 0, max_depth);
  e.max_depth_ = max_depth;
  e.tape_ = std::move(tape);
  return e;
}

double Expression::eval_raw(const double* x, const double* u, double t) const {
  g_scratch.resize(static_cast<std::size_t>(max_depth_) + 1);
  double* st = g_scratch.data();
  int sp = 0;
  for (const Instr& in : *tape_) {
    switch (in.op) {
      case Op::Const: st[sp++] = in.number; break;
      case Op::VarX: st[sp++] = x[in.index]; break;
      case Op::VarU: st[sp++] = u[in.index]; break;
      case Op::VarT: st[sp++] = t; break;
      case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
      case Op::Add: --sp; st[sp - 1] += st[sp]; break;
      case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
      case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
      case Op::Div:
        --sp;
        if (st[sp] == 0.0) domain_fail("division by zero", in.offset);
        st[sp - 1] /= st[sp];
        break;
      case Op::Pow: st[sp - 1] = int_pow(st[sp - 1], in.index); break;
      case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
      case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
      case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Op::Log:
        if (!(st[sp - 1] > 0.0)) domain_fail("log of non-positive argument", in.offset);
        st[sp - 1] = std::log(st[sp - 1]);
        break;
      case Op::Sqrt:
        if (!(st[sp - 1] > 0.0)) domain_fail("sqrt of non-positive argument", in.offset);
        st[sp - 1] = std::sqrt(st[sp - 1]);
        break;
      case Op::Tanh: st[sp - 1] = std::tanh(st[sp - 1]); break;
    }
  }
  return st[0];
}

double Expression::eval_partials_raw(const double* x, const double* u, double t, double* gx, double* gu,
                                     double* gt) const {
  // Each stack slot holds a value followed by `w` partials (x..., u..., t).
  const int w = n_ + m_ + 1;
  const int stride = w + 1;
  g_scratch.resize(static_cast<std::size_t>(stride) * (static_cast<std::size_t>(max_depth_) + 1));
  double* st = g_scratch.data();
  int sp = 0;
  auto slot = [&](int i) { return st + static_cast<std::ptrdiff_t>(i) * stride; };
  auto push_seed = [&](double v, int seed) {
    double* s = slot(sp++);
    s[0] = v;
    std::fill(s + 1, s + stride, 0.0);
    if (seed >= 0) s[1 + seed] = 1.0;
  };
  auto scale_unary = [&](double* a, double value, double deriv) {
    a[0] = value;
    for (int k = 1; k < stride; ++k) a[k] *= deriv;
  };

  for (const Instr& in : *tape_) {
    switch (in.op) {
      case Op::Const: push_seed(in.number, -1); break;
      case Op::VarX: push_seed(x[in.index], in.index); break;
      case Op::VarU: push_seed(u[in.index], n_ + in.index); break;
      case Op::VarT: push_seed(t, n_ + m_); break;
      case Op::Neg: {
        double* a = slot(sp - 1);
        for (int k = 0; k < stride; ++k) a[k] = -a[k];
        break;
      }
      case Op::Add: {
        --sp;
        double* a = slot(sp - 1);
        const double* b = slot(sp);
        for (int k = 0; k < stride; ++k) a[k] += b[k];
        break;
      }
      case Op::Sub: {
        --sp;
        double* a = slot(sp - 1);
        const double* b = slot(sp);
        for (int k = 0; k < stride; ++k) a[k] -= b[k];
        break;
      }
      case Op::Mul: {
        --sp;
        double* a = slot(sp - 1);
        const double* b = slot(sp);
        const double av = a[0];
        const double bv = b[0];
        for (int k = 1; k < stride; ++k) a[k] = a[k] * bv + av * b[k];
        a[0] = av * bv;
        break;
      }
      case Op::Div: {
        --sp;
        double* a = slot(sp - 1);
        const double* b = slot(sp);
        const double bv = b[0];
        if (bv == 0.0) domain_fail("division by zero", in.offset);
        const double q = a[0] / bv;
        for (int k = 1; k < stride; ++k) a[k] = (a[k] - q * b[k]) / bv;
        a[0] = q;
        break;
      }
      case Op::Pow: {
        double* a = slot(sp - 1);
        const int k = in.index;
        const double deriv = k == 0 ? 0.0 : k * int_pow(a[0], k - 1);
        scale_unary(a, int_pow(a[0], k), deriv);
        break;
      }
      case Op::Sin: {
        double* a = slot(sp - 1);
        scale_unary(a, std::sin(a[0]), std::cos(a[0]));
        break;
      }
      case Op::Cos: {
        double* a = slot(sp - 1);
        scale_unary(a, std::cos(a[0]), -std::sin(a[0]));
        break;
      }
      case Op::Exp: {
        double* a = slot(sp - 1);
        const double e = std::exp(a[0]);
        scale_unary(a, e, e);
        break;
      }
      case Op::Log: {
        double* a = slot(sp - 1);
        if (!(a[0] > 0.0)) domain_fail("log of non-positive argument", in.offset);
        scale_unary(a, std::log(a[0]), 1.0 / a[0]);
        break;
      }
      case Op::Sqrt: {
        double* a = slot(sp - 1);
        if (!(a[0] > 0.0)) domain_fail("sqrt of non-positive argument", in.offset);
        const double s = std::sqrt(a[0]);
        scale_unary(a, s, 0.5 / s);
        break;
      }
      case Op::Tanh: {
        double* a = slot(sp - 1);
        const double th = std::tanh(a[0]);
        scale_unary(a, th, 1.0 - th * th);
        break;
      }
    }
  }
  const double* r = slot(0);
  for (int i = 0; i < n_; ++i) gx[i] = r[1 + i];
  for (int j = 0; j < m_; ++j) gu[j] = r[1 + n_ + j];
  if (gt) *gt = r[1 + n_ + m_];
  return r[0];
}

double Expression::eval(const Vec& x, const Vec& u, double t) const {
  if (x.size() != n_ || u.size() != m_) throw DimensionError("expression evaluated with wrong dimensions");
  return eval_raw(x.data(), u.data(), t);
}

ExprGradient Expression::eval_with_gradient(const Vec& x, const Vec& u, double t) const {
  if (x.size() != n_ || u.size() != m_) throw DimensionError("expression evaluated with wrong dimensions");
  ExprGradient g;
  g.grad_x.resize(n_);
  g.grad_u.resize(m_);
  g.value = eval_partials_raw(x.data(), u.data(), t, g.grad_x.data(), g.grad_u.data(), &g.d_t);
  return g;
}

std::string Expression::to_string() const {
  std::string out;
  render(root_, out);
  return out;
}

}  // namespace reach
