#include "drsd/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "drsd/errors.hpp"

namespace drsd {

struct Expression::Node {
  enum class Kind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Constant;
  double value = 0.0;
  std::size_t var = 0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(std::span<const double> x) const {
    switch (kind) {
      case Kind::Constant: return value;
      case Kind::Variable: return x[var];
      case Kind::Neg: return -args[0]->eval(x);
      case Kind::Add: return args[0]->eval(x) + args[1]->eval(x);
      case Kind::Sub: return args[0]->eval(x) - args[1]->eval(x);
      case Kind::Mul: return args[0]->eval(x) * args[1]->eval(x);
      case Kind::Div: return args[0]->eval(x) / args[1]->eval(x);
      case Kind::Pow: return power(args[0]->eval(x), args[1]->eval(x));
      case Kind::Call: return call(x);
    }
    return 0.0;
  }

  static double power(double base, double e) {
    // Small integer exponents stay exact for negative bases.
    if (e == std::round(e) && std::abs(e) <= 16.0) {
      const int n = static_cast<int>(std::abs(e));
      double r = 1.0;
      for (int i = 0; i < n; ++i) r *= base;
      return e < 0 ? 1.0 / r : r;
    }
    return std::pow(base, e);
  }

  double call(std::span<const double> x) const {
    const double a = args[0]->eval(x);
    if (fn == "exp") return std::exp(a);
    if (fn == "log") return std::log(a);
    if (fn == "sqrt") return std::sqrt(a);
    if (fn == "abs") return std::abs(a);
    if (fn == "sin") return std::sin(a);
    if (fn == "cos") return std::cos(a);
    if (fn == "tan") return std::tan(a);
    if (fn == "tanh") return std::tanh(a);
    if (fn == "atan") return std::atan(a);
    const double b = args[1]->eval(x);
    if (fn == "min") return std::min(a, b);
    if (fn == "max") return std::max(a, b);
    return power(a, b);  // pow
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

int function_arity(const std::string& name) {
  static const std::map<std::string, int> table = {
      {"exp", 1}, {"log", 1}, {"sqrt", 1}, {"abs", 1},  {"sin", 1}, {"cos", 1},
      {"tan", 1}, {"tanh", 1}, {"atan", 1}, {"min", 2}, {"max", 2}, {"pow", 2}};
  const auto it = table.find(name);
  return it == table.end() ? -1 : it->second;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars,
         const std::map<std::string, double>& constants)
      : s_(text), vars_(vars), constants_(constants) {}

  NodePtr parse() {
    auto n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "expression '" << s_ << "': " << msg << " at offset " << pos_;
    throw ConfigError(os.str());
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Kind k, std::vector<NodePtr> args) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->args = std::move(args);
    return n;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Kind::Add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Kind::Sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Kind::Mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Kind::Div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      auto inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Constant;
    n->value = v;
    return n;
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id = s_.substr(start, pos_ - start);
    if (accept('(')) {
      const int arity = function_arity(id);
      if (arity < 0) fail("unknown function '" + id + "'");
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      if (!accept(')')) fail("expected ')'");
      if (static_cast<int>(args.size()) != arity) {
        fail("function '" + id + "' takes " + std::to_string(arity) + " argument(s)");
      }
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Call;
      n->fn = id;
      n->args = std::move(args);
      return n;
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == id) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::Variable;
        n->var = i;
        return n;
      }
    }
    if (const auto it = constants_.find(id); it != constants_.end()) {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Constant;
      n->value = it->second;
      return n;
    }
    if (id == "pi") {
      auto n = std::make_shared<Expression::Node>();
      n->value = 3.14159265358979323846;
      return n;
    }
    std::string known;
    for (const auto& v : vars_) known += (known.empty() ? "" : ", ") + v;
    for (const auto& [k, _] : constants_) known += (known.empty() ? "" : ", ") + k;
    fail("unknown name '" + id + "' (known: " + known + ")");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  const std::map<std::string, double>& constants_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& variables,
                             const std::map<std::string, double>& constants) {
  Expression e;
  e.root_ = Parser(text, variables, constants).parse();
  e.text_ = text;
  e.arity_ = variables.size();
  return e;
}

double Expression::operator()(std::span<const double> values) const {
  if (!root_) return 0.0;
  if (values.size() < arity_) {
    throw DomainError("expression '" + text_ + "': expected " + std::to_string(arity_) +
                      " values");
  }
  return root_->eval(values);
}

}  // namespace drsd
