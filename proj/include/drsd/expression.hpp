#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace drsd {

// Scalar arithmetic expression over a fixed list of named variables.
//
// Grammar (whitespace ignored):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: exp log sqrt abs sin cos tan tanh atan min max pow.
// Names not in the variable list are looked up in `constants`; anything else
// is a ConfigError. Evaluation is pure and thread-safe.
class Expression {
 public:
  Expression() = default;

  static Expression parse(const std::string& text, const std::vector<std::string>& variables,
                          const std::map<std::string, double>& constants = {});

  double operator()(std::span<const double> values) const;

  const std::string& text() const { return text_; }
  std::size_t arity() const { return arity_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  std::size_t arity_ = 0;
};

}  // namespace drsd
