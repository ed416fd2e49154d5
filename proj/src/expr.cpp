#include "anosov/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace anosov {

struct Expr::Node {
  enum Kind { Num, Var, Neg, Bin, Call } kind;
  double value = 0;
  std::string name;
  char op = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodeP parse() {
    NodeP n = sum();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression '" + s_ + "': " + what + " at " +
                                std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
    return false;
  }
  static NodeP bin(char op, NodeP a, NodeP b) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Node::Bin;
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }
  NodeP sum() {
    NodeP a = product();
    for (;;) {
      if (eat('+')) a = bin('+', a, product());
      else if (eat('-')) a = bin('-', a, product());
      else return a;
    }
  }
  NodeP product() {
    NodeP a = unary();
    for (;;) {
      if (eat('*')) a = bin('*', a, unary());
      else if (eat('/')) a = bin('/', a, unary());
      else return a;
    }
  }
  NodeP unary() {
    if (eat('-')) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Neg;
      n->args = {unary()};
      return n;
    }
    if (eat('+')) return unary();
    return power();
  }
  NodeP power() {
    NodeP a = atom();
    if (eat('^')) return bin('^', a, unary());  // right associative
    return a;
  }
  NodeP atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (eat('(')) {
      NodeP n = sum();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      auto n = std::make_shared<Expr::Node>();
      n->kind = Expr::Node::Num;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      auto n = std::make_shared<Expr::Node>();
      n->name = s_.substr(b, pos_ - b);
      if (eat('(')) {
        n->kind = Expr::Node::Call;
        n->args = {sum()};
        if (!eat(')')) fail("expected ')'");
      } else {
        n->kind = Expr::Node::Var;
      }
      return n;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval(const Expr::Node& n, const std::map<std::string, double>& vars) {
  switch (n.kind) {
    case Expr::Node::Num: return n.value;
    case Expr::Node::Var: {
      if (n.name == "pi") return M_PI;
      auto it = vars.find(n.name);
      if (it == vars.end()) throw std::invalid_argument("unknown variable " + n.name);
      return it->second;
    }
    case Expr::Node::Neg: return -eval(*n.args[0], vars);
    case Expr::Node::Bin: {
      double a = eval(*n.args[0], vars), b = eval(*n.args[1], vars);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
      }
    }
    case Expr::Node::Call: {
      static const std::map<std::string, std::function<double(double)>> fn = {
          {"sin", [](double v) { return std::sin(v); }},
          {"cos", [](double v) { return std::cos(v); }},
          {"tan", [](double v) { return std::tan(v); }},
          {"exp", [](double v) { return std::exp(v); }},
          {"log", [](double v) { return std::log(v); }},
          {"sqrt", [](double v) { return std::sqrt(v); }},
          {"sinh", [](double v) { return std::sinh(v); }},
          {"cosh", [](double v) { return std::cosh(v); }},
          {"tanh", [](double v) { return std::tanh(v); }},
          {"abs", [](double v) { return std::fabs(v); }},
      };
      auto it = fn.find(n.name);
      if (it == fn.end()) throw std::invalid_argument("unknown function " + n.name);
      return it->second(eval(*n.args[0], vars));
    }
  }
  return 0;
}

}  // namespace

Expr::Expr(const std::string& text) : text_(text), root_(Parser(text_).parse()) {}

double Expr::operator()(const std::map<std::string, double>& vars) const {
  return eval(*root_, vars);
}

}  // namespace anosov
