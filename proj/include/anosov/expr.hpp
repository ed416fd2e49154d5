#pragma once
// Tiny arithmetic expression evaluator for surface specs, e.g.
//   "0.1*cos(2*pi*x/Lx) + 0.05*sin(2*pi*y/Ly)"
#include <map>
#include <memory>
#include <string>

namespace anosov {

class Expr {
 public:
  explicit Expr(const std::string& text);
  double operator()(const std::map<std::string, double>& vars) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace anosov
