#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ganssl/common.hpp"

namespace ganssl {

using NodeId = std::int32_t;

// Reverse-mode tape over scalars. Each node stores its value and the local
// derivatives with respect to its parents, computed at forward time; nodes
// are appended in topological order by construction, so the reverse pass is
// a single backward scan. Graphs are immutable once built.
class Tape {
 public:
  NodeId leaf(double value) { return push(value, {}, {}); }

  NodeId unary(NodeId a, double value, double dda) {
    return push(value, {&a, 1}, {&dda, 1});
  }

  NodeId binary(NodeId a, NodeId b, double value, double dda, double ddb) {
    const NodeId ids[2] = {a, b};
    const double ws[2] = {dda, ddb};
    return push(value, ids, ws);
  }

  // Fused node with an arbitrary number of parents; `weights[i]` is
  // d(value)/d(parents[i]) evaluated at the forward point.
  NodeId nary(std::span<const NodeId> parents, double value,
              std::span<const double> weights) {
    return push(value, parents, weights);
  }

  double value(NodeId id) const { return values_[static_cast<std::size_t>(id)]; }

  std::size_t size() const { return values_.size(); }

  // Gradients of the scalar `output` with respect to every node.
  std::vector<double> backward(NodeId output) const;

  void clear() {
    values_.clear();
    edge_start_.assign(1, 0);
    edge_parent_.clear();
    edge_weight_.clear();
  }

 private:
  NodeId push(double value, std::span<const NodeId> parents,
              std::span<const double> weights);

  std::vector<double> values_;
  std::vector<std::size_t> edge_start_{0};  // per node, into the edge arrays
  std::vector<NodeId> edge_parent_;
  std::vector<double> edge_weight_;
};

// Handle for building expressions on a tape.
struct Var {
  Tape* tape = nullptr;
  NodeId id = -1;

  double value() const { return tape->value(id); }
};

inline Var make_var(Tape& t, double v) { return {&t, t.leaf(v)}; }

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var vexp(Var a);
Var vlog(Var a);      // argument clamped at the density floor
Var vrelu(Var a);     // subgradient at 0 is 0
Var vtanh(Var a);
Var vpow(Var a, double e);

// An objective with an analytic gradient, whatever machinery produced it
// (tape or hand-written backprop). Used by grad_check.
struct DiffObjective {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;
};

// Builds a DiffObjective from a tape expression: `build` receives leaf vars
// for the parameters and must return the scalar output var.
DiffObjective tape_objective(
    std::function<Var(Tape&, std::span<const Var>)> build);

// Max over parameters of |analytic - central difference| / max(1, |cdiff|).
double grad_check(const DiffObjective& objective, std::span<const double> at,
                  double step);

}  // namespace ganssl
