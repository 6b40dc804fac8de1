#include "ganssl/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace ganssl {

NodeId Tape::push(double value, std::span<const NodeId> parents,
                  std::span<const double> weights) {
  const NodeId id = static_cast<NodeId>(values_.size());
  values_.push_back(value);
  edge_parent_.insert(edge_parent_.end(), parents.begin(), parents.end());
  edge_weight_.insert(edge_weight_.end(), weights.begin(), weights.end());
  edge_start_.push_back(edge_parent_.size());
  return id;
}

std::vector<double> Tape::backward(NodeId output) const {
  std::vector<double> grad(values_.size(), 0.0);
  grad[static_cast<std::size_t>(output)] = 1.0;
  for (std::size_t i = static_cast<std::size_t>(output) + 1; i-- > 0;) {
    const double g = grad[i];
    if (g == 0.0) continue;
    for (std::size_t e = edge_start_[i]; e < edge_start_[i + 1]; ++e) {
      grad[static_cast<std::size_t>(edge_parent_[e])] += g * edge_weight_[e];
    }
  }
  return grad;
}

Var operator+(Var a, Var b) {
  return {a.tape, a.tape->binary(a.id, b.id, a.value() + b.value(), 1.0, 1.0)};
}
Var operator-(Var a, Var b) {
  return {a.tape, a.tape->binary(a.id, b.id, a.value() - b.value(), 1.0, -1.0)};
}
Var operator*(Var a, Var b) {
  return {a.tape,
          a.tape->binary(a.id, b.id, a.value() * b.value(), b.value(), a.value())};
}
Var operator/(Var a, Var b) {
  const double bv = b.value();
  return {a.tape, a.tape->binary(a.id, b.id, a.value() / bv, 1.0 / bv,
                                 -a.value() / (bv * bv))};
}
Var operator-(Var a) { return {a.tape, a.tape->unary(a.id, -a.value(), -1.0)}; }
Var operator+(Var a, double b) {
  return {a.tape, a.tape->unary(a.id, a.value() + b, 1.0)};
}
Var operator+(double a, Var b) { return b + a; }
Var operator-(Var a, double b) { return a + (-b); }
Var operator-(double a, Var b) {
  return {b.tape, b.tape->unary(b.id, a - b.value(), -1.0)};
}
Var operator*(Var a, double b) {
  return {a.tape, a.tape->unary(a.id, a.value() * b, b)};
}
Var operator*(double a, Var b) { return b * a; }
Var operator/(Var a, double b) { return a * (1.0 / b); }

Var vexp(Var a) {
  const double v = std::exp(a.value());
  return {a.tape, a.tape->unary(a.id, v, v)};
}
Var vlog(Var a) {
  const double x = std::max(a.value(), kDensityFloor);
  return {a.tape, a.tape->unary(a.id, std::log(x),
                                a.value() > kDensityFloor ? 1.0 / x : 0.0)};
}
Var vrelu(Var a) {
  const bool on = a.value() > 0.0;
  return {a.tape, a.tape->unary(a.id, on ? a.value() : 0.0, on ? 1.0 : 0.0)};
}
Var vtanh(Var a) {
  const double t = std::tanh(a.value());
  return {a.tape, a.tape->unary(a.id, t, 1.0 - t * t)};
}
Var vpow(Var a, double e) {
  const double v = std::pow(a.value(), e);
  return {a.tape, a.tape->unary(a.id, v, e * std::pow(a.value(), e - 1.0))};
}

DiffObjective tape_objective(
    std::function<Var(Tape&, std::span<const Var>)> build) {
  auto run = [build](std::span<const double> at, std::vector<double>* grad_out) {
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(at.size());
    for (double v : at) leaves.push_back(make_var(tape, v));
    Var out = build(tape, leaves);
    if (!std::isfinite(out.value())) {
      throw NumericError("tape objective produced a non-finite value");
    }
    if (grad_out) {
      const auto g = tape.backward(out.id);
      grad_out->resize(at.size());
      for (std::size_t i = 0; i < at.size(); ++i) {
        (*grad_out)[i] = g[static_cast<std::size_t>(leaves[i].id)];
      }
    }
    return out.value();
  };
  DiffObjective obj;
  obj.value = [run](std::span<const double> at) { return run(at, nullptr); };
  obj.gradient = [run](std::span<const double> at) {
    std::vector<double> g;
    run(at, &g);
    return g;
  };
  return obj;
}

double grad_check(const DiffObjective& objective, std::span<const double> at,
                  double step) {
  if (!(step > 0.0)) throw NumericError("grad_check: step must be positive");
  const std::vector<double> analytic = objective.gradient(at);
  std::vector<double> point(at.begin(), at.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + step;
    const double up = objective.value(point);
    point[i] = saved - step;
    const double down = objective.value(point);
    point[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("grad_check: non-finite objective value");
    }
    const double cdiff = (up - down) / (2.0 * step);
    const double err = std::abs(analytic[i] - cdiff) / std::max(1.0, std::abs(cdiff));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace ganssl
