#include "ganssl/mlp.hpp"

#include <cmath>
#include <string>

namespace ganssl {

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].data.size() + biases[l].size();
  }
  return n;
}

MlpParams MlpParams::glorot(const std::vector<int>& dims, Rng& rng) {
  MlpParams p = zeros(dims);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const double fan_in = static_cast<double>(dims[l]);
    const double fan_out = static_cast<double>(dims[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& w : p.weights[l].data) w = rng.uniform(-limit, limit);
  }
  return p;
}

MlpParams MlpParams::zeros(const std::vector<int>& dims) {
  if (dims.size() < 2) throw ShapeError("mlp needs at least two layer dims");
  for (int d : dims) {
    if (d <= 0) throw ShapeError("mlp layer dims must be positive");
  }
  MlpParams p;
  p.layer_dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    p.weights.emplace_back(static_cast<std::size_t>(dims[l + 1]),
                           static_cast<std::size_t>(dims[l]));
    p.biases.emplace_back(static_cast<std::size_t>(dims[l + 1]), 0.0);
  }
  return p;
}

std::vector<double> MlpParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].data.begin(), weights[l].data.end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  return flat;
}

void MlpParams::unflatten(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw ShapeError("unflatten: parameter count mismatch");
  }
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (double& w : weights[l].data) w = flat[k++];
    for (double& b : biases[l]) b = flat[k++];
  }
}

void MlpParams::validate() const {
  if (layer_dims.size() < 2 || weights.size() != layer_dims.size() - 1 ||
      biases.size() != weights.size()) {
    throw ShapeError("mlp: layer bookkeeping inconsistent");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows != static_cast<std::size_t>(layer_dims[l + 1]) ||
        weights[l].cols != static_cast<std::size_t>(layer_dims[l]) ||
        biases[l].size() != static_cast<std::size_t>(layer_dims[l + 1])) {
      throw ShapeError("mlp: weight shapes do not chain with layer_dims at layer " +
                       std::to_string(l));
    }
    for (double w : weights[l].data) {
      if (!std::isfinite(w)) throw NumericError("mlp: non-finite weight");
    }
    for (double b : biases[l]) {
      if (!std::isfinite(b)) throw NumericError("mlp: non-finite bias");
    }
  }
}

MlpTapeResult forward_mlp(Tape& tape, const MlpParams& params,
                          std::span<const double> input) {
  params.validate();
  if (input.size() != static_cast<std::size_t>(params.input_dim())) {
    throw ShapeError("forward_mlp: input length " + std::to_string(input.size()) +
                     " does not match layer_dims[0]=" +
                     std::to_string(params.input_dim()));
  }
  MlpTapeResult result;
  // Leaves in flatten() order so gradients line up with optimizer vectors.
  std::vector<std::vector<Var>> w_leaves(params.layer_count());
  std::vector<std::vector<Var>> b_leaves(params.layer_count());
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    for (double w : params.weights[l].data) {
      w_leaves[l].push_back(make_var(tape, w));
      result.param_leaves.push_back(w_leaves[l].back());
    }
    for (double b : params.biases[l]) {
      b_leaves[l].push_back(make_var(tape, b));
      result.param_leaves.push_back(b_leaves[l].back());
    }
  }
  std::vector<Var> act;
  for (double x : input) {
    act.push_back(make_var(tape, x));
    result.input_leaves.push_back(act.back());
  }
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const std::size_t out_n = params.weights[l].rows;
    const std::size_t in_n = params.weights[l].cols;
    std::vector<Var> next;
    next.reserve(out_n);
    for (std::size_t o = 0; o < out_n; ++o) {
      Var acc = b_leaves[l][o];
      for (std::size_t i = 0; i < in_n; ++i) {
        acc = acc + w_leaves[l][o * in_n + i] * act[i];
      }
      const bool hidden = l + 1 < params.layer_count();
      next.push_back(hidden ? vrelu(acc) : acc);
    }
    act = std::move(next);
  }
  result.outputs = std::move(act);
  return result;
}

MlpGrads::MlpGrads(const MlpParams& params) {
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    weights.emplace_back(params.weights[l].rows, params.weights[l].cols);
    biases.emplace_back(params.biases[l].size(), 0.0);
  }
}

void MlpGrads::zero() {
  for (auto& w : weights) w.zero();
  for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

std::vector<double> MlpGrads::flatten() const {
  std::vector<double> flat;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].data.begin(), weights[l].data.end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  return flat;
}

const Matrix& MlpWorkspace::forward(const MlpParams& params, const Matrix& input) {
  if (input.cols != static_cast<std::size_t>(params.input_dim())) {
    throw ShapeError("mlp forward: batch input width mismatch");
  }
  const std::size_t layers = params.layer_count();
  pre_.resize(layers);
  post_.resize(layers + 1);
  post_[0] = input;
  for (std::size_t l = 0; l < layers; ++l) {
    const Matrix& w = params.weights[l];
    const auto& b = params.biases[l];
    const Matrix& x = post_[l];
    Matrix& y = pre_[l];
    y.resize(x.rows, w.rows);
    for (std::size_t n = 0; n < x.rows; ++n) {
      const double* xn = x.row(n);
      double* yn = y.row(n);
      for (std::size_t o = 0; o < w.rows; ++o) {
        const double* wo = w.row(o);
        double acc = b[o];
        for (std::size_t i = 0; i < w.cols; ++i) acc += wo[i] * xn[i];
        yn[o] = acc;
      }
    }
    const bool hidden = l + 1 < layers;
    post_[l + 1] = y;
    if (hidden) {
      for (double& v : post_[l + 1].data) v = v > 0.0 ? v : 0.0;
    }
  }
  return post_[layers];
}

void MlpWorkspace::backward(const MlpParams& params, const Matrix& d_output,
                            MlpGrads& grads, Matrix* d_input) {
  const std::size_t layers = params.layer_count();
  if (d_output.rows != post_[layers].rows ||
      d_output.cols != post_[layers].cols) {
    throw ShapeError("mlp backward: d_output shape mismatch");
  }
  Matrix delta = d_output;
  for (std::size_t l = layers; l-- > 0;) {
    const Matrix& w = params.weights[l];
    const Matrix& x = post_[l];
    const bool hidden = l + 1 < layers;
    if (hidden) {
      // ReLU mask from the pre-activations; subgradient 0 at exactly 0.
      const Matrix& z = pre_[l];
      for (std::size_t k = 0; k < delta.data.size(); ++k) {
        if (!(z.data[k] > 0.0)) delta.data[k] = 0.0;
      }
    }
    Matrix& dw = grads.weights[l];
    auto& db = grads.biases[l];
    for (std::size_t n = 0; n < x.rows; ++n) {
      const double* xn = x.row(n);
      const double* dn = delta.row(n);
      for (std::size_t o = 0; o < w.rows; ++o) {
        const double d = dn[o];
        if (d == 0.0) continue;
        db[o] += d;
        double* dwo = dw.row(o);
        for (std::size_t i = 0; i < w.cols; ++i) dwo[i] += d * xn[i];
      }
    }
    const bool need_dx = l > 0 || d_input != nullptr;
    if (!need_dx) break;
    Matrix dx(x.rows, w.cols);
    for (std::size_t n = 0; n < x.rows; ++n) {
      const double* dn = delta.row(n);
      double* dxn = dx.row(n);
      for (std::size_t o = 0; o < w.rows; ++o) {
        const double d = dn[o];
        if (d == 0.0) continue;
        const double* wo = w.row(o);
        for (std::size_t i = 0; i < w.cols; ++i) dxn[i] += d * wo[i];
      }
    }
    if (l == 0) {
      if (d_input) *d_input = std::move(dx);
    } else {
      delta = std::move(dx);
    }
  }
}

}  // namespace ganssl
