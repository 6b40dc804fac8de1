#pragma once

#include <span>
#include <vector>

#include "ganssl/autodiff.hpp"
#include "ganssl/matrix.hpp"
#include "ganssl/rng.hpp"

namespace ganssl {

// Weights and biases of a fully connected ReLU network (hidden layers ReLU,
// output identity). weights[l] has shape dims[l+1] x dims[l], row-major.
struct MlpParams {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  std::size_t layer_count() const { return weights.size(); }
  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t parameter_count() const;

  // Glorot-uniform weights, zero biases.
  static MlpParams glorot(const std::vector<int>& dims, Rng& rng);
  static MlpParams zeros(const std::vector<int>& dims);

  std::vector<double> flatten() const;
  void unflatten(std::span<const double> flat);

  // Throws ShapeError/NumericError when shapes do not chain with layer_dims
  // or an entry is non-finite.
  void validate() const;
};

// Tape realization of the forward pass: records every intermediate so the
// tape can backpropagate through parameters and inputs alike.
struct MlpTapeResult {
  std::vector<Var> outputs;
  std::vector<Var> param_leaves;  // flatten() order
  std::vector<Var> input_leaves;
};

MlpTapeResult forward_mlp(Tape& tape, const MlpParams& params,
                          std::span<const double> input);

// Gradients accumulated by the batched backward pass, same layout as params.
struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  explicit MlpGrads(const MlpParams& params);
  void zero();
  std::vector<double> flatten() const;
};

// Batched forward/backward with cached activations. This is the training
// path; the tape path above is the reference it is checked against.
class MlpWorkspace {
 public:
  // X is batch x input_dim; returns batch x output_dim.
  const Matrix& forward(const MlpParams& params, const Matrix& input);

  // dLoss/dOutput in, accumulates parameter gradients; optionally returns
  // dLoss/dInput. Must follow a forward() with the same params/batch.
  void backward(const MlpParams& params, const Matrix& d_output,
                MlpGrads& grads, Matrix* d_input = nullptr);

 private:
  std::vector<Matrix> pre_;   // pre-activations per layer
  std::vector<Matrix> post_;  // post-activations (post_[0] is the input)
};

}  // namespace ganssl
