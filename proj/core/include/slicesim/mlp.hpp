#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "slicesim/rng.hpp"

namespace slicesim {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

using MlpGradient = std::vector<DenseLayer>;

// Fully connected network: tanh on hidden layers, raw linear output.
class Mlp {
 public:
  // Activations of every layer for a batch; columns are samples.
  struct Tape {
    std::vector<Eigen::MatrixXd> activations;
  };

  Mlp() = default;
  // Zero-initialized network with the given layer widths (input first).
  explicit Mlp(std::span<const int> sizes);

  // Glorot-uniform weights, zero biases; the last layer is scaled by
  // `output_scale` so a fresh policy starts close to uniform.
  static Mlp glorot(std::span<const int> sizes, Rng& rng, double output_scale = 1.0);

  std::vector<int> sizes() const;
  int input_size() const;
  int output_size() const;
  std::size_t parameter_count() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape* tape) const;

  // Parameter gradient of sum_ij d_out(i,j) * out(i,j) for the batch recorded
  // in `tape`.
  MlpGradient backward(const Tape& tape, const Eigen::MatrixXd& d_out) const;

  void descend(const MlpGradient& grad, double learning_rate);
  bool all_finite() const;

  // Row-major weights then bias, layer by layer.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  std::vector<DenseLayer> layers_;
};

bool all_finite(const MlpGradient& grad);
std::vector<double> flatten(const MlpGradient& grad);

}  // namespace slicesim
