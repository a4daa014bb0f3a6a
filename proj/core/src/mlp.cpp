#include "slicesim/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "slicesim/errors.hpp"

namespace slicesim {

Mlp::Mlp(std::span<const int> sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp: need input and output sizes");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    if (sizes[i] < 1 || sizes[i + 1] < 1) throw std::invalid_argument("mlp: empty layer");
    layers_.push_back({Eigen::MatrixXd::Zero(sizes[i + 1], sizes[i]),
                       Eigen::VectorXd::Zero(sizes[i + 1])});
  }
}

Mlp Mlp::glorot(std::span<const int> sizes, Rng& rng, double output_scale) {
  Mlp net(sizes);
  for (std::size_t l = 0; l < net.layers_.size(); ++l) {
    auto& w = net.layers_[l].weight;
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    const double scale = l + 1 == net.layers_.size() ? output_scale : 1.0;
    std::uniform_real_distribution<double> u(-limit, limit);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * u(rng);
    }
  }
  return net;
}

std::vector<int> Mlp::sizes() const {
  std::vector<int> out;
  if (layers_.empty()) return out;
  out.push_back(static_cast<int>(layers_.front().weight.cols()));
  for (const auto& l : layers_) out.push_back(static_cast<int>(l.weight.rows()));
  return out;
}

int Mlp::input_size() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int Mlp::output_size() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  if (x.size() != input_size()) {
    throw DimensionMismatch("mlp input", static_cast<std::size_t>(input_size()),
                            static_cast<std::size_t>(x.size()));
  }
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weight * a + layers_[l].bias;
    a = l + 1 < layers_.size() ? Eigen::VectorXd(z.array().tanh()) : z;
  }
  return a;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape* tape) const {
  if (x.rows() != input_size()) {
    throw DimensionMismatch("mlp input", static_cast<std::size_t>(input_size()),
                            static_cast<std::size_t>(x.rows()));
  }
  if (tape) {
    tape->activations.clear();
    tape->activations.push_back(x);
  }
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * a;
    z.colwise() += layers_[l].bias;
    a = l + 1 < layers_.size() ? Eigen::MatrixXd(z.array().tanh()) : std::move(z);
    if (tape) tape->activations.push_back(a);
  }
  return a;
}

MlpGradient Mlp::backward(const Tape& tape, const Eigen::MatrixXd& d_out) const {
  if (tape.activations.size() != layers_.size() + 1) {
    throw std::invalid_argument("mlp backward: tape does not match network depth");
  }
  MlpGradient grad(layers_.size());
  Eigen::MatrixXd delta = d_out;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Eigen::MatrixXd& input = tape.activations[l];
    grad[l].weight = delta * input.transpose();
    grad[l].bias = delta.rowwise().sum();
    if (l > 0) {
      // input = tanh(z) here, and tanh' = 1 - tanh^2.
      delta = (layers_[l].weight.transpose() * delta).array() * (1.0 - input.array().square());
    }
  }
  return grad;
}

void Mlp::descend(const MlpGradient& grad, double learning_rate) {
  if (grad.size() != layers_.size()) throw std::invalid_argument("mlp: gradient shape");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weight -= learning_rate * grad[l].weight;
    layers_[l].bias -= learning_rate * grad[l].bias;
  }
}

bool Mlp::all_finite() const { return slicesim::all_finite(layers_); }

std::vector<double> Mlp::flatten() const { return slicesim::flatten(layers_); }

void Mlp::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw DimensionMismatch("mlp parameters", parameter_count(), flat.size());
  }
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[k++];
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat[k++];
  }
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    const auto& x = a.layers_[l];
    const auto& y = b.layers_[l];
    if (x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols()) return false;
    if (x.weight != y.weight || x.bias != y.bias) return false;
  }
  return true;
}

bool all_finite(const MlpGradient& grad) {
  for (const auto& l : grad) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

std::vector<double> flatten(const MlpGradient& grad) {
  std::vector<double> out;
  for (const auto& l : grad) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(l.bias(r));
  }
  return out;
}

}  // namespace slicesim
