#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "meqc/errors.hpp"
#include "meqc/rng.hpp"

namespace meqc {

enum class Activation { kTanh, kIdentity };

/// Fully connected network with a flat parameter vector. Layer l stores its
/// weight matrix (out x in, column-major) followed by its bias. Hidden layers
/// use `activation`; the output layer is always linear. Inputs and outputs
/// are column-per-sample matrices.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Mlp() = default;

  explicit Mlp(std::vector<int> widths, Activation activation = Activation::kTanh)
      : widths_(std::move(widths)), activation_(activation) {
    if (widths_.size() < 2) throw ContractError("Mlp: need at least input and output widths");
    Eigen::Index offset = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      if (widths_[l] < 1 || widths_[l + 1] < 1) throw ContractError("Mlp: widths must be >= 1");
      offsets_.push_back(offset);
      offset += static_cast<Eigen::Index>(widths_[l + 1]) * (widths_[l] + 1);
    }
    params_ = Vector::Zero(offset);
  }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)); the output layer is further
  // scaled by `output_gain`.
  void initialize(Rng& rng, Scalar output_gain = Scalar(1)) {
    for (std::size_t l = 0; l < num_layers(); ++l) {
      const Scalar bound = Scalar(1) / std::sqrt(Scalar(widths_[l]));
      const Scalar gain = l + 1 == num_layers() ? output_gain : Scalar(1);
      auto w = weight(l);
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i)
          w(i, j) = gain * Scalar(rng.uniform(-1.0, 1.0)) * bound;
      auto b = bias(l);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = gain * Scalar(rng.uniform(-1.0, 1.0)) * bound;
    }
  }

  std::size_t num_layers() const { return widths_.size() - 1; }
  const std::vector<int>& widths() const { return widths_; }
  Activation activation() const { return activation_; }
  int input_size() const { return widths_.front(); }
  int output_size() const { return widths_.back(); }
  Eigen::Index num_params() const { return params_.size(); }

  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  Eigen::Map<Matrix> weight(std::size_t l) {
    return {params_.data() + offsets_[l], widths_[l + 1], widths_[l]};
  }
  Eigen::Map<const Matrix> weight(std::size_t l) const {
    return {params_.data() + offsets_[l], widths_[l + 1], widths_[l]};
  }
  Eigen::Map<Vector> bias(std::size_t l) {
    return {params_.data() + offsets_[l] + weight_size(l), widths_[l + 1]};
  }
  Eigen::Map<const Vector> bias(std::size_t l) const {
    return {params_.data() + offsets_[l] + weight_size(l), widths_[l + 1]};
  }

  // Layer outputs kept for the backward pass; activations[0] is the input.
  struct Tape {
    std::vector<Matrix> activations;
  };

  Matrix forward(const Eigen::Ref<const Matrix>& input, Tape* tape = nullptr) const {
    check_input(input);
    Matrix a = input;
    if (tape) {
      tape->activations.clear();
      tape->activations.push_back(a);
    }
    for (std::size_t l = 0; l < num_layers(); ++l) {
      Matrix z = weight(l) * a;
      z.colwise() += bias(l);
      if (l + 1 < num_layers() && activation_ == Activation::kTanh) z = z.array().tanh().matrix();
      a = std::move(z);
      if (tape) tape->activations.push_back(a);
    }
    return a;
  }

  /// Reverse-mode gradient of sum_{i,j} upstream(i,j) * output(i,j) with
  /// respect to the flat parameters. `input_grad`, when given, receives the
  /// gradient with respect to the inputs.
  Vector backward(const Tape& tape, const Eigen::Ref<const Matrix>& upstream,
                  Matrix* input_grad = nullptr) const {
    if (upstream.rows() != output_size() || upstream.cols() != tape.activations.front().cols())
      throw ContractError("Mlp::backward: upstream shape mismatch");
    if (!upstream.allFinite())
      throw TrainingError("Mlp::backward: non-finite upstream gradient");
    Vector grad(params_.size());
    Matrix delta = upstream;
    for (std::size_t l = num_layers(); l-- > 0;) {
      const Matrix& below = tape.activations[l];
      Eigen::Map<Matrix>(grad.data() + offsets_[l], widths_[l + 1], widths_[l]).noalias() =
          delta * below.transpose();
      Eigen::Map<Vector>(grad.data() + offsets_[l] + weight_size(l), widths_[l + 1]) =
          delta.rowwise().sum();
      if (l == 0 && !input_grad) break;
      Matrix next = weight(l).transpose() * delta;
      if (l > 0 && activation_ == Activation::kTanh)
        next.array() *= Scalar(1) - below.array().square();
      delta = std::move(next);
    }
    if (input_grad) *input_grad = std::move(delta);
    if (!grad.allFinite()) throw TrainingError("Mlp::backward: non-finite parameter gradient");
    return grad;
  }

  Vector gradients(const Eigen::Ref<const Matrix>& input,
                   const Eigen::Ref<const Matrix>& upstream) const {
    Tape tape;
    forward(input, &tape);
    return backward(tape, upstream);
  }

 private:
  Eigen::Index weight_size(std::size_t l) const {
    return static_cast<Eigen::Index>(widths_[l + 1]) * widths_[l];
  }

  void check_input(const Eigen::Ref<const Matrix>& input) const {
    if (input.rows() != input_size())
      throw ContractError("Mlp::forward: input has " + std::to_string(input.rows()) +
                          " rows, expected " + std::to_string(input_size()));
  }

  std::vector<int> widths_;
  Activation activation_ = Activation::kTanh;
  std::vector<Eigen::Index> offsets_;
  Vector params_;
};

template <typename Scalar>
typename Mlp<Scalar>::Matrix forward(const Mlp<Scalar>& net,
                                     const Eigen::Ref<const typename Mlp<Scalar>::Matrix>& input) {
  return net.forward(input);
}

template <typename Scalar>
typename Mlp<Scalar>::Vector gradients(const Mlp<Scalar>& net,
                                       const Eigen::Ref<const typename Mlp<Scalar>::Matrix>& input,
                                       const Eigen::Ref<const typename Mlp<Scalar>::Matrix>& upstream) {
  return net.gradients(input, upstream);
}

// Adam on a flat parameter vector.
template <typename Scalar>
class Adam {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit Adam(Eigen::Index size, Scalar learning_rate = Scalar(1e-3))
      : lr_(learning_rate), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

  void step(Vector& params, const Vector& grad) {
    ++t_;
    m_ = beta1_ * m_ + (Scalar(1) - beta1_) * grad;
    v_ = beta2_ * v_ + (Scalar(1) - beta2_) * grad.cwiseAbs2();
    const Scalar c1 = Scalar(1) - std::pow(beta1_, Scalar(t_));
    const Scalar c2 = Scalar(1) - std::pow(beta2_, Scalar(t_));
    params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

  Scalar learning_rate() const { return lr_; }

 private:
  Scalar lr_;
  Scalar beta1_ = Scalar(0.9);
  Scalar beta2_ = Scalar(0.999);
  Scalar eps_ = Scalar(1e-8);
  Vector m_, v_;
  long t_ = 0;
};

}  // namespace meqc
