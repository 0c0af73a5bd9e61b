#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mtms/num/residual.hpp"
#include "mtms/num/tensor.hpp"

namespace mtms::num {

// Handle to a value recorded on a GradientTape.
struct Var {
  std::size_t id = 0;
};

// Reverse-mode recorder over whole-sequence operations.
//
// Parameters are registered in order with parameter(); reverse_pass returns
// one gradient per registered parameter in that same order. A tape supports a
// single reverse pass. With `record == false` only values are kept, which is
// what inference uses.
class GradientTape {
 public:
  explicit GradientTape(bool record = true) : record_(record) {}

  GradientTape(const GradientTape&) = delete;
  GradientTape& operator=(const GradientTape&) = delete;

  Var constant(Mat value);
  Var parameter(Mat value);

  const Mat& value(Var v) const { return nodes_.at(v.id).value; }
  std::size_t parameter_count() const { return params_.size(); }
  std::size_t size() const { return nodes_.size(); }
  bool recording() const { return record_; }
  bool consumed() const { return consumed_; }
  // Hash of the sign pattern of every relu input seen so far. Equal values
  // mean the relus were evaluated on the same linear piece.
  std::uint64_t relu_signature() const { return relu_signature_; }

  Var conv1d_causal(Var x, Var weight, Var bias, int dilation, int kernel);
  Var relu(Var x);
  Var add(Var a, Var b);
  Var scale(Var x, double factor);
  Var dropout(Var x, const DropoutMask& mask);
  Var softmax_rows(Var x);
  Var concat_cols(Var a, Var b);
  // 1x1 loss value; see num::softmax_xent.
  Var softmax_xent(Var logits, std::span<const int> targets,
                   std::optional<std::span<const double>> class_weights = std::nullopt);
  Var sum(Var x);
  // Hidden-state sequence of a unidirectional LSTM.
  Var lstm(Var x, Var input_weight, Var recurrent_weight, Var bias);

  // d(seed * loss)/d(parameter) for every registered parameter. `loss` must
  // be a 1x1 value.
  std::vector<Mat> reverse_pass(Var loss, double seed = 1.0);

 private:
  using Backward = std::function<void(GradientTape&, const Mat& grad)>;

  struct Node {
    Mat value;
    Mat grad;
    Backward backward;
    bool needs_grad = false;
  };

  Var push(Mat value, std::initializer_list<Var> inputs, Backward backward);
  void accumulate(Var v, const Mat& g);
  bool needs_grad(Var v) const { return nodes_[v.id].needs_grad; }
  void check_live() const;

  std::vector<Node> nodes_;
  std::vector<std::size_t> params_;
  bool record_;
  bool consumed_ = false;
  std::uint64_t relu_signature_ = 14695981039346656037ull;
};

}  // namespace mtms::num
