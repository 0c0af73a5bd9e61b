#include "mtms/num/tape.hpp"

#include <string>

#include "mtms/num/conv.hpp"
#include "mtms/num/loss.hpp"
#include "mtms/num/lstm.hpp"

namespace mtms::num {

namespace {

ConvParams conv_view(const Mat& weight, const Mat& bias, int dilation, int kernel) {
  ConvParams p{weight, bias, dilation, kernel};
  validate(p);
  return p;
}

LstmParams lstm_view(const Mat& wx, const Mat& wh, const Mat& b) {
  LstmParams p{wx, wh, b};
  validate(p);
  return p;
}

}  // namespace

void GradientTape::check_live() const {
  if (consumed_) throw StateError("gradient tape already consumed by a reverse pass");
}

Var GradientTape::push(Mat value, std::initializer_list<Var> inputs, Backward backward) {
  check_live();
  Node n;
  n.value = std::move(value);
  if (record_) {
    for (Var in : inputs) n.needs_grad = n.needs_grad || nodes_.at(in.id).needs_grad;
    if (n.needs_grad) n.backward = std::move(backward);
  }
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

void GradientTape::accumulate(Var v, const Mat& g) {
  Node& n = nodes_[v.id];
  if (!n.needs_grad || g.size() == 0) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

Var GradientTape::constant(Mat value) {
  check_live();
  nodes_.push_back(Node{std::move(value), {}, {}, false});
  return Var{nodes_.size() - 1};
}

Var GradientTape::parameter(Mat value) {
  check_live();
  nodes_.push_back(Node{std::move(value), {}, {}, record_});
  params_.push_back(nodes_.size() - 1);
  return Var{nodes_.size() - 1};
}

Var GradientTape::conv1d_causal(Var x, Var weight, Var bias, int dilation, int kernel) {
  const ConvParams p = conv_view(value(weight), value(bias), dilation, kernel);
  Mat out = num::conv1d_causal(value(x), p);
  return push(std::move(out), {x, weight, bias}, [=](GradientTape& tape, const Mat& g) {
    const ConvParams q{tape.value(weight), tape.value(bias), dilation, kernel};
    ConvGradients cg = conv1d_causal_backward(tape.value(x), q, g, tape.needs_grad(x));
    tape.accumulate(x, cg.input);
    tape.accumulate(weight, cg.weight);
    tape.accumulate(bias, cg.bias);
  });
}

Var GradientTape::relu(Var x) {
  const Mat& in = value(x);
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    relu_signature_ = (relu_signature_ ^ static_cast<std::uint64_t>(in.data()[i] > 0.0)) * 1099511628211ull;
  }
  Mat out = in.unaryExpr(&num::relu<double>);
  return push(std::move(out), {x}, [=](GradientTape& tape, const Mat& g) {
    const Mat& in = tape.value(x);
    tape.accumulate(x, (in.array() > 0.0).select(g, 0.0));
  });
}

Var GradientTape::add(Var a, Var b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols()) {
    throw InvalidArgument("tape add: shape mismatch");
  }
  Mat out = value(a) + value(b);
  return push(std::move(out), {a, b}, [=](GradientTape& tape, const Mat& g) {
    tape.accumulate(a, g);
    tape.accumulate(b, g);
  });
}

Var GradientTape::scale(Var x, double factor) {
  Mat out = value(x) * factor;
  return push(std::move(out), {x},
              [=](GradientTape& tape, const Mat& g) { tape.accumulate(x, g * factor); });
}

Var GradientTape::dropout(Var x, const DropoutMask& mask) {
  if (mask.keep.rows() != value(x).rows() || mask.keep.cols() != value(x).cols()) {
    throw InvalidArgument("tape dropout: mask shape mismatch");
  }
  Mat factor = mask.keep * mask.scale;
  Mat out = value(x).cwiseProduct(factor);
  return push(std::move(out), {x}, [=, factor = std::move(factor)](GradientTape& tape, const Mat& g) {
    tape.accumulate(x, g.cwiseProduct(factor));
  });
}

Var GradientTape::softmax_rows(Var x) {
  Mat out = num::softmax_rows(value(x));
  const std::size_t self = nodes_.size();
  return push(std::move(out), {x}, [=](GradientTape& tape, const Mat& g) {
    const Mat& p = tape.nodes_[self].value;
    // dL/dz = p * (g - <g, p>) row by row.
    const Eigen::VectorXd dots = g.cwiseProduct(p).rowwise().sum();
    Mat gin = p.cwiseProduct(g - dots.replicate(1, g.cols()));
    tape.accumulate(x, gin);
  });
}

Var GradientTape::concat_cols(Var a, Var b) {
  const Mat& va = value(a);
  const Mat& vb = value(b);
  if (va.rows() != vb.rows()) throw InvalidArgument("tape concat_cols: frame count mismatch");
  Mat out(va.rows(), va.cols() + vb.cols());
  out << va, vb;
  const Eigen::Index split = va.cols();
  return push(std::move(out), {a, b}, [=](GradientTape& tape, const Mat& g) {
    tape.accumulate(a, g.leftCols(split));
    tape.accumulate(b, g.rightCols(g.cols() - split));
  });
}

Var GradientTape::softmax_xent(Var logits, std::span<const int> targets,
                               std::optional<std::span<const double>> class_weights) {
  XentResult r = num::softmax_xent(value(logits), targets, class_weights);
  Mat loss(1, 1);
  loss(0, 0) = r.loss;
  return push(std::move(loss), {logits},
              [=, grad = std::move(r.grad_logits)](GradientTape& tape, const Mat& g) {
                tape.accumulate(logits, grad * g(0, 0));
              });
}

Var GradientTape::sum(Var x) {
  Mat out(1, 1);
  out(0, 0) = value(x).sum();
  return push(std::move(out), {x}, [=](GradientTape& tape, const Mat& g) {
    const Mat& in = tape.value(x);
    tape.accumulate(x, Mat::Constant(in.rows(), in.cols(), g(0, 0)));
  });
}

Var GradientTape::lstm(Var x, Var input_weight, Var recurrent_weight, Var bias) {
  const LstmParams p = lstm_view(value(input_weight), value(recurrent_weight), value(bias));
  LstmTrace trace = lstm_forward(value(x), p);
  Mat hidden = trace.hidden;
  return push(std::move(hidden), {x, input_weight, recurrent_weight, bias},
              [=, trace = std::move(trace)](GradientTape& tape, const Mat& g) {
                const LstmParams q{tape.value(input_weight), tape.value(recurrent_weight),
                                   tape.value(bias)};
                LstmGradients lg = lstm_backward(tape.value(x), q, trace, g, tape.needs_grad(x));
                tape.accumulate(x, lg.input);
                tape.accumulate(input_weight, lg.input_weight);
                tape.accumulate(recurrent_weight, lg.recurrent_weight);
                tape.accumulate(bias, lg.bias);
              });
}

std::vector<Mat> GradientTape::reverse_pass(Var loss, double seed) {
  check_live();
  if (!record_) throw StateError("reverse_pass on a tape that did not record operations");
  const Mat& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) throw InvalidArgument("reverse_pass: loss must be a scalar");
  consumed_ = true;

  Mat seed_grad(1, 1);
  seed_grad(0, 0) = seed;
  accumulate(loss, seed_grad);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.size() == 0) continue;
    n.backward(*this, n.grad);
  }

  std::vector<Mat> grads;
  grads.reserve(params_.size());
  for (std::size_t id : params_) {
    const Node& n = nodes_[id];
    grads.push_back(n.grad.size() == 0 ? Mat::Zero(n.value.rows(), n.value.cols()) : n.grad);
  }
  return grads;
}

}  // namespace mtms::num
