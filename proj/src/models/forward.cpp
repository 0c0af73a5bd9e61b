#include "mtms/models/forward.hpp"

#include <string>

#include "mtms/num/loss.hpp"

namespace mtms::models {

namespace {

using num::GradientTape;
using num::Var;

// Hands out the registered parameter Vars in declaration order.
class ParamCursor {
 public:
  ParamCursor(GradientTape& tape, const ModelParams& params) {
    for_each_param(params, [&](const Mat& m) { vars_.push_back(tape.parameter(m)); });
  }
  Var next() { return vars_.at(pos_++); }
  bool exhausted() const { return pos_ == vars_.size(); }

 private:
  std::vector<Var> vars_;
  std::size_t pos_ = 0;
};

Var conv(GradientTape& tape, ParamCursor& cursor, Var x, const ConvParams& p) {
  const Var w = cursor.next();
  const Var b = cursor.next();
  return tape.conv1d_causal(x, w, b, p.dilation, p.kernel);
}

TapeHeads heads(GradientTape& tape, ParamCursor& cursor, Var x, const HeadParams& h) {
  TapeHeads out;
  if (h.phase) out.phase_logits = conv(tape, cursor, x, *h.phase);
  if (h.step) out.step_logits = conv(tape, cursor, x, *h.step);
  return out;
}

void check_features(const ModelParams& params, const Mat& features) {
  num::check_sequence(features, "forward");
  if (features.cols() != params.config.input_dim) {
    throw InvalidArgument("forward: features have dimension " + std::to_string(features.cols()) +
                          ", model expects " + std::to_string(params.config.input_dim));
  }
}

StageOutputs collect(const GradientTape& tape, const std::vector<TapeHeads>& vars) {
  StageOutputs out;
  for (const auto& v : vars) {
    out.stages.push_back(finish_stage(v.phase_logits ? tape.value(*v.phase_logits) : Mat(),
                                      v.step_logits ? tape.value(*v.step_logits) : Mat()));
  }
  return out;
}

void require_arch(const ModelParams& params, Architecture arch, const char* what) {
  if (params.arch() != arch) {
    throw InvalidArgument(std::string(what) + ": model architecture is " + to_string(params.arch()));
  }
}

}  // namespace

StageOutput finish_stage(Mat phase_logits, Mat step_logits) {
  StageOutput s;
  auto labels = [](const Mat& probs) {
    std::vector<int> y(static_cast<std::size_t>(probs.rows()));
    for (Eigen::Index t = 0; t < probs.rows(); ++t) {
      y[static_cast<std::size_t>(t)] = num::argmax_row(probs.row(t).data(), probs.cols());
    }
    return y;
  };
  if (phase_logits.size() > 0) {
    s.phase_probs = num::softmax_rows(phase_logits);
    s.phase_labels = labels(s.phase_probs);
  }
  if (step_logits.size() > 0) {
    s.step_probs = num::softmax_rows(step_logits);
    s.step_labels = labels(s.step_probs);
  }
  s.phase_logits = std::move(phase_logits);
  s.step_logits = std::move(step_logits);
  return s;
}

std::vector<TapeHeads> record_forward(GradientTape& tape, const ModelParams& params, const Mat& features,
                                      const ForwardOptions& options) {
  check_features(params, features);
  const TcnConfig& c = params.config;
  const bool dropout = options.training && c.dropout > 0.0;
  if (dropout && options.rng == nullptr) throw InvalidArgument("forward: training with dropout needs an rng");

  ParamCursor cursor(tape, params);
  Var x = tape.constant(features);
  std::vector<TapeHeads> out;
  switch (params.arch()) {
    case Architecture::tcn:
      for (const auto& stage : params.stages) {
        Var h = conv(tape, cursor, x, stage.input);
        for (const auto& block : stage.blocks) {
          Var branch = tape.relu(conv(tape, cursor, h, block.dilated));
          branch = conv(tape, cursor, branch, block.pointwise);
          if (dropout) {
            const Mat& v = tape.value(branch);
            branch = tape.dropout(branch, num::sample_dropout_mask(v.rows(), v.cols(), c.dropout, *options.rng));
          }
          h = tape.add(h, branch);
        }
        TapeHeads logits = heads(tape, cursor, h, stage.heads);
        out.push_back(logits);
        if (logits.phase_logits && logits.step_logits) {
          x = tape.concat_cols(tape.softmax_rows(*logits.phase_logits), tape.softmax_rows(*logits.step_logits));
        } else {
          x = tape.softmax_rows(logits.phase_logits ? *logits.phase_logits : *logits.step_logits);
        }
      }
      break;
    case Architecture::lstm: {
      const Var wx = cursor.next();
      const Var wh = cursor.next();
      const Var b = cursor.next();
      out.push_back(heads(tape, cursor, tape.lstm(x, wx, wh, b), params.heads));
      break;
    }
    case Architecture::framewise: {
      const Var h = tape.relu(conv(tape, cursor, x, *params.hidden));
      out.push_back(heads(tape, cursor, h, params.heads));
      break;
    }
  }
  if (!cursor.exhausted()) throw StateError("record_forward: not every parameter was used");
  return out;
}

StageOutputs forward(const ModelParams& params, const Mat& features, const ForwardOptions& options) {
  GradientTape tape(false);
  return collect(tape, record_forward(tape, params, features, options));
}

StageOutputs forward_mtms_tcn(const ModelParams& params, const Mat& features, bool training, num::Rng* rng) {
  require_arch(params, Architecture::tcn, "forward_mtms_tcn");
  return forward(params, features, {training, rng});
}

StageOutputs forward_framewise(const ModelParams& params, const Mat& features) {
  require_arch(params, Architecture::framewise, "forward_framewise");
  return forward(params, features);
}

StageOutputs forward_lstm(const ModelParams& params, const Mat& features) {
  require_arch(params, Architecture::lstm, "forward_lstm");
  return forward(params, features);
}

}  // namespace mtms::models
