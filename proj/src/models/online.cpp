#include "mtms/models/online.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtms/num/loss.hpp"

namespace mtms::models {

OnlineSession::RowHistory::RowHistory(Eigen::Index width, int span) : rows_(Mat::Zero(span + 1, width)) {}

void OnlineSession::RowHistory::push(const double* row) {
  const Eigen::Index slot = count_ % rows_.rows();
  std::copy(row, row + rows_.cols(), rows_.row(slot).data());
  ++count_;
}

const double* OnlineSession::RowHistory::back(int offset) const {
  const long frame = count_ - 1 - offset;
  if (frame < 0) return nullptr;
  return rows_.row(frame % rows_.rows()).data();
}

OnlineSession::OnlineSession(const ModelParams& params)
    : params_(&params), lstm_state_(params.lstm ? params.lstm->hidden() : 1) {
  validate(params);
  for (const auto& stage : params.stages) {
    StageState s;
    for (const auto& block : stage.blocks) s.block_inputs.emplace_back(block.dilated.in_channels(), block.dilated.history());
    stages_.push_back(std::move(s));
  }
}

void OnlineSession::conv(const ConvParams& p, const double* x, double* out) {
  const double* taps[1] = {x};
  num::conv_row<double>(p, taps, out);
}

void OnlineSession::run_heads(const HeadParams& heads, const double* x, FramePrediction& out, Mat& phase_logits,
                              Mat& step_logits) {
  if (heads.phase) {
    phase_logits.resize(1, heads.phase->out_channels());
    conv(*heads.phase, x, phase_logits.data());
    out.phase_probs.resize(1, phase_logits.cols());
    num::softmax_row(phase_logits.data(), phase_logits.cols(), out.phase_probs.data());
    out.phase_label = num::argmax_row(out.phase_probs.data(), out.phase_probs.cols());
  } else {
    out.phase_probs.resize(0, 0);
    out.phase_label = -1;
  }
  if (heads.step) {
    step_logits.resize(1, heads.step->out_channels());
    conv(*heads.step, x, step_logits.data());
    out.step_probs.resize(1, step_logits.cols());
    num::softmax_row(step_logits.data(), step_logits.cols(), out.step_probs.data());
    out.step_label = num::argmax_row(out.step_probs.data(), out.step_probs.cols());
  } else {
    out.step_probs.resize(0, 0);
    out.step_label = -1;
  }
}

FramePrediction OnlineSession::push(std::span<const double> frame) {
  const ModelParams& p = *params_;
  if (static_cast<int>(frame.size()) != p.config.input_dim) {
    throw InvalidArgument("predict_online: frame has " + std::to_string(frame.size()) + " values, model expects " +
                          std::to_string(p.config.input_dim));
  }
  for (double v : frame) {
    if (!std::isfinite(v)) throw NumericError("predict_online: non-finite feature value");
  }

  FramePrediction out;
  Mat phase_logits, step_logits;
  switch (p.arch()) {
    case Architecture::tcn: {
      Mat input = Mat::Map(frame.data(), 1, static_cast<Eigen::Index>(frame.size()));
      for (std::size_t s = 0; s < p.stages.size(); ++s) {
        const StageParams& stage = p.stages[s];
        Mat h(1, stage.input.out_channels());
        conv(stage.input, input.data(), h.data());
        Mat branch(1, h.cols());
        Mat projected(1, h.cols());
        std::vector<const double*> taps;
        for (std::size_t b = 0; b < stage.blocks.size(); ++b) {
          const auto& block = stage.blocks[b];
          RowHistory& hist = stages_[s].block_inputs[b];
          hist.push(h.data());
          taps.assign(static_cast<std::size_t>(block.dilated.kernel), nullptr);
          for (int k = 0; k < block.dilated.kernel; ++k) taps[static_cast<std::size_t>(k)] = hist.back(block.dilated.tap_offset(k));
          num::conv_row<double>(block.dilated, taps, branch.data());
          branch = branch.unaryExpr(&num::relu<double>);
          conv(block.pointwise, branch.data(), projected.data());
          h = h + projected;
        }
        run_heads(stage.heads, h.data(), out, phase_logits, step_logits);
        if (out.phase_probs.size() > 0 && out.step_probs.size() > 0) {
          input.resize(1, out.phase_probs.cols() + out.step_probs.cols());
          input << out.phase_probs, out.step_probs;
        } else {
          input = out.phase_probs.size() > 0 ? out.phase_probs : out.step_probs;
        }
      }
      break;
    }
    case Architecture::lstm:
      num::lstm_step<double>(*p.lstm, frame.data(), lstm_state_);
      run_heads(p.heads, lstm_state_.hidden.data(), out, phase_logits, step_logits);
      break;
    case Architecture::framewise: {
      Mat h(1, p.hidden->out_channels());
      conv(*p.hidden, frame.data(), h.data());
      h = h.unaryExpr(&num::relu<double>);
      run_heads(p.heads, h.data(), out, phase_logits, step_logits);
      break;
    }
  }
  ++frames_;
  return out;
}

std::vector<FramePrediction> predict_online(const ModelParams& params, const Mat& features) {
  OnlineSession session(params);
  std::vector<FramePrediction> out;
  out.reserve(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    out.push_back(session.push(std::span<const double>(features.row(t).data(), static_cast<std::size_t>(features.cols()))));
  }
  return out;
}

}  // namespace mtms::models
