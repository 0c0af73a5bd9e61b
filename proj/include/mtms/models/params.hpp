#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mtms/models/config.hpp"
#include "mtms/num/conv.hpp"
#include "mtms/num/lstm.hpp"
#include "mtms/num/residual.hpp"

namespace mtms::models {

using num::ConvParams;
using num::Mat;

// 1x1 output projections; a head is absent in single-task models.
struct HeadParams {
  std::optional<ConvParams> phase;
  std::optional<ConvParams> step;
};

struct StageParams {
  ConvParams input;  // 1x1 projection to `filters` channels
  std::vector<num::ResidualBlockParams> blocks;
  HeadParams heads;
};

// All learnable weights of one model. Which members are populated depends on
// config.arch: `stages` for tcn, `lstm` + `heads` for lstm, `hidden` + `heads`
// for framewise.
struct ModelParams {
  TcnConfig config;
  std::vector<StageParams> stages;
  std::optional<num::LstmParams> lstm;
  std::optional<ConvParams> hidden;
  HeadParams heads;

  Architecture arch() const { return config.arch; }
};

// Fan-in scaled uniform weights (bound 1/sqrt(fan_in)), zero biases.
// Deterministic in `seed`.
ModelParams build_model(const TcnConfig& config, std::uint64_t seed);

// Visits every learnable array in declaration order: per stage the input
// projection, then each block's dilated and pointwise convs, then the phase
// and step heads; for the baselines the recurrent or hidden layer, then the
// heads. Weight before bias within a conv.
template <typename Params, typename F>
void for_each_param(Params& p, F&& f) {
  auto conv = [&](auto& c) {
    f(c.weight);
    f(c.bias);
  };
  auto heads = [&](auto& h) {
    if (h.phase) conv(*h.phase);
    if (h.step) conv(*h.step);
  };
  for (auto& stage : p.stages) {
    conv(stage.input);
    for (auto& block : stage.blocks) {
      conv(block.dilated);
      conv(block.pointwise);
    }
    heads(stage.heads);
  }
  if (p.lstm) {
    f(p.lstm->input_weight);
    f(p.lstm->recurrent_weight);
    f(p.lstm->bias);
  }
  if (p.hidden) conv(*p.hidden);
  heads(p.heads);
}

std::vector<Mat*> param_refs(ModelParams& p);
std::size_t parameter_count(const ModelParams& p);

// Throws InvalidArgument when shapes disagree with the config.
void validate(const ModelParams& p);

}  // namespace mtms::models
