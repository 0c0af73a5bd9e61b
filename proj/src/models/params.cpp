#include "mtms/models/params.hpp"

#include <cmath>

#include "mtms/num/random.hpp"

namespace mtms::models {

namespace {

void fill_uniform(Mat& m, double bound, num::Rng& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-bound, bound);
}

ConvParams make_conv(int in, int out, int kernel, int dilation, num::Rng& rng) {
  ConvParams p{Mat(static_cast<Eigen::Index>(kernel) * in, out), Mat::Zero(1, out), dilation, kernel};
  fill_uniform(p.weight, 1.0 / std::sqrt(static_cast<double>(kernel) * in), rng);
  return p;
}

HeadParams make_heads(const TcnConfig& c, int in, num::Rng& rng) {
  HeadParams h;
  if (c.has_phase_head()) h.phase = make_conv(in, c.num_phases, 1, 1, rng);
  if (c.has_step_head()) h.step = make_conv(in, c.num_steps, 1, 1, rng);
  return h;
}

int head_width(const TcnConfig& c) {
  return (c.has_phase_head() ? c.num_phases : 0) + (c.has_step_head() ? c.num_steps : 0);
}

void check_conv(const ConvParams& p, long in, long out, int kernel, int dilation, const char* what) {
  if (p.kernel != kernel || p.dilation != dilation || p.weight.rows() != in * kernel || p.weight.cols() != out ||
      p.bias.rows() != 1 || p.bias.cols() != out) {
    throw InvalidArgument(std::string("model params: ") + what + " has inconsistent shape");
  }
}

void check_heads(const HeadParams& h, const TcnConfig& c, long in) {
  if (h.phase.has_value() != c.has_phase_head() || h.step.has_value() != c.has_step_head()) {
    throw InvalidArgument("model params: heads do not match the task configuration");
  }
  if (h.phase) check_conv(*h.phase, in, c.num_phases, 1, 1, "phase head");
  if (h.step) check_conv(*h.step, in, c.num_steps, 1, 1, "step head");
}

}  // namespace

ModelParams build_model(const TcnConfig& c, std::uint64_t seed) {
  validate(c);
  num::Rng rng(seed);
  ModelParams p;
  p.config = c;
  switch (c.arch) {
    case Architecture::tcn:
      for (int s = 0; s < c.num_stages; ++s) {
        StageParams stage;
        const int in = s == 0 ? c.input_dim : head_width(c);
        stage.input = make_conv(in, c.filters, 1, 1, rng);
        for (int l = 0; l < c.layers_per_stage; ++l) {
          num::ResidualBlockParams block;
          block.dilated = make_conv(c.filters, c.filters, c.kernel, 1 << l, rng);
          block.pointwise = make_conv(c.filters, c.filters, 1, 1, rng);
          stage.blocks.push_back(std::move(block));
        }
        stage.heads = make_heads(c, c.filters, rng);
        p.stages.push_back(std::move(stage));
      }
      break;
    case Architecture::lstm: {
      const Eigen::Index h = c.lstm_hidden;
      num::LstmParams lstm{Mat(c.input_dim, 4 * h), Mat(h, 4 * h), Mat::Zero(1, 4 * h)};
      const double bound = 1.0 / std::sqrt(static_cast<double>(h));
      fill_uniform(lstm.input_weight, bound, rng);
      fill_uniform(lstm.recurrent_weight, bound, rng);
      p.lstm = std::move(lstm);
      p.heads = make_heads(c, c.lstm_hidden, rng);
      break;
    }
    case Architecture::framewise:
      p.hidden = make_conv(c.input_dim, c.framewise_hidden, 1, 1, rng);
      p.heads = make_heads(c, c.framewise_hidden, rng);
      break;
  }
  return p;
}

std::vector<Mat*> param_refs(ModelParams& p) {
  std::vector<Mat*> refs;
  for_each_param(p, [&](Mat& m) { refs.push_back(&m); });
  return refs;
}

std::size_t parameter_count(const ModelParams& p) {
  std::size_t n = 0;
  for_each_param(p, [&](const Mat& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

void validate(const ModelParams& p) {
  const TcnConfig& c = p.config;
  validate(c);
  switch (c.arch) {
    case Architecture::tcn:
      if (static_cast<int>(p.stages.size()) != c.num_stages || p.lstm || p.hidden) {
        throw InvalidArgument("model params: stage count does not match config");
      }
      for (std::size_t s = 0; s < p.stages.size(); ++s) {
        const auto& stage = p.stages[s];
        check_conv(stage.input, s == 0 ? c.input_dim : head_width(c), c.filters, 1, 1, "stage input");
        if (static_cast<int>(stage.blocks.size()) != c.layers_per_stage) {
          throw InvalidArgument("model params: layer count does not match config");
        }
        for (std::size_t l = 0; l < stage.blocks.size(); ++l) {
          check_conv(stage.blocks[l].dilated, c.filters, c.filters, c.kernel, 1 << l, "dilated conv");
          check_conv(stage.blocks[l].pointwise, c.filters, c.filters, 1, 1, "pointwise conv");
        }
        check_heads(stage.heads, c, c.filters);
      }
      break;
    case Architecture::lstm:
      if (!p.lstm || !p.stages.empty() || p.hidden) throw InvalidArgument("model params: lstm layer missing");
      num::validate(*p.lstm);
      if (p.lstm->input_dim() != c.input_dim || p.lstm->hidden() != c.lstm_hidden) {
        throw InvalidArgument("model params: lstm shape does not match config");
      }
      check_heads(p.heads, c, c.lstm_hidden);
      break;
    case Architecture::framewise:
      if (!p.hidden || !p.stages.empty() || p.lstm) throw InvalidArgument("model params: hidden layer missing");
      check_conv(*p.hidden, c.input_dim, c.framewise_hidden, 1, 1, "hidden layer");
      check_heads(p.heads, c, c.framewise_hidden);
      break;
  }
  for_each_param(p, [](const Mat& m) {
    if (!num::all_finite(m)) throw NumericError("model params: non-finite weight");
  });
}

}  // namespace mtms::models
