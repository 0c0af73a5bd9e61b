#pragma once

#include <span>
#include <vector>

#include "mtms/models/params.hpp"

namespace mtms::models {

// Final-stage output for one frame. Label -1 and empty probabilities mark an
// absent head.
struct FramePrediction {
  int phase_label = -1;
  int step_label = -1;
  Mat phase_probs;  // 1 x num_phases
  Mat step_probs;   // 1 x num_steps
};

// Streaming inference state for one stream. Frame t's prediction uses only
// frames 0..t and equals frame t of the offline forward pass bit for bit. The
// session keeps a pointer to `params`, which must outlive it; any number of
// sessions may share one ModelParams.
class OnlineSession {
 public:
  explicit OnlineSession(const ModelParams& params);

  FramePrediction push(std::span<const double> frame);
  long frames_seen() const { return frames_; }

 private:
  // Last `capacity` rows of one layer input.
  class RowHistory {
   public:
    RowHistory(Eigen::Index width, int span);
    void push(const double* row);
    // Row `offset` frames before the newest one, or null before frame 0.
    const double* back(int offset) const;

   private:
    Mat rows_;
    long count_ = 0;
  };

  struct StageState {
    std::vector<RowHistory> block_inputs;
  };

  void conv(const ConvParams& p, const double* x, double* out);
  void run_heads(const HeadParams& heads, const double* x, FramePrediction& out, Mat& phase_logits,
                 Mat& step_logits);

  const ModelParams* params_;
  std::vector<StageState> stages_;
  num::LstmStepState<double> lstm_state_;
  long frames_ = 0;
};

// Feeds `features` row by row through a fresh session.
std::vector<FramePrediction> predict_online(const ModelParams& params, const Mat& features);

}  // namespace mtms::models
