#pragma once

#include <memory>
#include <vector>

#include "rcdenoise/reservoir.hpp"
#include "rcdenoise/training.hpp"

namespace rcdenoise {

/// Rows [begin, end) of a recording. The reservoir is always driven from
/// row 0 of `inputs`, so rows before `begin` act as warm-up.
struct Segment {
  std::shared_ptr<const Trajectory> inputs;   // noisy observed channels
  std::shared_ptr<const Trajectory> targets;  // clean target channels
  std::size_t begin = 0;
  std::size_t end = 0;

  void validate() const;
  [[nodiscard]] std::size_t length() const noexcept { return end - begin; }
};

struct Dataset {
  std::vector<Segment> train;
  std::vector<Segment> validation;

  void validate() const;
};

/// First `train_rows` rows for fitting, the remainder for validation.
[[nodiscard]] Dataset split_recording(std::shared_ptr<const Trajectory> inputs,
                                      std::shared_ptr<const Trajectory> targets, std::size_t train_rows);

/// Per-channel mean / standard deviation of the training rows, used to
/// standardize reservoir inputs and readout targets.
void fit_channel_scaling(EchoStateNetwork& esn, const Dataset& data);

struct ReadoutFit {
  double lambda = 0.0;
  double validation_nmse = 0.0;
  LambdaSelection selection;  // empty grid when a fixed lambda was used
};

/// Drives the reservoir over every recording once, selects lambda on the
/// training rows (washout excluded), fits W_out and scores the validation
/// rows in original target units.
ReadoutFit fit_readout(EchoStateNetwork& esn, const Dataset& data, const RidgeConfig& ridge);

/// Prediction and truth for a list of segments, stacked row-wise.
struct SegmentEvaluation {
  Matrix prediction;
  Matrix truth;
  Matrix input;  // observed noisy rows for the same segments
  [[nodiscard]] double nmse() const;
};
[[nodiscard]] SegmentEvaluation evaluate_segments(const EchoStateNetwork& esn, const std::vector<Segment>& segments);

/// Training-row state matrix (washout excluded), used by node ranking.
[[nodiscard]] Matrix training_states(const EchoStateNetwork& esn, const Dataset& data);

}  // namespace rcdenoise
