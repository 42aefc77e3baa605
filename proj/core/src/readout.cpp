#include "rcdenoise/readout.hpp"

#include <algorithm>
#include <map>

#include "rcdenoise/error.hpp"

namespace rcdenoise {

void Segment::validate() const {
  require(inputs && targets, "segment needs both inputs and targets");
  require(inputs->rows() == targets->rows(), "segment inputs and targets must share the time grid");
  require(begin < end && end <= inputs->rows(), "segment row range out of bounds");
}

void Dataset::validate() const {
  require(!train.empty(), "dataset has no training segments");
  require(!validation.empty(), "dataset has no validation segments");
  const auto& ref = train.front();
  auto check = [&ref](const Segment& s) {
    s.validate();
    require(s.inputs->channel_names == ref.inputs->channel_names, "segments disagree on input channels");
    require(s.targets->channel_names == ref.targets->channel_names, "segments disagree on target channels");
  };
  for (const auto& s : train) check(s);
  for (const auto& s : validation) check(s);
}

Dataset split_recording(std::shared_ptr<const Trajectory> inputs, std::shared_ptr<const Trajectory> targets,
                        std::size_t train_rows) {
  require(inputs && targets, "split_recording: null trajectory");
  require(train_rows > 0 && train_rows < inputs->rows(), "split_recording: split point outside the recording");
  Dataset data;
  data.train.push_back({inputs, targets, 0, train_rows});
  data.validation.push_back({inputs, targets, train_rows, inputs->rows()});
  data.validate();
  return data;
}

namespace {

using StateCache = std::map<const Trajectory*, Matrix>;

// Runs the reservoir once per distinct input recording, up to the furthest
// row any segment needs.
StateCache compute_states(const EchoStateNetwork& esn, const std::vector<const std::vector<Segment>*>& groups) {
  std::map<const Trajectory*, std::size_t> reach;
  for (const auto* group : groups)
    for (const auto& s : *group) {
      auto& r = reach[s.inputs.get()];
      r = std::max(r, s.end);
    }
  StateCache cache;
  for (auto [traj, rows] : reach) {
    const Matrix observed = traj->values.topRows(static_cast<Eigen::Index>(rows));
    cache.emplace(traj, run(esn, observed));
  }
  return cache;
}

std::size_t fit_begin(const EchoStateNetwork& esn, const Segment& s) { return std::max(s.begin, esn.washout()); }

void stack_training(const EchoStateNetwork& esn, const Dataset& data, const StateCache& cache, Matrix& states,
                    Matrix& targets) {
  Eigen::Index rows = 0;
  for (const auto& s : data.train) rows += static_cast<Eigen::Index>(s.end - std::min(s.end, fit_begin(esn, s)));
  if (rows == 0) fail(ErrorKind::InvalidArgument, "training segments lie entirely inside the washout");
  states.resize(rows, static_cast<Eigen::Index>(esn.n_nodes()));
  targets.resize(rows, static_cast<Eigen::Index>(data.train.front().targets->channels()));
  Eigen::Index at = 0;
  for (const auto& s : data.train) {
    const auto b = fit_begin(esn, s);
    if (b >= s.end) continue;
    const auto len = static_cast<Eigen::Index>(s.end - b);
    states.middleRows(at, len) = cache.at(s.inputs.get()).middleRows(static_cast<Eigen::Index>(b), len);
    targets.middleRows(at, len) =
        esn.output_scaling.normalize(s.targets->values.middleRows(static_cast<Eigen::Index>(b), len));
    at += len;
  }
}

SegmentEvaluation evaluate_cached(const EchoStateNetwork& esn, const std::vector<Segment>& segments,
                                  const StateCache& cache) {
  Eigen::Index rows = 0;
  for (const auto& s : segments) rows += static_cast<Eigen::Index>(s.length());
  SegmentEvaluation ev;
  const auto d_out = static_cast<Eigen::Index>(segments.front().targets->channels());
  ev.prediction.resize(rows, d_out);
  ev.truth.resize(rows, d_out);
  ev.input.resize(rows, static_cast<Eigen::Index>(segments.front().inputs->channels()));
  Eigen::Index at = 0;
  for (const auto& s : segments) {
    const auto b = static_cast<Eigen::Index>(s.begin);
    const auto len = static_cast<Eigen::Index>(s.length());
    ev.prediction.middleRows(at, len) = readout(esn, cache.at(s.inputs.get()).middleRows(b, len));
    ev.truth.middleRows(at, len) = s.targets->values.middleRows(b, len);
    ev.input.middleRows(at, len) = s.inputs->values.middleRows(b, len);
    at += len;
  }
  return ev;
}

}  // namespace

void fit_channel_scaling(EchoStateNetwork& esn, const Dataset& data) {
  data.validate();
  auto stats = [&data](auto pick) {
    const auto d = static_cast<Eigen::Index>(pick(data.train.front()).channels());
    Vector sum = Vector::Zero(d);
    Vector sq = Vector::Zero(d);
    double count = 0.0;
    for (const auto& s : data.train) {
      auto block = pick(s).values.middleRows(static_cast<Eigen::Index>(s.begin), static_cast<Eigen::Index>(s.length()));
      sum += block.colwise().sum().transpose();
      count += static_cast<double>(block.rows());
    }
    const Vector mean = sum / count;
    for (const auto& s : data.train) {
      auto block = pick(s).values.middleRows(static_cast<Eigen::Index>(s.begin), static_cast<Eigen::Index>(s.length()));
      sq += (block.rowwise() - mean.transpose()).colwise().squaredNorm().transpose();
    }
    Vector sd = (sq / count).cwiseSqrt();
    for (Eigen::Index c = 0; c < d; ++c)
      if (!(sd[c] > 0.0)) sd[c] = 1.0;
    return ChannelScaling{mean, sd};
  };
  esn.input_scaling = stats([](const Segment& s) -> const Trajectory& { return *s.inputs; });
  esn.output_scaling = stats([](const Segment& s) -> const Trajectory& { return *s.targets; });
}

ReadoutFit fit_readout(EchoStateNetwork& esn, const Dataset& data, const RidgeConfig& ridge) {
  data.validate();
  ridge.validate();
  require(data.train.front().inputs->channels() == esn.input_dim(), "dataset input width does not match the network");
  esn.input_channels = data.train.front().inputs->channel_names;
  esn.output_channels = data.train.front().targets->channel_names;

  const StateCache cache = compute_states(esn, {&data.train, &data.validation});
  Matrix states;
  Matrix targets;
  stack_training(esn, data, cache, states, targets);

  ReadoutFit fit;
  if (ridge.fixed_lambda) {
    fit.lambda = *ridge.fixed_lambda;
  } else {
    fit.selection = select_lambda(states, targets, ridge);
    fit.lambda = fit.selection.lambda;
  }
  esn.w_out = ridge_fit(states, targets, fit.lambda);
  esn.ridge_lambda = fit.lambda;
  fit.validation_nmse = evaluate_cached(esn, data.validation, cache).nmse();
  return fit;
}

double SegmentEvaluation::nmse() const { return rcdenoise::nmse(prediction, truth); }

SegmentEvaluation evaluate_segments(const EchoStateNetwork& esn, const std::vector<Segment>& segments) {
  require(!segments.empty(), "evaluate_segments: no segments");
  for (const auto& s : segments) s.validate();
  return evaluate_cached(esn, segments, compute_states(esn, {&segments}));
}

Matrix training_states(const EchoStateNetwork& esn, const Dataset& data) {
  const StateCache cache = compute_states(esn, {&data.train});
  Matrix states;
  Matrix targets;
  stack_training(esn, data, cache, states, targets);
  return states;
}

}  // namespace rcdenoise
