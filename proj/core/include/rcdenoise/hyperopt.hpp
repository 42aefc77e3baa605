#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rcdenoise/readout.hpp"
#include "rcdenoise/reservoir.hpp"
#include "rcdenoise/training.hpp"

namespace rcdenoise {

struct Bound {
  double lower = 0.0;
  double upper = 0.0;

  [[nodiscard]] bool degenerate() const noexcept { return !(upper > lower); }
  [[nodiscard]] bool contains(double v) const noexcept { return v >= lower && v <= upper; }
};

/// Box over (N, alpha, gamma, zeta, p). N is integer-valued; a dimension
/// whose bounds coincide is held fixed.
struct SearchSpace {
  Bound n_nodes{100.0, 100.0};
  Bound leakage{0.01, 1.0};
  Bound spectral_radius{0.01, 1.0};
  Bound input_scaling{0.1, 2.0};
  Bound connectivity{0.1, 0.9};

  void validate() const;
  [[nodiscard]] bool contains(const HyperParams& phi) const noexcept;
  [[nodiscard]] static SearchSpace with_fixed_nodes(std::size_t n_nodes);
};

struct EvalOutcome {
  double loss = 0.0;
  double lambda = 0.0;
  bool failed = false;
  std::string message;

  [[nodiscard]] static EvalOutcome failure(std::string why);
};

struct EvalRecord {
  std::size_t iter = 0;
  HyperParams phi;
  double loss = 0.0;
  double lambda = 0.0;
  bool failed = false;
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

using Objective = std::function<EvalOutcome(const HyperParams&)>;

enum class SearchMethod { Surrogate, Random };

struct OptimizerOptions {
  std::size_t budget = 50;
  SearchMethod method = SearchMethod::Surrogate;
  std::size_t candidates = 2000;  // random acquisition candidates per proposal
  std::size_t jobs = 1;           // concurrent warm-up evaluations
};

struct OptimizeResult {
  HyperParams best;
  double best_loss = 0.0;
  double best_lambda = 0.0;
  std::vector<EvalRecord> history;
};

/// Sequential model-based search: ceil(budget/4) shifted-Halton warm-up
/// points, then proposals maximizing expected improvement under a Gaussian
/// process fitted to log-loss. SearchMethod::Random samples uniformly instead.
[[nodiscard]] OptimizeResult optimize(const SearchSpace& space, const Objective& objective,
                                      const OptimizerOptions& options, std::uint64_t seed);

/// Settings shared by every evaluation of the reservoir objective.
struct ObjectiveSettings {
  ReservoirOptions reservoir;
  RidgeConfig ridge;
  bool standardize = true;
  /// Reservoir seeds; the loss is averaged over them.
  std::vector<std::uint64_t> seeds{0};
};

/// Builds the reservoir for phi, selects lambda on the training rows, fits the
/// readout and returns the validation NMSE. Numerical failures become failed
/// outcomes rather than exceptions.
[[nodiscard]] EvalOutcome objective(const HyperParams& phi, const Dataset& data, const ObjectiveSettings& settings);

[[nodiscard]] Objective make_objective(const Dataset& data, const ObjectiveSettings& settings);

void write_history(const std::filesystem::path& path, const std::vector<EvalRecord>& history);

}  // namespace rcdenoise
