#include "rcdenoise/hyperopt.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>

#include "rcdenoise/csv.hpp"
#include "rcdenoise/error.hpp"
#include "rcdenoise/parallel.hpp"
#include "rcdenoise/random.hpp"

namespace rcdenoise {

void SearchSpace::validate() const {
  for (const Bound* b : {&n_nodes, &leakage, &spectral_radius, &input_scaling, &connectivity})
    require(std::isfinite(b->lower) && std::isfinite(b->upper) && b->lower <= b->upper,
            "search space bounds must satisfy lower <= upper");
  require(n_nodes.lower >= 2.0, "search space must keep at least 2 nodes");
  require(leakage.lower >= 0.0 && leakage.upper <= 1.0, "leakage bounds must lie in [0, 1]");
  require(connectivity.lower >= 0.0 && connectivity.upper <= 1.0, "connectivity bounds must lie in [0, 1]");
  require(spectral_radius.lower >= 0.0 && input_scaling.lower >= 0.0, "radius and input scaling must be >= 0");
}

bool SearchSpace::contains(const HyperParams& phi) const noexcept {
  return n_nodes.contains(static_cast<double>(phi.n_nodes)) && leakage.contains(phi.leakage) &&
         spectral_radius.contains(phi.spectral_radius) && input_scaling.contains(phi.input_scaling) &&
         connectivity.contains(phi.connectivity);
}

SearchSpace SearchSpace::with_fixed_nodes(std::size_t n) {
  SearchSpace s;
  s.n_nodes = {static_cast<double>(n), static_cast<double>(n)};
  return s;
}

EvalOutcome EvalOutcome::failure(std::string why) {
  EvalOutcome out;
  out.loss = std::numeric_limits<double>::infinity();
  out.failed = true;
  out.message = std::move(why);
  return out;
}

namespace {

constexpr std::size_t kDims = 5;
constexpr std::array<unsigned, kDims> kPrimes{2, 3, 5, 7, 11};

class Box {
 public:
  explicit Box(const SearchSpace& s) : bounds_{s.n_nodes, s.leakage, s.spectral_radius, s.input_scaling, s.connectivity} {
    for (std::size_t d = 0; d < kDims; ++d)
      if (!bounds_[d].degenerate()) active_.push_back(d);
  }

  [[nodiscard]] std::size_t dims() const noexcept { return active_.size(); }

  [[nodiscard]] HyperParams decode(const Vector& u) const {
    std::array<double, kDims> v{};
    for (std::size_t d = 0; d < kDims; ++d) v[d] = bounds_[d].lower;
    for (std::size_t k = 0; k < active_.size(); ++k) {
      const auto& b = bounds_[active_[k]];
      v[active_[k]] = b.lower + std::clamp(u[static_cast<Eigen::Index>(k)], 0.0, 1.0) * (b.upper - b.lower);
    }
    HyperParams phi;
    phi.n_nodes = static_cast<std::size_t>(std::clamp(std::round(v[0]), std::ceil(bounds_[0].lower), std::floor(bounds_[0].upper)));
    phi.leakage = v[1];
    phi.spectral_radius = v[2];
    phi.input_scaling = v[3];
    phi.connectivity = v[4];
    return phi;
  }

  // Unit-cube coordinates of phi after rounding (so the surrogate sees what was evaluated).
  [[nodiscard]] Vector encode(const HyperParams& phi) const {
    const std::array<double, kDims> v{static_cast<double>(phi.n_nodes), phi.leakage, phi.spectral_radius,
                                      phi.input_scaling, phi.connectivity};
    Vector u(static_cast<Eigen::Index>(active_.size()));
    for (std::size_t k = 0; k < active_.size(); ++k) {
      const auto& b = bounds_[active_[k]];
      u[static_cast<Eigen::Index>(k)] = (v[active_[k]] - b.lower) / (b.upper - b.lower);
    }
    return u;
  }

 private:
  std::array<Bound, kDims> bounds_;
  std::vector<std::size_t> active_;
};

double matern52(double r, double length) {
  const double s = std::sqrt(5.0) * r / length;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

/// Zero-mean GP on standardized targets with an isotropic Matern-5/2 kernel;
/// length scale and noise picked by marginal likelihood over a small grid.
class Surrogate {
 public:
  Surrogate(const std::vector<Vector>& x, const Vector& y) : x_(x) {
    y_mean_ = y.mean();
    const double var = (y.array() - y_mean_).square().mean();
    y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
    const Vector ys = (y.array() - y_mean_) / y_scale_;
    const auto n = static_cast<Eigen::Index>(x.size());

    double best_lml = -std::numeric_limits<double>::infinity();
    for (double length : {0.05, 0.1, 0.2, 0.35, 0.6, 1.0, 2.0}) {
      for (double noise : {1e-6, 1e-4, 1e-2, 1e-1}) {
        Matrix k(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < n; ++j)
            k(i, j) = matern52((x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]).norm(), length);
        k.diagonal().array() += noise;
        Eigen::LLT<Matrix> llt(k);
        if (llt.info() != Eigen::Success) continue;
        const Vector alpha = llt.solve(ys);
        const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
        const double lml = -0.5 * ys.dot(alpha) - 0.5 * logdet;
        if (lml > best_lml) {
          best_lml = lml;
          length_ = length;
          alpha_ = alpha;
          llt_ = llt;
        }
      }
    }
    if (!std::isfinite(best_lml)) fail(ErrorKind::Instability, "surrogate: kernel matrix not positive definite");
  }

  // Posterior mean and standard deviation in original units.
  [[nodiscard]] std::pair<double, double> predict(const Vector& u) const {
    const auto n = static_cast<Eigen::Index>(x_.size());
    Vector k(n);
    for (Eigen::Index i = 0; i < n; ++i) k[i] = matern52((u - x_[static_cast<std::size_t>(i)]).norm(), length_);
    const double mean = k.dot(alpha_);
    const Vector v = llt_.matrixL().solve(k);
    const double var = std::max(1.0 - v.squaredNorm(), 1e-12);
    return {y_mean_ + y_scale_ * mean, y_scale_ * std::sqrt(var)};
  }

 private:
  std::vector<Vector> x_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double length_ = 0.2;
  Vector alpha_;
  Eigen::LLT<Matrix> llt_;
};

double expected_improvement(double mean, double sd, double best, double xi) {
  const double z = (best - mean - xi) / sd;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return (best - mean - xi) * cdf + sd * pdf;
}

double surrogate_target(double loss) { return std::log10(std::max(loss, 1e-300)); }

}  // namespace

OptimizeResult optimize(const SearchSpace& space, const Objective& objective_fn, const OptimizerOptions& options,
                        std::uint64_t seed) {
  space.validate();
  require(options.budget >= 1, "optimize: budget must be at least 1");
  require(static_cast<bool>(objective_fn), "optimize: empty objective");

  const Box box(space);
  const std::size_t dims = box.dims();
  Rng rng(derive_seed(seed, "optimizer"));
  OptimizeResult result;
  std::vector<Vector> points;

  auto evaluate = [&](const HyperParams& phi) {
    const auto start = std::chrono::steady_clock::now();
    EvalOutcome out;
    try {
      out = objective_fn(phi);
    } catch (const Error& e) {
      if (!e.is_numeric()) throw;
      out = EvalOutcome::failure(e.what());
    }
    if (!out.failed && !std::isfinite(out.loss)) out = EvalOutcome::failure("non-finite loss");
    EvalRecord rec;
    rec.phi = phi;
    rec.loss = out.failed ? std::numeric_limits<double>::infinity() : out.loss;
    rec.lambda = out.lambda;
    rec.failed = out.failed;
    rec.seed = seed;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
  };
  auto append = [&](EvalRecord rec, const Vector& u) {
    rec.iter = result.history.size();
    result.history.push_back(std::move(rec));
    points.push_back(u);
  };

  if (dims == 0) {
    // Every bound is pinned: the single point is the answer.
    append(evaluate(box.decode(Vector())), Vector());
  } else {
    const std::size_t warmup =
        options.method == SearchMethod::Random ? options.budget : (options.budget + 3) / 4;
    std::vector<Vector> initial;
    Vector shift(static_cast<Eigen::Index>(dims));
    for (auto& s : shift) s = rng.uniform(0.0, 1.0);
    for (std::size_t i = 0; i < warmup; ++i) {
      Vector u(static_cast<Eigen::Index>(dims));
      for (std::size_t d = 0; d < dims; ++d) {
        const auto di = static_cast<Eigen::Index>(d);
        u[di] = options.method == SearchMethod::Random ? rng.uniform(0.0, 1.0)
                                                       : std::fmod(radical_inverse(i + 1, kPrimes[d]) + shift[di], 1.0);
      }
      initial.push_back(box.encode(box.decode(u)));
    }
    std::vector<EvalRecord> warm(initial.size());
    parallel_for(initial.size(), options.jobs, [&](std::size_t i) { warm[i] = evaluate(box.decode(initial[i])); });
    for (std::size_t i = 0; i < warm.size(); ++i) append(std::move(warm[i]), initial[i]);

    while (result.history.size() < options.budget) {
      Vector y(static_cast<Eigen::Index>(points.size()));
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& rec : result.history)
        if (!rec.failed) worst = std::max(worst, surrogate_target(rec.loss));
      if (!std::isfinite(worst)) worst = 0.0;
      double best_y = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < result.history.size(); ++i) {
        const auto& rec = result.history[i];
        // Failed points are imputed as worse than anything seen so the model steers away.
        y[static_cast<Eigen::Index>(i)] = rec.failed ? worst + 1.0 : surrogate_target(rec.loss);
        best_y = std::min(best_y, y[static_cast<Eigen::Index>(i)]);
      }
      const Surrogate gp(points, y);

      std::vector<Vector> candidates;
      candidates.reserve(options.candidates + 500);
      for (std::size_t c = 0; c < options.candidates; ++c) {
        Vector u(static_cast<Eigen::Index>(dims));
        for (auto& v : u) v = rng.uniform(0.0, 1.0);
        candidates.push_back(std::move(u));
      }
      // Local perturbations around the incumbents.
      std::vector<std::size_t> order(points.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&y](std::size_t a, std::size_t b) {
        return y[static_cast<Eigen::Index>(a)] < y[static_cast<Eigen::Index>(b)];
      });
      for (std::size_t t = 0; t < std::min<std::size_t>(5, order.size()); ++t)
        for (std::size_t c = 0; c < 100; ++c) {
          Vector u = points[order[t]];
          for (auto& v : u) v = std::clamp(v + rng.normal(0.0, c < 50 ? 0.02 : 0.08), 0.0, 1.0);
          candidates.push_back(std::move(u));
        }

      double best_ei = -1.0;
      Vector chosen = candidates.front();
      for (const auto& cand : candidates) {
        const Vector u = box.encode(box.decode(cand));
        bool duplicate = false;
        for (const auto& p : points)
          if ((p - u).squaredNorm() < 1e-12) {
            duplicate = true;
            break;
          }
        if (duplicate) continue;
        const auto [mean, sd] = gp.predict(u);
        const double ei = expected_improvement(mean, sd, best_y, 0.01);
        if (ei > best_ei) {
          best_ei = ei;
          chosen = u;
        }
      }
      append(evaluate(box.decode(chosen)), box.encode(box.decode(chosen)));
    }
  }

  bool found = false;
  for (const auto& rec : result.history) {
    if (rec.failed) continue;
    if (!found || rec.loss < result.best_loss) {
      found = true;
      result.best = rec.phi;
      result.best_loss = rec.loss;
      result.best_lambda = rec.lambda;
    }
  }
  if (!found) fail(ErrorKind::NoFeasiblePoint, "optimize: every evaluation failed");
  return result;
}

EvalOutcome objective(const HyperParams& phi, const Dataset& data, const ObjectiveSettings& settings) {
  require(!settings.seeds.empty(), "objective: need at least one reservoir seed");
  double loss = 0.0;
  double lambda_log = 0.0;
  try {
    for (auto seed : settings.seeds) {
      auto esn = build_reservoir(phi, data.train.front().inputs->channels(), seed, settings.reservoir);
      if (settings.standardize) fit_channel_scaling(esn, data);
      const auto fit = fit_readout(esn, data, settings.ridge);
      if (!std::isfinite(fit.validation_nmse)) return EvalOutcome::failure("non-finite validation NMSE");
      loss += fit.validation_nmse;
      lambda_log += std::log10(std::max(fit.lambda, 1e-300));
    }
  } catch (const Error& e) {
    if (!e.is_numeric()) throw;
    return EvalOutcome::failure(e.what());
  }
  const auto k = static_cast<double>(settings.seeds.size());
  EvalOutcome out;
  out.loss = loss / k;
  // Geometric mean of the per-seed selections.
  out.lambda = std::pow(10.0, lambda_log / k);
  return out;
}

Objective make_objective(const Dataset& data, const ObjectiveSettings& settings) {
  return [data, settings](const HyperParams& phi) { return objective(phi, data, settings); };
}

void write_history(const std::filesystem::path& path, const std::vector<EvalRecord>& history) {
  csv::Table table({"iter", "N", "alpha", "gamma", "zeta", "p", "lambda", "loss", "seconds"});
  for (const auto& r : history)
    table.add_row({std::to_string(r.iter), std::to_string(r.phi.n_nodes), csv::format_double(r.phi.leakage),
                   csv::format_double(r.phi.spectral_radius), csv::format_double(r.phi.input_scaling),
                   csv::format_double(r.phi.connectivity), csv::format_double(r.lambda),
                   r.failed ? "failed" : csv::format_double(r.loss), csv::format_double(r.seconds)});
  table.write(path);
}

}  // namespace rcdenoise
