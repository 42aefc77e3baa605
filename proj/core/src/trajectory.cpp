#include "rcdenoise/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "rcdenoise/error.hpp"

namespace rcdenoise {

Trajectory::Trajectory(double t0_, double dt_, Matrix values_, std::vector<std::string> names)
    : t0(t0_), dt(dt_), values(std::move(values_)), channel_names(std::move(names)) {
  validate();
}

void Trajectory::validate() const {
  require(std::isfinite(t0), "trajectory t0 must be finite");
  require(std::isfinite(dt) && dt > 0.0, "trajectory dt must be positive");
  require(static_cast<std::size_t>(values.cols()) == channel_names.size(),
          "trajectory column count must equal the number of channel labels");
  require(values.allFinite(), "trajectory values must be finite");
}

std::size_t Trajectory::channel_index(std::string_view name) const {
  auto it = std::find(channel_names.begin(), channel_names.end(), name);
  if (it == channel_names.end()) fail(ErrorKind::InvalidArgument, "unknown channel '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - channel_names.begin());
}

bool Trajectory::has_channel(std::string_view name) const noexcept {
  return std::find(channel_names.begin(), channel_names.end(), name) != channel_names.end();
}

Trajectory Trajectory::select(std::span<const std::string> names) const {
  Trajectory out;
  out.t0 = t0;
  out.dt = dt;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t k = 0; k < names.size(); ++k) {
    out.values.col(static_cast<Eigen::Index>(k)) = values.col(static_cast<Eigen::Index>(channel_index(names[k])));
    out.channel_names.push_back(names[k]);
  }
  return out;
}

Trajectory Trajectory::slice(std::size_t begin, std::size_t end) const {
  require(begin <= end && end <= rows(), "trajectory slice out of range");
  Trajectory out;
  out.t0 = time(begin);
  out.dt = dt;
  out.values = values.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin));
  out.channel_names = channel_names;
  return out;
}

void require_aligned(const Trajectory& a, const Trajectory& b, std::string_view what) {
  const std::string ctx(what);
  require(a.rows() == b.rows(), ctx + ": row counts differ");
  require(a.channels() == b.channels(), ctx + ": channel counts differ");
  require(a.channel_names == b.channel_names, ctx + ": channel labels differ");
  require(std::abs(a.dt - b.dt) <= 1e-12 * std::max(1.0, std::abs(a.dt)), ctx + ": sampling steps differ");
}

double rms(const Eigen::Ref<const Matrix>& m) {
  if (m.size() == 0) return 0.0;
  return std::sqrt(m.squaredNorm() / static_cast<double>(m.size()));
}

}  // namespace rcdenoise
