#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rcdenoise/trajectory.hpp"

namespace rcdenoise::csv {

/// Shortest text that parses back to exactly `value` (up to 17 significant digits).
[[nodiscard]] std::string format_double(double value);

/// Header `t,<ch0>,<ch1>,...`, one row per sample.
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
[[nodiscard]] Trajectory read_trajectory(const std::filesystem::path& path);

/// Single-column sidecar with header `t_f`.
void write_event_times(const std::filesystem::path& path, std::span<const double> times);
[[nodiscard]] std::vector<double> read_event_times(const std::filesystem::path& path);

/// Generic table writer: cells are written verbatim.
class Table {
 public:
  explicit Table(std::vector<std::string> header);

  Table& add_row(std::vector<std::string> cells);
  [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  [[nodiscard]] std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parses a numeric CSV with a header line into (header, columns-by-row).
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
[[nodiscard]] NumericTable read_numeric(const std::filesystem::path& path);

}  // namespace rcdenoise::csv
