#include "rcdenoise/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rcdenoise/error.hpp"

namespace rcdenoise::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text, const std::filesystem::path& path, std::size_t line_no) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first != last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    // from_chars rejects "inf"/"nan" spellings produced by some tools; let them through.
    if (text == "inf" || text == "+inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    fail(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) + ": not a number: '" + text + "'");
  }
  return value;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) fail(ErrorKind::Io, "number formatting failed");
  return std::string(buf, ptr);
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_for_write(path);
  out << 't';
  for (const auto& name : traj.channel_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < traj.rows(); ++i) {
    out << format_double(traj.time(i));
    for (Eigen::Index c = 0; c < traj.values.cols(); ++c)
      out << ',' << format_double(traj.values(static_cast<Eigen::Index>(i), c));
    out << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

NumericTable read_numeric(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  NumericTable table;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Parse, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size())
      fail(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(table.header.size()) + " fields");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(parse_double(cell, path, line_no));
    table.rows.push_back(std::move(row));
  }
  return table;
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  auto table = read_numeric(path);
  if (table.header.empty() || table.header.front() != "t")
    fail(ErrorKind::Parse, path.string() + ": header must start with 't'");
  if (table.rows.empty()) fail(ErrorKind::Parse, path.string() + ": no samples");
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto d = static_cast<Eigen::Index>(table.header.size() - 1);
  Trajectory traj;
  traj.channel_names.assign(table.header.begin() + 1, table.header.end());
  traj.values.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < d; ++c) traj.values(i, c) = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c + 1)];
  traj.t0 = table.rows.front().front();
  traj.dt = n > 1 ? (table.rows.back().front() - traj.t0) / static_cast<double>(n - 1) : 1.0;
  traj.validate();
  return traj;
}

void write_event_times(const std::filesystem::path& path, std::span<const double> times) {
  auto out = open_for_write(path);
  out << "t_f\n";
  for (double t : times) out << format_double(t) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<double> read_event_times(const std::filesystem::path& path) {
  auto table = read_numeric(path);
  if (table.header.size() != 1 || table.header.front() != "t_f")
    fail(ErrorKind::Parse, path.string() + ": expected header 't_f'");
  std::vector<double> times;
  for (const auto& row : table.rows) times.push_back(row.front());
  return times;
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

Table& Table::add_row(std::vector<std::string> cells) {
  require(cells.size() == header_.size(), "table row width does not match header");
  rows_.push_back(std::move(cells));
  return *this;
}

std::string Table::str() const {
  std::ostringstream out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  emit(header_);
  for (const auto& row : rows_) emit(row);
  return out.str();
}

void Table::write(const std::filesystem::path& path) const {
  auto out = open_for_write(path);
  out << str();
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace rcdenoise::csv
