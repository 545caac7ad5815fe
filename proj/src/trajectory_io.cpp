#include "samgs/trajectory_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "samgs/error.hpp"

namespace samgs {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error(ErrorKind::Io, "format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

namespace {

void put_optional(std::ostream& out, const std::vector<double>& values, std::size_t i) {
  if (i < values.size()) out << format_double(values[i]);
}

double parse_field(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Parse, "trajectory line " + std::to_string(line_no) + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

void write_trajectory(std::ostream& out, std::span<const TrajectoryRecord> rows) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : rows) {
    out << r.t;
    for (std::size_t i = 0; i < 2; ++i) {
      out << ',';
      if (i < r.theta.size()) out << format_double(r.theta[i]);
    }
    for (std::size_t i = 0; i < 2; ++i) {
      out << ',';
      put_optional(out, r.task_losses, i);
    }
    out << ',' << format_double(r.combined_loss) << ',';
    if (r.psi) out << format_double(*r.psi);
    out << ',';
    if (r.branch) out << *r.branch;
    for (std::size_t i = 0; i < 2; ++i) {
      out << ',';
      put_optional(out, r.gradient_norms, i);
    }
    out << '\n';
  }
}

void write_trajectory_file(const std::string& path, std::span<const TrajectoryRecord> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write trajectory file '" + path + "'");
  write_trajectory(out, rows);
  if (!out) throw Error(ErrorKind::Io, "error while writing '" + path + "'");
}

std::vector<TrajectoryRecord> read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw Error(ErrorKind::Parse, "trajectory: missing or unexpected header row");
  }
  std::vector<TrajectoryRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 10) throw Error(ErrorKind::Parse, "trajectory line " + std::to_string(line_no) + ": expected 10 fields");

    TrajectoryRecord r;
    r.t = static_cast<std::int64_t>(parse_field(f[0], line_no));
    r.theta = ParamVector{parse_field(f[1], line_no), parse_field(f[2], line_no)};
    r.task_losses = {parse_field(f[3], line_no), parse_field(f[4], line_no)};
    r.combined_loss = parse_field(f[5], line_no);
    if (!f[6].empty()) r.psi = parse_field(f[6], line_no);
    if (!f[7].empty()) r.branch = f[7];
    if (!f[8].empty()) r.gradient_norms.push_back(parse_field(f[8], line_no));
    if (!f[9].empty()) r.gradient_norms.push_back(parse_field(f[9], line_no));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace samgs
