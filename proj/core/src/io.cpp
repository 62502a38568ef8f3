#include "kdb/io.hpp"

#include "kdb/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kdb {

namespace {

std::ifstream open_in(const std::string& path)
{
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::io_error, "cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path)
{
  out.flush();
  require(out.good(), ErrorCode::io_error, "write failed for " + path);
}

bool skip_line(const std::string& line)
{
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '#';
}

std::vector<double> parse_row(const std::string& line, const std::string& where)
{
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r'))
      ++p;
    if (p == end)
      break;
    double v = 0.0;
    const auto [q, ec] = std::from_chars(p, end, v);
    require(ec == std::errc(), ErrorCode::parse_error, where + ": cannot parse a number");
    require(q == end || *q == ' ' || *q == '\t' || *q == '\r', ErrorCode::parse_error,
            where + ": unexpected character after a number");
    out.push_back(v);
    p = q;
  }
  return out;
}

std::string where(const std::string& path, std::size_t line)
{
  return path + ":" + std::to_string(line);
}

} // namespace

std::string format_number(double v)
{
  std::array<char, 32> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), p);
}

Eigen::MatrixXd read_matrix_tsv(const std::string& path)
{
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  long n = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line))
      continue;
    const auto p = line.find("n=");
    require(p != std::string::npos, ErrorCode::parse_error, where(path, lineno) + ": expected header n=<int>");
    const char* b = line.data() + p + 2;
    const auto [q, ec] = std::from_chars(b, line.data() + line.size(), n);
    require(ec == std::errc() && n > 0, ErrorCode::parse_error, where(path, lineno) + ": bad matrix order");
    (void)q;
    break;
  }
  require(n > 0, ErrorCode::parse_error, path + ": missing header n=<int>");
  Eigen::MatrixXd m(n, n);
  long row = 0;
  while (row < n && std::getline(in, line)) {
    ++lineno;
    if (skip_line(line))
      continue;
    const auto vals = parse_row(line, where(path, lineno));
    require(static_cast<long>(vals.size()) == n, ErrorCode::parse_error,
            where(path, lineno) + ": expected " + std::to_string(n) + " values, found " +
              std::to_string(vals.size()));
    for (long j = 0; j < n; ++j)
      m(row, j) = vals[static_cast<std::size_t>(j)];
    ++row;
  }
  require(row == n, ErrorCode::parse_error, path + ": expected " + std::to_string(n) + " rows");
  return m;
}

void write_matrix_tsv(const std::string& path, const Eigen::MatrixXd& m)
{
  auto out = open_out(path);
  out << "n=" << m.rows() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0)
        out << '\t';
      out << format_number(m(i, j));
    }
    out << '\n';
  }
  finish(out, path);
}

std::vector<double> read_vector(const std::string& path)
{
  auto in = open_in(path);
  std::vector<double> v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line))
      continue;
    const auto vals = parse_row(line, where(path, lineno));
    require(vals.size() == 1, ErrorCode::parse_error, where(path, lineno) + ": expected one value");
    v.push_back(vals[0]);
  }
  return v;
}

void write_vector(const std::string& path, const std::vector<double>& v)
{
  auto out = open_out(path);
  for (double x : v)
    out << format_number(x) << '\n';
  finish(out, path);
}

void write_vector(const std::string& path, const Eigen::VectorXd& v)
{
  write_vector(path, std::vector<double>(v.data(), v.data() + v.size()));
}

ContactSample read_sample_tsv(const std::string& path)
{
  auto in = open_in(path);
  std::vector<ContactPoint> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line))
      continue;
    const auto vals = parse_row(line, where(path, lineno));
    require(vals.size() == 3, ErrorCode::parse_error, where(path, lineno) + ": expected x, y, count");
    require(vals[0] >= 0.0 && vals[0] <= 1.0 && vals[1] >= 0.0 && vals[1] <= 1.0, ErrorCode::out_of_range,
            where(path, lineno) + ": position outside [0,1]");
    require(vals[2] > 0.0 && std::isfinite(vals[2]), ErrorCode::parse_error,
            where(path, lineno) + ": count must be positive");
    pts.push_back({vals[0], vals[1], vals[2]});
  }
  return ContactSample(std::move(pts));
}

void write_sample_tsv(const std::string& path, const ContactSample& s)
{
  auto out = open_out(path);
  for (const auto& p : s.points())
    out << format_number(p.x) << '\t' << format_number(p.y) << '\t' << format_number(p.count) << '\n';
  finish(out, path);
}

GridFunction1D read_bias_tsv(const std::string& path)
{
  auto in = open_in(path);
  std::vector<double> centers;
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line))
      continue;
    const auto vals = parse_row(line, where(path, lineno));
    require(vals.size() == 2, ErrorCode::parse_error, where(path, lineno) + ": expected center, value");
    centers.push_back(vals[0]);
    values.push_back(vals[1]);
  }
  require(values.size() >= 2, ErrorCode::parse_error, path + ": need at least two grid values");
  const Grid1D grid(values.size());
  for (std::size_t i = 0; i < centers.size(); ++i)
    require(std::abs(centers[i] - grid.center(i)) <= 1e-9, ErrorCode::parse_error,
            path + ": row " + std::to_string(i + 1) + " is not at the expected grid center");
  return GridFunction1D(grid, std::move(values));
}

void write_bias_tsv(const std::string& path, const GridFunction1D& f)
{
  auto out = open_out(path);
  for (std::size_t i = 0; i < f.size(); ++i)
    out << format_number(f.grid().center(i)) << '\t' << format_number(f[i]) << '\n';
  finish(out, path);
}

std::string read_text(const std::string& path)
{
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

} // namespace kdb
