#include "kdb/hic_io.hpp"

#include "kdb/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kdb {

namespace {

bool ends_with(const std::string& s, const std::string& suffix)
{
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string read_gzip(const std::string& path)
{
  gzFile f = gzopen(path.c_str(), "rb");
  require(f != nullptr, ErrorCode::io_error, "cannot open " + path);
  std::string out;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof buf)) > 0)
    out.append(buf, static_cast<std::size_t>(n));
  int err = 0;
  const char* msg = gzerror(f, &err);
  const bool bad = n < 0 || (err != Z_OK && err != Z_STREAM_END);
  const std::string detail = bad ? std::string(msg) : std::string();
  gzclose(f);
  require(!bad, ErrorCode::io_error, "cannot inflate " + path + ": " + detail);
  return out;
}

std::string_view next_field(std::string_view& rest)
{
  const auto start = rest.find_first_not_of(" \t\r");
  if (start == std::string_view::npos) {
    rest = {};
    return {};
  }
  rest.remove_prefix(start);
  const auto end = rest.find_first_of(" \t\r");
  const auto field = rest.substr(0, end);
  rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
  return field;
}

} // namespace

std::vector<RawContactRecord> parse_contact_records(std::istream& in)
{
  std::vector<RawContactRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest(line);
    const auto first = rest.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || rest[first] == '#')
      continue;
    const auto where = "line " + std::to_string(lineno);
    RawContactRecord r;
    r.line = lineno;
    const auto fi = next_field(rest);
    const auto fj = next_field(rest);
    const auto fc = next_field(rest);
    require(!fc.empty() && next_field(rest).empty(), ErrorCode::parse_error,
            where + ": expected three columns");
    auto parse_pos = [&](std::string_view f, std::uint64_t& v) {
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      require(ec == std::errc() && p == f.data() + f.size(), ErrorCode::parse_error,
              where + ": bad position '" + std::string(f) + "'");
    };
    parse_pos(fi, r.pos_i);
    parse_pos(fj, r.pos_j);
    const auto [p, ec] = std::from_chars(fc.data(), fc.data() + fc.size(), r.count);
    require(ec == std::errc() && p == fc.data() + fc.size(), ErrorCode::parse_error,
            where + ": bad count '" + std::string(fc) + "'");
    require(r.count > 0.0 && std::isfinite(r.count), ErrorCode::parse_error,
            where + ": count must be positive");
    out.push_back(r);
  }
  return out;
}

std::vector<RawContactRecord> read_contact_records(const std::string& path)
{
  if (ends_with(path, ".gz")) {
    std::istringstream in(read_gzip(path));
    return parse_contact_records(in);
  }
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open " + path);
  return parse_contact_records(in);
}

ContactSample rescale_to_unit(const std::vector<RawContactRecord>& records, const ChromContext& ctx,
                              PositionConvention convention)
{
  require(ctx.chrom_length > 0 && ctx.resolution > 0, ErrorCode::invalid_argument,
          "chromosome length and resolution must be positive");
  require(ctx.resolution <= ctx.chrom_length, ErrorCode::invalid_argument,
          "resolution exceeds the chromosome length");
  const double len = static_cast<double>(ctx.chrom_length);
  const double shift =
    convention == PositionConvention::bin_start ? 0.5 * static_cast<double>(ctx.resolution) : 0.0;
  std::vector<ContactPoint> pts;
  pts.reserve(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    const std::string where = r.line > 0 ? "line " + std::to_string(r.line) : "record " + std::to_string(k);
    require(r.pos_i < ctx.chrom_length && r.pos_j < ctx.chrom_length, ErrorCode::out_of_range,
            where + ": position beyond chromosome length " + std::to_string(ctx.chrom_length));
    const double x = std::min(1.0, (static_cast<double>(r.pos_i) + shift) / len);
    const double y = std::min(1.0, (static_cast<double>(r.pos_j) + shift) / len);
    pts.push_back({std::min(x, y), std::max(x, y), r.count});
  }
  return ContactSample(std::move(pts));
}

SymmetricMatrix bin_sample(const ContactSample& sample, std::size_t bins)
{
  require(bins >= 2, ErrorCode::invalid_argument, "need at least 2 bins");
  require(!sample.empty(), ErrorCode::empty_sample, "cannot bin an empty sample");
  const auto n = static_cast<Eigen::Index>(bins);
  const Grid1D grid(bins);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (const auto& p : sample.points()) {
    const auto i = static_cast<Eigen::Index>(grid.cell_of(p.x));
    const auto j = static_cast<Eigen::Index>(grid.cell_of(p.y));
    c(i, j) += p.count;
    if (i != j)
      c(j, i) += p.count;
  }
  return SymmetricMatrix(std::move(c));
}

SymmetricMatrix rebin(const SymmetricMatrix& c, std::size_t factor)
{
  require(factor >= 1, ErrorCode::invalid_argument, "rebin factor must be at least 1");
  const std::size_t n = c.size();
  require(factor <= n, ErrorCode::invalid_argument, "rebin factor exceeds the matrix order");
  const std::size_t out = n / factor;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(out));
  auto lo = [&](std::size_t a) { return std::min(a * factor, n); };
  auto hi = [&](std::size_t a) { return a + 1 == out ? n : (a + 1) * factor; };
  // Sum the upper blocks once and mirror, so real-valued input stays exactly symmetric.
  for (std::size_t a = 0; a < out; ++a)
    for (std::size_t b = a; b < out; ++b) {
      double s = 0.0;
      for (std::size_t i = lo(a); i < hi(a); ++i)
        for (std::size_t j = lo(b); j < hi(b); ++j)
          s += c(i, j);
      r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
      r(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = s;
    }
  return SymmetricMatrix(std::move(r));
}

} // namespace kdb
