#pragma once

#include "kdb/contact_sample.hpp"
#include "kdb/matrix_balance.hpp"

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace kdb {

struct RawContactRecord
{
  std::uint64_t pos_i = 0;  // base pairs
  std::uint64_t pos_j = 0;
  double count = 0.0;
  std::size_t line = 0;     // 1-based source line, 0 when not from a file
};

struct ChromContext
{
  std::uint64_t chrom_length = 0;  // base pairs
  std::uint64_t resolution = 0;    // base pairs per bin
};

enum class PositionConvention
{
  bin_start,  // positions are bin starts; shifted by half a resolution
  midpoint    // positions are used as given
};

// Three whitespace-separated columns (pos_i, pos_j, count). Lines starting
// with '#' and blank lines are skipped. Files ending in .gz are inflated.
std::vector<RawContactRecord> read_contact_records(const std::string& path);
std::vector<RawContactRecord> parse_contact_records(std::istream& in);

ContactSample rescale_to_unit(const std::vector<RawContactRecord>& records, const ChromContext& ctx,
                              PositionConvention convention = PositionConvention::bin_start);

// Cell [i/B, (i+1)/B) x [j/B, (j+1)/B), mirrored; x = 1 falls in the last bin.
// Points on the diagonal block are counted once.
SymmetricMatrix bin_sample(const ContactSample& sample, std::size_t bins);

// factor x factor block sums; the last block absorbs any remainder.
SymmetricMatrix rebin(const SymmetricMatrix& c, std::size_t factor);

} // namespace kdb
