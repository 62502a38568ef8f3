#pragma once

#include "kdb/contact_sample.hpp"
#include "kdb/grid.hpp"
#include "kdb/kernel.hpp"
#include "kdb/kernel_balance.hpp"
#include "kdb/matrix_balance.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace kdb {

struct CvSplit
{
  ContactSample fold_a;
  ContactSample fold_b;
  std::uint64_t seed = 0;
};

// Every unit of count goes to fold A or B with probability 1/2. A fractional
// remainder of a count travels as one piece with its own coin.
CvSplit split_sample(const ContactSample& sample, std::uint64_t seed);

// Exact integral over [0,1] of (F(u) - u)^2, F the weighted empirical CDF of
// both coordinates pooled, point k carrying mass c_k w_k at X_k and at Y_k.
double cvm_uniform_score(const WeightedSample& sample);

// (r . e) / (|r| |e|).
double cosine_score(const Eigen::VectorXd& r);

enum class Criterion
{
  cramer_von_mises,
  cosine
};

struct CandidateScore
{
  double parameter = 0.0;
  double score_a = 0.0;
  double score_b = 0.0;
  double mean_score = 0.0;
  bool failed = false;
  std::string reason;
};

struct SelectionReport
{
  std::vector<CandidateScore> candidates;  // input order
  double chosen = 0.0;
  Criterion criterion = Criterion::cramer_von_mises;
  std::uint64_t seed = 0;
};

struct BandwidthSelectionOptions
{
  Boundary boundary = Boundary::reflect;
  double cutoff = KernelSpec{}.cutoff;
  KskOptions ksk;
  unsigned threads = 1;
};

SelectionReport select_bandwidth(const ContactSample& sample, const std::vector<double>& candidates,
                                 const Grid1D& grid, std::uint64_t seed,
                                 const BandwidthSelectionOptions& opts = {});

struct BinsizeSelectionOptions
{
  BalanceOptions balance;
  unsigned threads = 1;
};

SelectionReport select_binsize(const ContactSample& sample, const std::vector<std::size_t>& candidates,
                               std::uint64_t seed, const BinsizeSelectionOptions& opts = {});

std::string to_string(Criterion c);
std::string selection_report_json(const SelectionReport& report);

} // namespace kdb
