#pragma once

#include "kdb/contact_sample.hpp"
#include "kdb/grid.hpp"
#include "kdb/kernel.hpp"
#include "kdb/kernel_balance.hpp"
#include "kdb/matrix_balance.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kdb {

// g(x) = cos(10 pi x) + 3.5
double cosine_bias(double x);

struct SimScenario
{
  double mean_x = 0.2;
  double mean_y = 0.8;
  double cov_scale = 0.1;    // covariance cov_scale * I
  double ridge_scale = 0.01; // exp(-(x-y)^2 / ridge_scale)
  std::size_t grid_m = 512;
  std::uint64_t seed = 0;
  std::function<double(double)> bias = cosine_bias;

  Grid1D grid() const { return Grid1D(grid_m); }
};

// Gaussian bump plus diagonal ridge on the grid, symmetrized, not balanced.
GridFunction2D sdsd_mixture(const SimScenario& scenario);

// sdsd_mixture balanced to uniform marginals on the grid.
GridFunction2D build_sdsd(const SimScenario& scenario);

// g(x) f(x,y) g(y) rescaled to unit mass.
GridFunction2D distort(const GridFunction2D& f_star, const std::function<double(double)>& bias);

// Rejection sampling against a uniform proposal; the density is constant on
// each cell and accepted points are jittered uniformly inside their cell.
ContactSample sample_density(const GridFunction2D& f, std::size_t n, std::uint64_t seed);

enum class Method
{
  ssk_histogram,
  ksk_kernel
};

std::string to_string(Method m);

struct ErrorReport
{
  double l2_error = 0.0;
  double mise = 0.0;
  std::size_t n = 0;
  Method method = Method::ksk_kernel;
  double parameter = 0.0;
};

// Both functions are put on unit mean before taking the midpoint-rule L2 distance.
ErrorReport bias_error(const GridFunction1D& estimate, const std::function<double(double)>& truth);

struct ExperimentOptions
{
  std::vector<double> bandwidths;  // log-spaced 0.005 .. 0.1, 15 values
  std::vector<std::size_t> bins{16, 24, 32, 48, 64, 96, 128, 160};
  Boundary boundary = Boundary::reflect;
  // Truncation at 10 bandwidths changes kernel sums by under 1e-21 relative.
  double cutoff = 10.0;
  KskOptions ksk;
  BalanceOptions balance;
  unsigned threads = 1;

  ExperimentOptions();
};

std::vector<double> log_spaced(double lo, double hi, std::size_t count);

struct Estimate
{
  std::optional<GridFunction1D> bias;  // on the evaluation grid, unit mean
  std::string failure;
};

// Bias estimate from one sample: KSK with bandwidth = parameter, or SSK on a
// parameter x parameter histogram spread back onto `grid` cell by cell.
Estimate estimate_bias(const ContactSample& sample, Method method, double parameter, const Grid1D& grid,
                       const ExperimentOptions& opts);

struct CandidateError
{
  double parameter = 0.0;
  double l2 = 0.0;
  bool failed = false;
  std::string failure;
};

// Error against the truth for every candidate in the method's grid.
std::vector<CandidateError> error_curve(const ContactSample& sample, Method method, const Grid1D& grid,
                                        const std::function<double(double)>& truth,
                                        const ExperimentOptions& opts);

enum class SelectionMode
{
  cv,
  oracle_grid
};

std::string to_string(SelectionMode m);

struct RunRecord
{
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  Method method = Method::ksk_kernel;
  double parameter = 0.0;  // bandwidth or bin count
  double width = 0.0;      // bandwidth or 1 / bin count
  double l2 = 0.0;
  bool failed = false;
  std::string failure;
};

struct RateRow
{
  std::size_t n = 0;
  double mean_l2 = 0.0;
  double mean_parameter = 0.0;
  double mean_width = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
};

struct RateResult
{
  std::vector<RateRow> rows;
  std::vector<RunRecord> runs;  // ordered by n, then rep
  double slope = 0.0;           // least squares slope of log(mean_l2) on log(n)
};

// Seed used for the sample of replication `rep` at size n.
std::uint64_t replication_seed(std::uint64_t base, std::size_t n, std::size_t rep);

// One replication on a prepared distorted density.
RunRecord run_replication(const GridFunction2D& density, const SimScenario& scenario, std::size_t n,
                          std::size_t rep, Method method, SelectionMode mode, const ExperimentOptions& opts);

RateResult rate_experiment(const SimScenario& scenario, const std::vector<std::size_t>& n_list, std::size_t reps,
                           Method method, SelectionMode mode, const ExperimentOptions& opts = {});

double fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& err);

} // namespace kdb
