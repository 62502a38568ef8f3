#include "kdb/sim.hpp"

#include "kdb/error.hpp"
#include "kdb/hic_io.hpp"
#include "kdb/parallel.hpp"
#include "kdb/rng.hpp"
#include "kdb/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kdb {

double cosine_bias(double x)
{
  return std::cos(10.0 * std::numbers::pi * x) + 3.5;
}

std::string to_string(Method m)
{
  return m == Method::ksk_kernel ? "ksk" : "ssk";
}

std::string to_string(SelectionMode m)
{
  return m == SelectionMode::cv ? "cv" : "oracle";
}

GridFunction2D sdsd_mixture(const SimScenario& sc)
{
  require(sc.grid_m >= 64, ErrorCode::invalid_argument, "the simulation grid needs at least 64 cells");
  require(sc.cov_scale > 0.0 && sc.ridge_scale > 0.0, ErrorCode::invalid_argument,
          "covariance and ridge scales must be positive");
  const Grid1D grid = sc.grid();
  const std::size_t m = grid.size();
  const double norm = 1.0 / (2.0 * std::numbers::pi * sc.cov_scale);
  std::vector<double> raw(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = grid.center(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double y = grid.center(j);
      const double dx = x - sc.mean_x;
      const double dy = y - sc.mean_y;
      const double bump = norm * std::exp(-(dx * dx + dy * dy) / (2.0 * sc.cov_scale));
      const double d = x - y;
      raw[i * m + j] = bump + std::exp(-d * d / sc.ridge_scale);
    }
  }
  std::vector<double> sym(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      sym[i * m + j] = 0.5 * (raw[i * m + j] + raw[j * m + i]);
  return GridFunction2D(grid, std::move(sym), true);
}

GridFunction2D build_sdsd(const SimScenario& sc)
{
  const auto res = cssk_grid_balance(sdsd_mixture(sc), 1e-12, 100000);
  require(res.converged(), ErrorCode::not_converged,
          "balancing the simulated density stopped at residual " + std::to_string(res.residual));
  return res.balanced;
}

GridFunction2D distort(const GridFunction2D& f_star, const std::function<double(double)>& bias)
{
  const Grid1D& grid = f_star.grid();
  const std::size_t m = grid.size();
  std::vector<double> g(m);
  for (std::size_t i = 0; i < m; ++i) {
    g[i] = bias(grid.center(i));
    require(g[i] > 0.0 && std::isfinite(g[i]), ErrorCode::not_strictly_positive,
            "bias is not positive at x = " + std::to_string(grid.center(i)));
  }
  std::vector<double> v(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      v[i * m + j] = f_star(i, j) * (g[i] * g[j]);
  const double mass = GridFunction2D(grid, v).total_mass();
  for (double& x : v)
    x /= mass;
  return GridFunction2D(grid, std::move(v), f_star.symmetric());
}

ContactSample sample_density(const GridFunction2D& f, std::size_t n, std::uint64_t seed)
{
  const auto& vals = f.values();
  for (double v : vals)
    require(v >= 0.0, ErrorCode::invalid_argument, "density has a negative cell");
  const double mass = f.total_mass();
  require(std::abs(mass - 1.0) <= 1e-6, ErrorCode::invalid_argument,
          "density must have unit mass, found " + std::to_string(mass));
  if (n == 0)
    return ContactSample();

  const std::size_t m = f.size();
  const double md = static_cast<double>(m);
  const double cells = md * md;
  const double env = *std::max_element(vals.begin(), vals.end()) * (1.0 + 1e-9);
  Rng rng(seed);
  std::vector<ContactPoint> pts;
  pts.reserve(n);
  while (pts.size() < n) {
    auto cell = static_cast<std::size_t>(uniform01(rng) * cells);
    cell = std::min(cell, m * m - 1);
    if (uniform01(rng) * env >= vals[cell])
      continue;
    const double x = (static_cast<double>(cell / m) + uniform01(rng)) / md;
    const double y = (static_cast<double>(cell % m) + uniform01(rng)) / md;
    pts.push_back({std::min(x, y), std::max(x, y), 1.0});
  }
  return ContactSample(std::move(pts));
}

ErrorReport bias_error(const GridFunction1D& estimate, const std::function<double(double)>& truth)
{
  require(estimate.min() > 0.0, ErrorCode::not_strictly_positive, "bias estimate must be positive");
  const GridFunction1D e = normalize_unit_mean(estimate);
  const GridFunction1D t = normalize_unit_mean(GridFunction1D::sample(estimate.grid(), truth));
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double d = e[i] - t[i];
    s += d * d;
  }
  ErrorReport r;
  r.mise = s / static_cast<double>(e.size());
  r.l2_error = std::sqrt(r.mise);
  return r;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count)
{
  require(lo > 0.0 && hi >= lo && count >= 1, ErrorCode::invalid_argument, "bad log-spaced range");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    v[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

ExperimentOptions::ExperimentOptions() : bandwidths(log_spaced(0.005, 0.1, 15)) {}

Estimate estimate_bias(const ContactSample& sample, Method method, double parameter, const Grid1D& grid,
                       const ExperimentOptions& opts)
{
  Estimate out;
  try {
    if (method == Method::ksk_kernel) {
      const KernelSpec kernel{parameter, opts.boundary, opts.cutoff};
      auto res = ksk_balance(sample, kernel, grid, opts.ksk);
      if (!res.converged()) {
        out.failure = "kernel balancing stopped at residual " + std::to_string(res.residual);
        return out;
      }
      out.bias = std::move(res.bias);
    } else {
      const auto bins = static_cast<std::size_t>(parameter);
      const auto res = ssk_balance(bin_sample(sample, bins), opts.balance);
      if (!res.converged()) {
        out.failure = "matrix balancing stopped at residual " + std::to_string(res.residual);
        return out;
      }
      const GridFunction1D coarse = histogram_bias(res, Grid1D(bins));
      const Grid1D cgrid(bins);
      std::vector<double> v(grid.size());
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = coarse[cgrid.cell_of(grid.center(i))];
      out.bias = normalize_unit_mean(GridFunction1D(grid, std::move(v)));
    }
  } catch (const Error& e) {
    out.failure = e.what();
  }
  return out;
}

std::vector<CandidateError> error_curve(const ContactSample& sample, Method method, const Grid1D& grid,
                                        const std::function<double(double)>& truth,
                                        const ExperimentOptions& opts)
{
  std::vector<double> params;
  if (method == Method::ksk_kernel)
    params = opts.bandwidths;
  else
    for (auto b : opts.bins)
      params.push_back(static_cast<double>(b));
  std::vector<CandidateError> out;
  for (double p : params) {
    CandidateError c;
    c.parameter = p;
    auto est = estimate_bias(sample, method, p, grid, opts);
    if (est.bias) {
      c.l2 = bias_error(*est.bias, truth).l2_error;
    } else {
      c.failed = true;
      c.failure = est.failure;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::uint64_t replication_seed(std::uint64_t base, std::size_t n, std::size_t rep)
{
  return derive_seed(base, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
}

RunRecord run_replication(const GridFunction2D& density, const SimScenario& sc, std::size_t n, std::size_t rep,
                          Method method, SelectionMode mode, const ExperimentOptions& opts)
{
  RunRecord rec;
  rec.n = n;
  rec.rep = rep;
  rec.method = method;
  rec.seed = replication_seed(sc.seed, n, rep);
  const Grid1D grid = density.grid();
  const ContactSample sample = sample_density(density, n, rec.seed);

  auto finish = [&](double param, double l2) {
    rec.parameter = param;
    rec.width = method == Method::ksk_kernel ? param : 1.0 / param;
    rec.l2 = l2;
  };

  if (mode == SelectionMode::oracle_grid) {
    const auto curve = error_curve(sample, method, grid, sc.bias, opts);
    const CandidateError* best = nullptr;
    for (const auto& c : curve) {
      if (c.failed)
        continue;
      // Ties go to the smoother model.
      const bool smoother = best != nullptr && (method == Method::ksk_kernel ? c.parameter > best->parameter
                                                                              : c.parameter < best->parameter);
      if (best == nullptr || c.l2 < best->l2 || (c.l2 == best->l2 && smoother))
        best = &c;
    }
    if (best == nullptr) {
      rec.failed = true;
      rec.failure = "every candidate failed";
      return rec;
    }
    finish(best->parameter, best->l2);
    return rec;
  }

  const std::uint64_t cv_seed = derive_seed(rec.seed, {1});
  double chosen = 0.0;
  try {
    if (method == Method::ksk_kernel) {
      BandwidthSelectionOptions so;
      so.boundary = opts.boundary;
      so.cutoff = opts.cutoff;
      so.ksk = opts.ksk;
      chosen = select_bandwidth(sample, opts.bandwidths, grid, cv_seed, so).chosen;
    } else {
      BinsizeSelectionOptions so;
      so.balance = opts.balance;
      chosen = select_binsize(sample, opts.bins, cv_seed, so).chosen;
    }
  } catch (const Error& e) {
    rec.failed = true;
    rec.failure = e.what();
    return rec;
  }
  const auto est = estimate_bias(sample, method, chosen, grid, opts);
  if (!est.bias) {
    rec.failed = true;
    rec.failure = est.failure;
    return rec;
  }
  finish(chosen, bias_error(*est.bias, sc.bias).l2_error);
  return rec;
}

RateResult rate_experiment(const SimScenario& sc, const std::vector<std::size_t>& n_list, std::size_t reps,
                           Method method, SelectionMode mode, const ExperimentOptions& opts)
{
  require(!n_list.empty(), ErrorCode::invalid_argument, "n list is empty");
  require(reps >= 1, ErrorCode::invalid_argument, "need at least one replication");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    require(n_list[i] > n_list[i - 1], ErrorCode::invalid_argument, "n list must be increasing");

  const GridFunction2D density = distort(build_sdsd(sc), sc.bias);
  RateResult out;
  out.runs.resize(n_list.size() * reps);
  parallel_for(out.runs.size(), opts.threads, [&](std::size_t idx) {
    out.runs[idx] = run_replication(density, sc, n_list[idx / reps], idx % reps, method, mode, opts);
  });

  std::vector<double> ns;
  std::vector<double> errs;
  for (std::size_t a = 0; a < n_list.size(); ++a) {
    RateRow row;
    row.n = n_list[a];
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& rec = out.runs[a * reps + r];
      if (rec.failed) {
        ++row.failures;
        continue;
      }
      ++row.runs;
      row.mean_l2 += rec.l2;
      row.mean_parameter += rec.parameter;
      row.mean_width += rec.width;
    }
    if (row.runs > 0) {
      const auto k = static_cast<double>(row.runs);
      row.mean_l2 /= k;
      row.mean_parameter /= k;
      row.mean_width /= k;
      ns.push_back(static_cast<double>(row.n));
      errs.push_back(row.mean_l2);
    }
    out.rows.push_back(row);
  }
  out.slope = ns.size() >= 2 ? fit_loglog_slope(ns, errs) : 0.0;
  return out;
}

double fit_loglog_slope(const std::vector<double>& n, const std::vector<double>& err)
{
  require(n.size() == err.size() && n.size() >= 2, ErrorCode::invalid_argument,
          "slope fit needs two or more matching points");
  const auto k = static_cast<double>(n.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    require(n[i] > 0.0 && err[i] > 0.0, ErrorCode::invalid_argument, "slope fit needs positive values");
    mx += std::log(n[i]);
    my += std::log(err[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double dx = std::log(n[i]) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  require(sxx > 0.0, ErrorCode::invalid_argument, "slope fit needs distinct n values");
  return sxy / sxx;
}

} // namespace kdb
