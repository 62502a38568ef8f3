#include "kdb/selection.hpp"

#include "kdb/error.hpp"
#include "kdb/hic_io.hpp"
#include "kdb/parallel.hpp"
#include "kdb/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace kdb {

namespace {

double cube(double v)
{
  return v * v * v;
}

// Scores each distinct parameter once, then picks the best non-failed entry.
// better(a, b) is true when a should win over b, ties included.
template <class Param, class Eval, class Better>
SelectionReport run_selection(const std::vector<Param>& candidates, unsigned threads, Eval&& eval,
                              Better&& better)
{
  require(!candidates.empty(), ErrorCode::invalid_argument, "candidate list is empty");
  std::vector<Param> unique(candidates);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  std::vector<CandidateScore> scored(unique.size());
  parallel_for(unique.size(), threads, [&](std::size_t i) {
    CandidateScore s;
    s.parameter = static_cast<double>(unique[i]);
    try {
      eval(unique[i], s);
      if (!s.failed)
        s.mean_score = 0.5 * (s.score_a + s.score_b);
    } catch (const Error& e) {
      s.failed = true;
      s.reason = e.what();
    }
    scored[i] = std::move(s);
  });

  SelectionReport report;
  const CandidateScore* best = nullptr;
  for (const auto& s : scored)
    if (!s.failed && (best == nullptr || better(s, *best)))
      best = &s;
  if (best == nullptr) {
    std::string reasons;
    for (const auto& s : scored)
      reasons += "\n  " + std::to_string(s.parameter) + ": " + s.reason;
    fail(ErrorCode::all_candidates_failed, "no candidate produced a usable fit" + reasons);
  }
  report.chosen = best->parameter;
  for (const auto& c : candidates) {
    const auto pos = std::lower_bound(unique.begin(), unique.end(), c) - unique.begin();
    report.candidates.push_back(scored[static_cast<std::size_t>(pos)]);
  }
  return report;
}

} // namespace

CvSplit split_sample(const ContactSample& sample, std::uint64_t seed)
{
  require(!sample.empty(), ErrorCode::empty_sample, "cannot split an empty sample");
  require(sample.total_count() >= 2.0, ErrorCode::invalid_argument,
          "splitting needs a total count of at least 2");
  Rng rng(seed);
  std::vector<ContactPoint> a;
  std::vector<ContactPoint> b;
  for (const auto& p : sample.points()) {
    const double whole = std::floor(p.count);
    const double frac = p.count - whole;
    double ka = 0.0;
    if (whole > 0.0) {
      std::binomial_distribution<long long> coin(static_cast<long long>(whole), 0.5);
      ka = static_cast<double>(coin(rng));
    }
    double ca = ka;
    double cb = whole - ka;
    if (frac > 0.0) {
      if ((rng() >> 63) != 0)
        ca += frac;
      else
        cb += frac;
    }
    if (ca > 0.0)
      a.push_back({p.x, p.y, ca});
    if (cb > 0.0)
      b.push_back({p.x, p.y, cb});
  }
  return {ContactSample(std::move(a)), ContactSample(std::move(b)), seed};
}

double cvm_uniform_score(const WeightedSample& sample)
{
  require(sample.size() > 0, ErrorCode::empty_sample, "score of an empty sample");
  const auto& pts = sample.base().points();
  const auto& w = sample.weights();
  const std::size_t n = pts.size();

  std::vector<double> pos(2 * n);
  std::vector<double> mass(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const double mk = pts[k].count * w[k];
    pos[2 * k] = pts[k].x;
    pos[2 * k + 1] = pts[k].y;
    mass[2 * k] = mk;
    mass[2 * k + 1] = mk;
  }
  std::vector<std::size_t> order(2 * n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return pos[i] < pos[j] || (pos[i] == pos[j] && i < j);
  });
  double total = 0.0;
  for (std::size_t i : order)
    total += mass[i];

  // Between steps F is constant and the integral of (F - u)^2 over [a, b] is
  // ((b - F)^3 - (a - F)^3) / 3.
  double score = 0.0;
  double cum = 0.0;
  double f = 0.0;
  double prev = 0.0;
  for (std::size_t i : order) {
    const double z = pos[i];
    score += (cube(z - f) - cube(prev - f)) / 3.0;
    cum += mass[i];
    f = cum / total;
    prev = z;
  }
  score += (cube(1.0 - f) - cube(prev - f)) / 3.0;
  return score;
}

double cosine_score(const Eigen::VectorXd& r)
{
  require(r.size() > 0, ErrorCode::invalid_argument, "cosine score of an empty vector");
  double dot = 0.0;
  double sq = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    dot += r(i);
    sq += r(i) * r(i);
  }
  require(sq > 0.0, ErrorCode::invalid_argument, "cosine score of a zero vector");
  return dot / (std::sqrt(sq) * std::sqrt(static_cast<double>(r.size())));
}

SelectionReport select_bandwidth(const ContactSample& sample, const std::vector<double>& candidates,
                                 const Grid1D& grid, std::uint64_t seed,
                                 const BandwidthSelectionOptions& opts)
{
  for (double h : candidates)
    require(h > 0.0 && std::isfinite(h), ErrorCode::invalid_argument, "bandwidth candidates must be positive");
  const CvSplit split = split_sample(sample, seed);

  auto eval = [&](double h, CandidateScore& s) {
    const KernelSpec kernel{h, opts.boundary, opts.cutoff};
    const auto fa = ksk_balance(split.fold_a, kernel, grid, opts.ksk);
    const auto fb = ksk_balance(split.fold_b, kernel, grid, opts.ksk);
    if (!fa.converged() || !fb.converged()) {
      s.failed = true;
      s.reason = "balancing did not converge within the iteration limit";
      return;
    }
    // The accumulator G equals g^2 up to scale, so apply_bias(S, G) weights
    // each point by 1/(g(X) g(Y)).
    s.score_a = cvm_uniform_score(apply_bias(split.fold_b, fa.accumulator));
    s.score_b = cvm_uniform_score(apply_bias(split.fold_a, fb.accumulator));
  };
  // Lower score wins; on a tie the larger bandwidth wins.
  auto better = [](const CandidateScore& a, const CandidateScore& b) {
    return a.mean_score < b.mean_score || (a.mean_score == b.mean_score && a.parameter > b.parameter);
  };
  SelectionReport report = run_selection(candidates, opts.threads, eval, better);
  report.criterion = Criterion::cramer_von_mises;
  report.seed = seed;
  return report;
}

SelectionReport select_binsize(const ContactSample& sample, const std::vector<std::size_t>& candidates,
                               std::uint64_t seed, const BinsizeSelectionOptions& opts)
{
  for (auto b : candidates)
    require(b >= 2, ErrorCode::invalid_argument, "bin counts must be at least 2");
  const CvSplit split = split_sample(sample, seed);

  auto eval = [&](std::size_t bins, CandidateScore& s) {
    const SymmetricMatrix ca = bin_sample(split.fold_a, bins);
    const SymmetricMatrix cb = bin_sample(split.fold_b, bins);
    const auto ra = ssk_balance(ca, opts.balance);
    const auto rb = ssk_balance(cb, opts.balance);
    if (!ra.converged() || !rb.converged()) {
      s.failed = true;
      s.reason = "balancing did not converge within the iteration limit";
      return;
    }
    const Eigen::VectorXd& d1 = ra.row_scaling;
    const Eigen::VectorXd& d2 = rb.row_scaling;
    const Eigen::VectorXd r1 = d1.cwiseProduct(cb.matrix() * d1);
    const Eigen::VectorXd r2 = d2.cwiseProduct(ca.matrix() * d2);
    s.score_a = cosine_score(r1);
    s.score_b = cosine_score(r2);
  };
  // Higher score wins; on a tie the coarser binning wins.
  auto better = [](const CandidateScore& a, const CandidateScore& b) {
    return a.mean_score > b.mean_score || (a.mean_score == b.mean_score && a.parameter < b.parameter);
  };
  SelectionReport report = run_selection(candidates, opts.threads, eval, better);
  report.criterion = Criterion::cosine;
  report.seed = seed;
  return report;
}

std::string to_string(Criterion c)
{
  return c == Criterion::cramer_von_mises ? "cramer_von_mises" : "cosine";
}

std::string selection_report_json(const SelectionReport& report)
{
  nlohmann::ordered_json j;
  j["criterion"] = to_string(report.criterion);
  j["seed"] = report.seed;
  j["chosen"] = report.chosen;
  auto& arr = j["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : report.candidates) {
    nlohmann::ordered_json e;
    e["parameter"] = c.parameter;
    e["failed"] = c.failed;
    if (c.failed) {
      e["reason"] = c.reason;
    } else {
      e["score_a"] = c.score_a;
      e["score_b"] = c.score_b;
      e["mean_score"] = c.mean_score;
    }
    arr.push_back(std::move(e));
  }
  return j.dump(2);
}

} // namespace kdb
