// kdbalance: command-line front end for the balancing, selection,
// simulation and ingestion routines.
//
// Exit codes: 0 success, 2 non-convergence, 3 input or validation error,
// 1 internal error.

#include "kdb/error.hpp"
#include "kdb/hic_io.hpp"
#include "kdb/io.hpp"
#include "kdb/kernel_balance.hpp"
#include "kdb/matrix_balance.hpp"
#include "kdb/rng.hpp"
#include "kdb/selection.hpp"
#include "kdb/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef KDB_VERSION
#define KDB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_not_converged = 2;
constexpr int exit_invalid = 3;

// Everything that determines a run. Thread count and output directory are
// deliberately absent: they do not change any output byte.
struct RunConfig
{
  std::string command;
  std::string input;
  std::uint64_t seed = 0;
  double tol = -1.0;           // < 0: per-command default
  long long max_iter = -1;     // < 0: per-command default
  std::size_t grid = 512;
  double bandwidth = 0.0;
  std::size_t bins = 0;
  std::vector<double> candidates;
  std::string algorithm;
  std::string boundary = "reflect";
  double cutoff = 40.0;
  bool select = false;
  std::uint64_t chrom_length = 0;
  std::uint64_t resolution = 0;
  std::string convention = "bin_start";
  std::size_t n = 1000;
  bool rate = false;
  std::vector<std::size_t> n_list{4000, 8000, 16000, 32000, 64000};
  std::size_t reps = 10;
  std::string selection = "oracle";
};

void resolve_defaults(RunConfig& c)
{
  const bool matrix = c.command == "balance-matrix" || c.command == "select-binsize";
  if (c.tol < 0)
    c.tol = matrix ? 1e-8 : 1e-6;
  if (c.max_iter < 0)
    c.max_iter = matrix ? 10000 : 500;
  if (c.algorithm.empty()) {
    if (c.command == "balance-matrix")
      c.algorithm = "ssk";
    else if (c.command == "simulate")
      c.algorithm = "both";
    else
      c.algorithm = "ksk";
  }
}

ordered_json to_json(const RunConfig& c)
{
  ordered_json j;
  j["command"] = c.command;
  j["input"] = c.input;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["grid"] = c.grid;
  j["bandwidth"] = c.bandwidth;
  j["bins"] = c.bins;
  j["candidates"] = c.candidates;
  j["algorithm"] = c.algorithm;
  j["boundary"] = c.boundary;
  j["cutoff"] = c.cutoff;
  j["select"] = c.select;
  j["chrom_length"] = c.chrom_length;
  j["resolution"] = c.resolution;
  j["convention"] = c.convention;
  j["n"] = c.n;
  j["rate"] = c.rate;
  j["n_list"] = c.n_list;
  j["reps"] = c.reps;
  j["selection"] = c.selection;
  return j;
}

RunConfig from_json(const nlohmann::json& j)
{
  RunConfig c;
  try {
    j.at("command").get_to(c.command);
    j.at("input").get_to(c.input);
    j.at("seed").get_to(c.seed);
    j.at("tol").get_to(c.tol);
    j.at("max_iter").get_to(c.max_iter);
    j.at("grid").get_to(c.grid);
    j.at("bandwidth").get_to(c.bandwidth);
    j.at("bins").get_to(c.bins);
    j.at("candidates").get_to(c.candidates);
    j.at("algorithm").get_to(c.algorithm);
    j.at("boundary").get_to(c.boundary);
    j.at("cutoff").get_to(c.cutoff);
    j.at("select").get_to(c.select);
    j.at("chrom_length").get_to(c.chrom_length);
    j.at("resolution").get_to(c.resolution);
    j.at("convention").get_to(c.convention);
    j.at("n").get_to(c.n);
    j.at("rate").get_to(c.rate);
    j.at("n_list").get_to(c.n_list);
    j.at("reps").get_to(c.reps);
    j.at("selection").get_to(c.selection);
  } catch (const nlohmann::json::exception& e) {
    kdb::fail(kdb::ErrorCode::parse_error, std::string("report config: ") + e.what());
  }
  return c;
}

struct Context
{
  RunConfig cfg;
  fs::path out_dir = ".";
  unsigned threads = 1;
};

std::string out_path(const Context& ctx, const std::string& name)
{
  return (ctx.out_dir / name).string();
}

void write_report(const Context& ctx, const ordered_json& result)
{
  ordered_json r;
  r["tool"] = "kdbalance";
  r["version"] = KDB_VERSION;
  r["seed"] = ctx.cfg.seed;
  r["config"] = to_json(ctx.cfg);
  r["result"] = result;
  kdb::write_text(out_path(ctx, "report.json"), r.dump(2) + "\n");
}

kdb::Boundary parse_boundary(const std::string& s)
{
  if (s == "reflect")
    return kdb::Boundary::reflect;
  if (s == "none")
    return kdb::Boundary::none;
  kdb::fail(kdb::ErrorCode::invalid_argument, "unknown boundary '" + s + "'");
}

kdb::BalanceOptions balance_options(const RunConfig& c)
{
  kdb::BalanceOptions o;
  o.tol = c.tol;
  o.max_iter = static_cast<std::size_t>(c.max_iter);
  return o;
}

kdb::KskOptions ksk_options(const RunConfig& c)
{
  kdb::KskOptions o;
  o.tol = c.tol;
  o.max_iter = static_cast<std::size_t>(c.max_iter);
  return o;
}

kdb::ContactSample read_nonempty_sample(const std::string& path)
{
  auto s = kdb::read_sample_tsv(path);
  kdb::require(!s.empty(), kdb::ErrorCode::empty_sample, path + " contains no contacts");
  return s;
}

std::vector<std::size_t> bin_candidates(const std::vector<double>& v)
{
  std::vector<std::size_t> out;
  for (double b : v) {
    kdb::require(b >= 2 && b == std::floor(b), kdb::ErrorCode::invalid_argument,
                 "bin candidates must be integers of at least 2");
    out.push_back(static_cast<std::size_t>(b));
  }
  return out;
}

ordered_json selection_json(const kdb::SelectionReport& r)
{
  return ordered_json::parse(kdb::selection_report_json(r));
}

int status_exit(kdb::Status s, const std::string& what)
{
  if (s == kdb::Status::converged)
    return exit_ok;
  std::cerr << "kdbalance: " << what << " did not converge within the iteration limit\n";
  return exit_not_converged;
}

int cmd_balance_matrix(const Context& ctx)
{
  const auto& c = ctx.cfg;
  const Eigen::MatrixXd m = kdb::read_matrix_tsv(c.input);
  kdb::MatrixBalanceResult res;
  if (c.algorithm == "ssk")
    res = kdb::ssk_balance(kdb::SymmetricMatrix(m), balance_options(c));
  else if (c.algorithm == "sk")
    res = kdb::sk_balance(m, balance_options(c));
  else
    kdb::fail(kdb::ErrorCode::invalid_argument, "balance-matrix takes --algorithm sk or ssk");

  kdb::write_matrix_tsv(out_path(ctx, "balanced.tsv"), res.balanced);
  kdb::write_vector(out_path(ctx, "balancing.txt"), res.row_scaling);
  if (c.algorithm == "sk")
    kdb::write_vector(out_path(ctx, "col_scaling.txt"), res.col_scaling);
  ordered_json r;
  r["iterations"] = res.iterations;
  r["residual"] = res.residual;
  r["status"] = kdb::to_string(res.status);
  write_report(ctx, r);
  return status_exit(res.status, "matrix balancing");
}

int cmd_balance_kernel(const Context& ctx)
{
  const auto& c = ctx.cfg;
  const auto sample = read_nonempty_sample(c.input);
  const kdb::Grid1D grid(c.grid);
  const auto boundary = parse_boundary(c.boundary);
  ordered_json r;
  double h = c.bandwidth;
  if (c.select) {
    kdb::require(!c.candidates.empty(), kdb::ErrorCode::invalid_argument, "--select needs --candidates");
    kdb::BandwidthSelectionOptions so{boundary, c.cutoff, ksk_options(c), ctx.threads};
    const auto sel = kdb::select_bandwidth(sample, c.candidates, grid, c.seed, so);
    kdb::write_text(out_path(ctx, "selection.json"), kdb::selection_report_json(sel) + "\n");
    r["selection"] = selection_json(sel);
    h = sel.chosen;
  }
  kdb::require(h > 0.0, kdb::ErrorCode::invalid_argument, "give --bandwidth or --select with --candidates");
  const auto res = kdb::ksk_balance(sample, kdb::KernelSpec{h, boundary, c.cutoff}, grid, ksk_options(c));
  kdb::write_bias_tsv(out_path(ctx, "bias.tsv"), res.bias);
  r["bandwidth"] = h;
  r["iterations"] = res.iterations;
  r["residual"] = res.residual;
  r["status"] = kdb::to_string(res.status);
  write_report(ctx, r);
  return status_exit(res.status, "kernel balancing");
}

int cmd_select_bandwidth(const Context& ctx)
{
  const auto& c = ctx.cfg;
  const auto sample = read_nonempty_sample(c.input);
  kdb::BandwidthSelectionOptions so{parse_boundary(c.boundary), c.cutoff, ksk_options(c), ctx.threads};
  const auto sel = kdb::select_bandwidth(sample, c.candidates, kdb::Grid1D(c.grid), c.seed, so);
  kdb::write_text(out_path(ctx, "selection.json"), kdb::selection_report_json(sel) + "\n");
  write_report(ctx, ordered_json{{"chosen", sel.chosen}});
  std::cout << kdb::format_number(sel.chosen) << "\n";
  return exit_ok;
}

int cmd_select_binsize(const Context& ctx)
{
  const auto& c = ctx.cfg;
  const auto sample = read_nonempty_sample(c.input);
  kdb::BinsizeSelectionOptions so{balance_options(c), ctx.threads};
  const auto sel = kdb::select_binsize(sample, bin_candidates(c.candidates), c.seed, so);
  kdb::write_text(out_path(ctx, "selection.json"), kdb::selection_report_json(sel) + "\n");
  write_report(ctx, ordered_json{{"chosen", sel.chosen}});
  std::cout << kdb::format_number(sel.chosen) << "\n";
  return exit_ok;
}

int cmd_simulate(const Context& ctx)
{
  const auto& c = ctx.cfg;
  kdb::SimScenario sc;
  sc.grid_m = c.grid;
  sc.seed = c.seed;
  const auto density = kdb::distort(kdb::build_sdsd(sc), sc.bias);
  const auto sample = kdb::sample_density(density, c.n, kdb::replication_seed(c.seed, c.n, 0));
  kdb::write_sample_tsv(out_path(ctx, "sample.tsv"), sample);
  kdb::write_bias_tsv(out_path(ctx, "truth_bias.tsv"),
                      kdb::normalize_unit_mean(kdb::GridFunction1D::sample(sc.grid(), sc.bias)));
  ordered_json r;
  r["sample_size"] = sample.size();
  if (!c.rate) {
    write_report(ctx, r);
    return exit_ok;
  }

  std::vector<kdb::Method> methods;
  if (c.algorithm == "both" || c.algorithm == "ksk")
    methods.push_back(kdb::Method::ksk_kernel);
  if (c.algorithm == "both" || c.algorithm == "ssk")
    methods.push_back(kdb::Method::ssk_histogram);
  kdb::require(!methods.empty(), kdb::ErrorCode::invalid_argument, "simulate takes --algorithm ksk, ssk or both");
  kdb::SelectionMode mode;
  if (c.selection == "oracle")
    mode = kdb::SelectionMode::oracle_grid;
  else if (c.selection == "cv")
    mode = kdb::SelectionMode::cv;
  else
    kdb::fail(kdb::ErrorCode::invalid_argument, "--selection is oracle or cv");

  kdb::ExperimentOptions opts;
  opts.threads = ctx.threads;
  std::ostringstream runs;
  std::ostringstream table;
  runs << "n\trep\tmethod\tparameter\tl2\tstatus\n";
  table << "n\tmethod\tparameter\tl2\truns\tfailures\n";
  std::cout << "method\tn\tmean_parameter\tmean_l2\n";
  ordered_json slopes;
  for (auto m : methods) {
    const auto res = kdb::rate_experiment(sc, c.n_list, c.reps, m, mode, opts);
    const auto name = kdb::to_string(m);
    for (const auto& run : res.runs)
      runs << run.n << '\t' << run.rep << '\t' << name << '\t' << kdb::format_number(run.parameter) << '\t'
           << (run.failed ? "nan" : kdb::format_number(run.l2)) << '\t' << (run.failed ? "failed" : "ok")
           << '\n';
    for (const auto& row : res.rows) {
      table << row.n << '\t' << name << '\t' << kdb::format_number(row.mean_parameter) << '\t'
            << kdb::format_number(row.mean_l2) << '\t' << row.runs << '\t' << row.failures << '\n';
      std::cout << name << '\t' << row.n << '\t' << kdb::format_number(row.mean_parameter) << '\t'
                << kdb::format_number(row.mean_l2) << '\n';
    }
    std::cout << name << "\tslope\t" << kdb::format_number(res.slope) << '\n';
    slopes[name] = res.slope;
  }
  kdb::write_text(out_path(ctx, "runs.tsv"), runs.str());
  kdb::write_text(out_path(ctx, "rate.tsv"), table.str());
  r["slopes"] = slopes;
  write_report(ctx, r);
  return exit_ok;
}

int cmd_evaluate(const Context& ctx)
{
  const auto est = kdb::read_bias_tsv(ctx.cfg.input);
  const auto rep = kdb::bias_error(est, kdb::cosine_bias);
  write_report(ctx, ordered_json{{"l2_error", rep.l2_error}, {"mise", rep.mise}});
  std::cout << "l2\t" << kdb::format_number(rep.l2_error) << "\n";
  return exit_ok;
}

int cmd_ingest(const Context& ctx)
{
  const auto& c = ctx.cfg;
  kdb::PositionConvention conv;
  if (c.convention == "bin_start")
    conv = kdb::PositionConvention::bin_start;
  else if (c.convention == "midpoint")
    conv = kdb::PositionConvention::midpoint;
  else
    kdb::fail(kdb::ErrorCode::invalid_argument, "--convention is bin_start or midpoint");
  const auto records = kdb::read_contact_records(c.input);
  const auto sample = kdb::rescale_to_unit(records, kdb::ChromContext{c.chrom_length, c.resolution}, conv);
  kdb::write_sample_tsv(out_path(ctx, "sample.tsv"), sample);
  ordered_json r;
  r["records"] = records.size();
  r["total_count"] = sample.empty() ? 0.0 : sample.total_count();
  if (c.bins > 0)
    kdb::write_matrix_tsv(out_path(ctx, "matrix.tsv"), kdb::bin_sample(sample, c.bins).matrix());
  write_report(ctx, r);
  return exit_ok;
}

int dispatch(Context ctx)
{
  resolve_defaults(ctx.cfg);
  fs::create_directories(ctx.out_dir);
  const auto& cmd = ctx.cfg.command;
  if (cmd == "balance-matrix")
    return cmd_balance_matrix(ctx);
  if (cmd == "balance-kernel")
    return cmd_balance_kernel(ctx);
  if (cmd == "select-bandwidth")
    return cmd_select_bandwidth(ctx);
  if (cmd == "select-binsize")
    return cmd_select_binsize(ctx);
  if (cmd == "simulate")
    return cmd_simulate(ctx);
  if (cmd == "evaluate")
    return cmd_evaluate(ctx);
  if (cmd == "ingest")
    return cmd_ingest(ctx);
  kdb::fail(kdb::ErrorCode::invalid_argument, "unknown command '" + cmd + "'");
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Matrix and kernel balancing for symmetric contact data"};
  app.set_version_flag("--version", KDB_VERSION);
  app.require_subcommand(1);

  Context ctx;
  auto& c = ctx.cfg;
  std::string out_dir = ".";
  std::string from_report;

  auto common = [&](CLI::App* s) {
    s->add_option("--output-dir", out_dir, "Directory for output files");
    s->add_option("--threads", ctx.threads, "Worker threads; outputs do not depend on it")
      ->check(CLI::PositiveNumber);
  };
  auto with_input = [&](CLI::App* s, const std::string& what) {
    s->add_option("--input", c.input, what)->required();
  };
  auto with_iter = [&](CLI::App* s) {
    s->add_option("--tol", c.tol, "Convergence tolerance")->check(CLI::PositiveNumber);
    s->add_option("--max-iter", c.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
  };
  auto with_kernel = [&](CLI::App* s) {
    s->add_option("--grid", c.grid, "Evaluation grid size")->check(CLI::Range(2, 1 << 20));
    s->add_option("--boundary", c.boundary, "Kernel boundary: reflect or none");
    s->add_option("--cutoff", c.cutoff, "Kernel truncation in bandwidths")->check(CLI::PositiveNumber);
  };

  auto* bm = app.add_subcommand("balance-matrix", "Balance a symmetric matrix to unit margins");
  with_input(bm, "Matrix TSV");
  with_iter(bm);
  bm->add_option("--algorithm", c.algorithm, "sk or ssk");
  common(bm);

  auto* bk = app.add_subcommand("balance-kernel", "Estimate the bias of a contact sample by kernel balancing");
  with_input(bk, "Sample TSV");
  with_iter(bk);
  with_kernel(bk);
  bk->add_option("--bandwidth", c.bandwidth, "Kernel bandwidth")->check(CLI::PositiveNumber);
  bk->add_flag("--select", c.select, "Choose the bandwidth by cross-validation");
  bk->add_option("--candidates", c.candidates, "Comma-separated bandwidths")->delimiter(',');
  bk->add_option("--seed", c.seed, "Seed for the cross-validation split");
  common(bk);

  auto* sb = app.add_subcommand("select-bandwidth", "Cross-validated bandwidth choice");
  with_input(sb, "Sample TSV");
  with_iter(sb);
  with_kernel(sb);
  sb->add_option("--candidates", c.candidates, "Comma-separated bandwidths")->delimiter(',')->required();
  sb->add_option("--seed", c.seed, "Seed for the split");
  common(sb);

  auto* sn = app.add_subcommand("select-binsize", "Cross-validated bin count choice");
  with_input(sn, "Sample TSV");
  with_iter(sn);
  sn->add_option("--candidates", c.candidates, "Comma-separated bin counts")->delimiter(',')->required();
  sn->add_option("--seed", c.seed, "Seed for the split");
  common(sn);

  auto* sim = app.add_subcommand("simulate", "Draw a sample from the simulation scenario");
  sim->add_option("--n", c.n, "Sample size");
  sim->add_option("--seed", c.seed, "Scenario seed");
  sim->add_option("--grid", c.grid, "Density grid size")->check(CLI::Range(64, 1 << 14));
  sim->add_flag("--rate", c.rate, "Also run the error-rate experiment");
  sim->add_option("--n-list", c.n_list, "Comma-separated sample sizes for --rate")->delimiter(',');
  sim->add_option("--reps", c.reps, "Replications per sample size")->check(CLI::PositiveNumber);
  sim->add_option("--algorithm", c.algorithm, "ksk, ssk or both");
  sim->add_option("--selection", c.selection, "oracle or cv");
  common(sim);

  auto* ev = app.add_subcommand("evaluate", "L2 error of a bias estimate against the simulation bias");
  with_input(ev, "Bias TSV");
  common(ev);

  auto* in = app.add_subcommand("ingest", "Convert a three-column contact list to a unit-square sample");
  with_input(in, "Contact list, optionally .gz");
  in->add_option("--chrom-length", c.chrom_length, "Chromosome length in bp")->required();
  in->add_option("--resolution", c.resolution, "Resolution in bp")->required();
  in->add_option("--convention", c.convention, "bin_start or midpoint");
  in->add_option("--bins", c.bins, "Also write a binned matrix with this many bins");
  common(in);

  auto* rr = app.add_subcommand("rerun", "Repeat a run from its report.json");
  rr->add_option("--from-report", from_report, "Report written by an earlier run")->required();
  common(rr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_invalid;
  }

  try {
    if (rr->parsed()) {
      const auto text = kdb::read_text(from_report);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::exception& e) {
        kdb::fail(kdb::ErrorCode::parse_error, from_report + ": " + e.what());
      }
      kdb::require(j.contains("config"), kdb::ErrorCode::parse_error, from_report + ": no config");
      c = from_json(j["config"]);
    } else {
      c.command = app.get_subcommands().front()->get_name();
    }
    ctx.out_dir = out_dir;
    return dispatch(ctx);
  } catch (const kdb::Error& e) {
    std::cerr << "kdbalance: " << e.what() << "\n";
    return e.code() == kdb::ErrorCode::not_converged ? exit_not_converged : exit_invalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "kdbalance: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "kdbalance: internal error: " << e.what() << "\n";
    return exit_internal;
  }
}
