// detkdpp: landmark selection benchmark, kernel spectrum dump and
// summarization for kernel matrices.
//
//   detkdpp bench     --dataset synthetic:200:4 --sigma 1 --k 5,10,20 --out bench.csv
//   detkdpp spectrum  --dataset data.csv --sigma 2
//   detkdpp summarize --dataset hist.csv --kernel hik --k 4 --out kpca.csv
//
// Exit codes: 0 success, 1 configuration error, 2 some benchmark rows failed.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "detkdpp/detkdpp.hpp"

namespace {

using namespace detkdpp;

struct Options {
  std::string dataset;
  double sigma = 1.0;
  std::string kernel = "gaussian";
  std::vector<std::string> methods{"uniform", "kdpp", "greedy", "das"};
  std::vector<Index> k_values;
  int trials = 10;
  std::uint64_t seed = 0;
  std::vector<double> gamma_grid = default_gamma_grid();
  double epsilon = kDefaultNystromEpsilon;
  std::string norm = "op";
  std::string out;
  unsigned threads = 1;
  bool no_standardize = false;
  bool normalize_histograms = false;
  bool no_center = false;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.dataset, "CSV file (one point per row) or synthetic:<n>:<clusters>[:<seed>[:<spread>]]")
      ->required();
  cmd->add_option("--sigma", o.sigma, "Gaussian kernel bandwidth")->capture_default_str();
  cmd->add_option("--kernel", o.kernel, "gaussian, hik (histogram intersection) or precomputed")
      ->check(CLI::IsMember({"gaussian", "hik", "precomputed"}))
      ->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "Nystrom regularization added to K_CC")->capture_default_str();
  cmd->add_option("--out", o.out, "output CSV path (default: stdout)");
  cmd->add_flag("--no-standardize", o.no_standardize, "skip z-scoring columns before the Gaussian kernel");
  cmd->add_flag("--normalize-histograms", o.normalize_histograms, "L1-normalize rows before the hik kernel");
}

ExperimentConfig to_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.dataset = o.dataset;
  cfg.sigma = o.sigma;
  cfg.kernel = o.kernel == "hik" ? KernelKind::HistogramIntersection
               : o.kernel == "precomputed" ? KernelKind::Precomputed
                                           : KernelKind::Gaussian;
  cfg.methods.clear();
  for (const auto& m : o.methods) cfg.methods.push_back(parse_bench_method(m));
  cfg.k_values = o.k_values;
  cfg.trials = o.trials;
  cfg.base_seed = o.seed;
  cfg.gamma_grid = o.gamma_grid;
  cfg.epsilon = o.epsilon;
  cfg.norm = o.norm == "max" ? NormKind::Max : NormKind::Operator;
  cfg.threads = o.threads;
  cfg.standardize = !o.no_standardize;
  cfg.normalize_histograms = o.normalize_histograms;
  cfg.center = !o.no_center;
  return validated(cfg);
}

// Runs body with the output stream selected by --out.
template <typename Body>
void with_output(const std::string& path, Body&& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + path);
  body(file);
}

void print_warnings(const Dataset& data) {
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diverse landmark selection for kernel matrices"};
  app.require_subcommand(1);
  Options o;

  auto* bench = app.add_subcommand("bench", "sweep samplers over k and trials, write one CSV row per measurement");
  add_common(bench, o);
  bench->add_option("--methods", o.methods, "comma-separated subset of uniform,kdpp,dpp,greedy,das")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--k", o.k_values, "comma-separated landmark counts")->delimiter(',')->required();
  bench->add_option("--trials", o.trials, "trials per (method, k)")->capture_default_str();
  bench->add_option("--seed", o.seed, "base seed; trial t uses seed + 1000 t")->capture_default_str();
  bench->add_option("--gamma-grid", o.gamma_grid, "comma-separated DAS regularization values")->delimiter(',');
  bench->add_option("--norm", o.norm, "norm used to pick das_best")
      ->check(CLI::IsMember({"op", "max"}))
      ->capture_default_str();
  bench->add_option("--threads", o.threads, "worker threads for the sweep")->capture_default_str();
  bench->add_flag("--no-timing", o.no_timing, "leave wall_time_seconds empty (reproducible output)");

  auto* spectrum = app.add_subcommand("spectrum", "write the kernel eigenvalues as index,eigenvalue");
  add_common(spectrum, o);

  Index summary_k = 0;
  auto* summary = app.add_subcommand("summarize", "greedy landmarks plus 2-D KPCA coordinates");
  add_common(summary, o);
  summary->add_option("--k", summary_k, "number of landmarks")->required()->check(CLI::PositiveNumber);
  summary->add_flag("--no-center", o.no_center, "use the uncentered Gram matrix for KPCA");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  ExperimentConfig cfg;
  Dataset data{"", KernelMatrix(Matrix::Zero(1, 1), KernelKind::Precomputed), std::nullopt, {}, {}};
  try {
    cfg = to_config(o);
    data = load_dataset(cfg);
    print_warnings(data);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (bench->parsed()) {
      const auto rows = run_benchmark(cfg, data);
      with_output(o.out, [&](std::ostream& out) { write_bench_csv(out, rows, !o.no_timing); });
      if (has_failures(rows)) {
        std::size_t failed = 0;
        for (const auto& r : rows) failed += !r.error.empty();
        std::cerr << "warning: " << failed << " of " << rows.size() << " rows reported errors\n";
        return 2;
      }
    } else if (spectrum->parsed()) {
      const Vector values = dump_spectrum(data);
      with_output(o.out, [&](std::ostream& out) { write_spectrum_csv(out, values); });
    } else if (summary->parsed()) {
      const Summary s = summarize(data, summary_k, cfg.center);
      with_output(o.out, [&](std::ostream& out) { write_summary_csv(out, s); });
      (o.out.empty() ? std::cerr : std::cout) << serialize(s.landmarks) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
