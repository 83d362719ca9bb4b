#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "csv.hpp"
#include "greedy.hpp"
#include "kernel.hpp"
#include "landmarks.hpp"
#include "nystrom.hpp"
#include "random.hpp"
#include "samplers.hpp"
#include "spectral.hpp"

namespace detkdpp {

enum class BenchMethod { Uniform, Kdpp, Dpp, Greedy, Das };

inline std::string to_string(BenchMethod m) {
  switch (m) {
    case BenchMethod::Uniform: return "uniform";
    case BenchMethod::Kdpp: return "kdpp";
    case BenchMethod::Dpp: return "dpp";
    case BenchMethod::Greedy: return "greedy";
    case BenchMethod::Das: return "das";
  }
  return "unknown";
}

inline BenchMethod parse_bench_method(const std::string& name) {
  for (BenchMethod m : {BenchMethod::Uniform, BenchMethod::Kdpp, BenchMethod::Dpp, BenchMethod::Greedy, BenchMethod::Das}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidInput, "unknown method '" + name + "' (expected uniform, kdpp, dpp, greedy or das)");
}

enum class NormKind { Operator, Max };

inline std::vector<double> default_gamma_grid() { return {1e0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

struct ExperimentConfig {
  std::string dataset;  // CSV path or synthetic:<n>:<clusters>[:<seed>[:<spread>]]
  double sigma = 1.0;
  KernelKind kernel = KernelKind::Gaussian;
  bool standardize = true;           // gaussian kernel only
  bool normalize_histograms = false;  // hik only
  std::vector<BenchMethod> methods{BenchMethod::Uniform, BenchMethod::Kdpp, BenchMethod::Greedy, BenchMethod::Das};
  std::vector<Index> k_values;
  int trials = 10;
  std::uint64_t base_seed = 0;
  std::vector<double> gamma_grid = default_gamma_grid();
  double epsilon = kDefaultNystromEpsilon;
  NormKind norm = NormKind::Operator;
  unsigned threads = 1;
  bool center = true;  // KPCA centering for summarize
};

// Sorts and dedupes k_values, then checks the remaining invariants.
inline ExperimentConfig validated(ExperimentConfig cfg) {
  std::sort(cfg.k_values.begin(), cfg.k_values.end());
  cfg.k_values.erase(std::unique(cfg.k_values.begin(), cfg.k_values.end()), cfg.k_values.end());
  if (cfg.dataset.empty()) throw Error(ErrorCode::InvalidInput, "no dataset given");
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidInput, "trials must be at least 1");
  if (!cfg.k_values.empty() && cfg.k_values.front() < 1) throw Error(ErrorCode::InvalidInput, "k values must be positive");
  if (!(cfg.epsilon >= 0.0)) throw Error(ErrorCode::InvalidInput, "epsilon must be nonnegative");
  if (cfg.kernel == KernelKind::Gaussian && !(cfg.sigma > 0.0)) {
    throw Error(ErrorCode::InvalidBandwidth, "sigma must be positive");
  }
  const bool das = std::find(cfg.methods.begin(), cfg.methods.end(), BenchMethod::Das) != cfg.methods.end();
  if (das && cfg.gamma_grid.empty()) throw Error(ErrorCode::InvalidInput, "gamma grid is empty but das is enabled");
  for (double g : cfg.gamma_grid) {
    if (!(g > 0.0)) throw Error(ErrorCode::InvalidInput, "gamma values must be positive");
  }
  if (cfg.threads < 1) cfg.threads = 1;
  return cfg;
}

// ---------------------------------------------------------------------------
// Datasets

struct SyntheticData {
  DataMatrix points;
  std::vector<int> labels;
};

// Seeded 2-D Gaussian mixture. Cluster j is centered on a circle of radius 5
// (angle 2 pi j / c plus a seeded rotation) with per-coordinate standard
// deviation spread, and receives points with probability proportional to
// 1 / (j + 1), so the first cluster forms the bulk.
inline SyntheticData gaussian_mixture(Index n, int clusters, std::uint64_t seed, double spread = 1.0) {
  if (n < 1 || clusters < 1) throw Error(ErrorCode::InvalidInput, "synthetic data needs n >= 1 and clusters >= 1");
  if (!(spread > 0.0) || !std::isfinite(spread)) throw Error(ErrorCode::InvalidInput, "synthetic spread must be positive");
  Rng rng(seed);
  constexpr double radius = 5.0;
  constexpr double two_pi = 6.283185307179586;
  const double rotation = two_pi * rng.uniform();
  std::vector<double> cumulative;
  double total = 0.0;
  for (int j = 0; j < clusters; ++j) cumulative.push_back(total += 1.0 / (j + 1));
  Matrix x(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    // the first c points seed every cluster so none is empty
    int label = static_cast<int>(i);
    if (i >= clusters) {
      const double u = rng.uniform() * total;
      label = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      label = std::min(label, clusters - 1);
    }
    const double angle = rotation + two_pi * label / clusters;
    const double cx = clusters == 1 ? 0.0 : radius * std::cos(angle);
    const double cy = clusters == 1 ? 0.0 : radius * std::sin(angle);
    x(i, 0) = cx + spread * rng.normal();
    x(i, 1) = cy + spread * rng.normal();
    labels[static_cast<std::size_t>(i)] = label;
  }
  return {DataMatrix(std::move(x)), std::move(labels)};
}

struct SyntheticSpec {
  Index n = 0;
  int clusters = 0;
  std::uint64_t seed = 0;
  double spread = 1.0;
};

inline std::optional<SyntheticSpec> parse_synthetic(const std::string& dataset) {
  constexpr std::string_view prefix = "synthetic:";
  if (dataset.rfind(prefix, 0) != 0) return std::nullopt;
  std::string body = dataset.substr(prefix.size());
  std::replace(body.begin(), body.end(), ':', ',');
  const auto parts = detail::split_commas(body);
  SyntheticSpec spec;
  try {
    if (parts.size() < 2 || parts.size() > 4) throw std::invalid_argument("arity");
    spec.n = std::stoll(std::string(parts[0]));
    spec.clusters = std::stoi(std::string(parts[1]));
    if (parts.size() >= 3) spec.seed = std::stoull(std::string(parts[2]));
    if (parts.size() == 4) spec.spread = detail::parse_double(parts[3]).value_or(0.0);
    if (spec.n < 1 || spec.clusters < 1 || !(spec.spread > 0.0)) throw std::invalid_argument("range");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidInput, "expected synthetic:<n>:<clusters>[:<seed>[:<spread>]], got " + dataset);
  }
  return spec;
}

struct Dataset {
  std::string name;
  KernelMatrix kernel;
  std::optional<DataMatrix> points;
  std::vector<int> labels;  // synthetic only
  std::vector<std::string> warnings;
};

inline Dataset load_dataset(const ExperimentConfig& cfg) {
  std::optional<DataMatrix> raw;
  std::vector<int> labels;
  std::vector<std::string> warnings;
  if (auto spec = parse_synthetic(cfg.dataset)) {
    auto synth = gaussian_mixture(spec->n, spec->clusters, spec->seed, spec->spread);
    raw.emplace(synth.points);
    labels = std::move(synth.labels);
  } else {
    auto table = read_csv_file(cfg.dataset);
    warnings = std::move(table.warnings);
    if (cfg.kernel == KernelKind::Precomputed) {
      return Dataset{cfg.dataset, precomputed_kernel(table.values), std::nullopt, {}, std::move(warnings)};
    }
    raw.emplace(std::move(table.values));
  }
  switch (cfg.kernel) {
    case KernelKind::Gaussian: {
      DataMatrix points = cfg.standardize && raw->rows() >= 2 ? standardize(*raw) : *raw;
      KernelMatrix k = gaussian_kernel(points, cfg.sigma);
      return Dataset{cfg.dataset, std::move(k), std::move(points), std::move(labels), std::move(warnings)};
    }
    case KernelKind::HistogramIntersection: {
      DataMatrix hist = cfg.normalize_histograms ? l1_normalize_rows(*raw) : *raw;
      KernelMatrix k = histogram_intersection_kernel(hist);
      return Dataset{cfg.dataset, std::move(k), std::move(hist), std::move(labels), std::move(warnings)};
    }
    case KernelKind::Precomputed:
      throw Error(ErrorCode::InvalidInput, "a precomputed kernel cannot be synthesized");
  }
  throw Error(ErrorCode::InvalidInput, "unknown kernel kind");
}

// ---------------------------------------------------------------------------
// Benchmark sweep

struct BenchRecord {
  std::string dataset;
  std::string method;
  std::optional<double> gamma;
  Index k = 0;
  int trial = 0;
  std::optional<std::uint64_t> seed;
  double rel_op_err = std::numeric_limits<double>::quiet_NaN();
  double rel_max_err = std::numeric_limits<double>::quiet_NaN();
  double log_det = std::numeric_limits<double>::quiet_NaN();
  double wall_time_seconds = 0.0;
  bool deterministic = false;
  std::string error;
};

inline const char* kBenchHeader =
    "dataset,method,gamma,k,trial,seed,rel_op_err,rel_max_err,log_det,wall_time_seconds,deterministic,error";

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Scale alpha with sum_i alpha lambda_i / (alpha lambda_i + 1) = k, so the
// DPP on alpha L has expected size k.
inline double expected_size_scale(const Vector& lambda, Index k) {
  const Index positive = (lambda.array() > kPositiveEigenvalue).count();
  if (k >= positive) {
    throw Error(ErrorCode::RankTooLarge, "a DPP with expected size " + std::to_string(k) + " needs more than " +
                                             std::to_string(positive) + " positive eigenvalues");
  }
  auto size = [&](double log_alpha) {
    const double a = std::exp(log_alpha);
    double s = 0.0;
    for (Index i = 0; i < lambda.size(); ++i) {
      if (lambda(i) > kPositiveEigenvalue) s += a * lambda(i) / (a * lambda(i) + 1.0);
    }
    return s;
  };
  double lo = -700.0, hi = 700.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (size(mid) < static_cast<double>(k) ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

struct Shared {
  const Dataset* data;
  const EigenSystem* eig;
  ReferenceNorms norms;
  double epsilon;
};

inline void evaluate(const Shared& s, const LandmarkSet& set, Index k, BenchRecord& row) {
  if (set.empty()) throw Error(ErrorCode::InvalidInput, "sampler returned no landmarks");
  const auto approx = nystrom_approximate(s.data->kernel, set, s.epsilon);
  const auto q = quality(s.data->kernel, approx, s.norms);
  row.rel_op_err = q.rel_op_err;
  row.rel_max_err = q.rel_max_err;
  row.log_det = q.log_det;
  if (set.degenerate) {
    row.error = "DegenerateStep: selected " + std::to_string(set.size()) + " of " + std::to_string(k);
  }
}

// One unit of work: either a random method at one (k, trial), or a
// deterministic method at one (k, gamma) whose result is copied to every trial.
struct Cell {
  BenchMethod method;
  Index k;
  int trial;
  std::optional<double> gamma;
};

inline std::vector<BenchRecord> run_cell(const Shared& s, const ExperimentConfig& cfg, const Cell& cell) {
  BenchRecord row;
  row.dataset = s.data->name;
  row.method = to_string(cell.method);
  row.gamma = cell.gamma;
  row.k = cell.k;
  row.trial = cell.trial;
  const bool deterministic = cell.method == BenchMethod::Greedy || cell.method == BenchMethod::Das;
  row.deterministic = deterministic;
  if (!deterministic) row.seed = trial_seed(cfg.base_seed, static_cast<std::uint64_t>(cell.trial));
  try {
    const auto start = std::chrono::steady_clock::now();
    LandmarkSet set;
    switch (cell.method) {
      case BenchMethod::Uniform: set = uniform_sample(s.data->kernel.size(), cell.k, *row.seed); break;
      case BenchMethod::Kdpp: set = sample_kdpp(*s.eig, cell.k, *row.seed); break;
      case BenchMethod::Dpp: {
        EigenSystem scaled = *s.eig;
        scaled.values *= expected_size_scale(s.eig->values, cell.k);
        set = sample_dpp(scaled, *row.seed);
        break;
      }
      case BenchMethod::Greedy: set = greedy_kdpp(*s.eig, cell.k); break;
      case BenchMethod::Das: set = das_select(*s.eig, cell.k, *cell.gamma); break;
    }
    row.wall_time_seconds = seconds_since(start);
    evaluate(s, set, cell.k, row);
  } catch (const Error& e) {
    row.error = e.what();
  }
  if (!deterministic) return {row};
  std::vector<BenchRecord> rows(static_cast<std::size_t>(cfg.trials), row);
  for (int t = 0; t < cfg.trials; ++t) rows[static_cast<std::size_t>(t)].trial = t;
  return rows;
}

inline int method_rank(const std::string& m) {
  static const std::vector<std::string> order{"setup", "uniform", "kdpp", "dpp", "greedy", "das", "das_best"};
  const auto it = std::find(order.begin(), order.end(), m);
  return static_cast<int>(it - order.begin());
}

}  // namespace detail

// Runs every configured method over k_values and trials on a loaded dataset.
// Output rows are sorted by (method, gamma, k, trial) and do not depend on the
// thread count.
inline std::vector<BenchRecord> run_benchmark(const ExperimentConfig& raw_cfg, const Dataset& data) {
  const ExperimentConfig cfg = validated(raw_cfg);
  std::vector<BenchRecord> rows;

  const auto setup_start = std::chrono::steady_clock::now();
  const EigenSystem eig = sym_eig(data.kernel);
  const ReferenceNorms norms = reference_norms(data.kernel);
  BenchRecord setup;
  setup.dataset = data.name;
  setup.method = "setup";
  setup.deterministic = true;
  setup.wall_time_seconds = detail::seconds_since(setup_start);
  rows.push_back(setup);

  std::vector<detail::Cell> cells;
  for (BenchMethod m : cfg.methods) {
    for (Index k : cfg.k_values) {
      switch (m) {
        case BenchMethod::Greedy: cells.push_back({m, k, 0, std::nullopt}); break;
        case BenchMethod::Das:
          for (double g : cfg.gamma_grid) cells.push_back({m, k, 0, g});
          break;
        default:
          for (int t = 0; t < cfg.trials; ++t) cells.push_back({m, k, t, std::nullopt});
      }
    }
  }

  const detail::Shared shared{&data, &eig, norms, cfg.epsilon};
  std::vector<std::vector<BenchRecord>> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = detail::run_cell(shared, cfg, cells[i]);
  };
  const unsigned nthreads = std::min<unsigned>(cfg.threads, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());

  // das_best: per (k, trial), the gamma with the smallest configured error;
  // the first grid entry wins ties.
  std::map<std::pair<Index, int>, const BenchRecord*> best;
  for (const auto& r : rows) {
    if (r.method != "das" || !r.error.empty()) continue;
    const double err = cfg.norm == NormKind::Operator ? r.rel_op_err : r.rel_max_err;
    auto& slot = best[{r.k, r.trial}];
    if (!slot || err < (cfg.norm == NormKind::Operator ? slot->rel_op_err : slot->rel_max_err)) slot = &r;
  }
  std::vector<BenchRecord> best_rows;
  for (auto& [key, r] : best) {
    BenchRecord b = *r;
    b.method = "das_best";
    best_rows.push_back(b);
  }
  // (k, trial) cells where every gamma failed still get a das_best row
  if (std::find(cfg.methods.begin(), cfg.methods.end(), BenchMethod::Das) != cfg.methods.end()) {
    for (Index k : cfg.k_values)
      for (int t = 0; t < cfg.trials; ++t) {
        if (best.count({k, t})) continue;
        BenchRecord b;
        b.dataset = data.name;
        b.method = "das_best";
        b.k = k;
        b.trial = t;
        b.deterministic = true;
        b.error = "no gamma succeeded";
        best_rows.push_back(b);
      }
  }
  rows.insert(rows.end(), best_rows.begin(), best_rows.end());

  std::stable_sort(rows.begin(), rows.end(), [](const BenchRecord& a, const BenchRecord& b) {
    // das_best carries the winning gamma but is ordered by (k, trial) only
    const double ga = a.method == "das" ? *a.gamma : 0.0;
    const double gb = b.method == "das" ? *b.gamma : 0.0;
    return std::make_tuple(detail::method_rank(a.method), -ga, a.k, a.trial) <
           std::make_tuple(detail::method_rank(b.method), -gb, b.k, b.trial);
  });
  return rows;
}

inline std::vector<BenchRecord> run_benchmark(const ExperimentConfig& cfg) {
  return run_benchmark(cfg, load_dataset(validated(cfg)));
}

inline std::string format_metric(double v) { return std::isnan(v) ? std::string() : format_double(v); }

// Writes the header and one line per record. With include_timing false the
// wall_time_seconds column is left empty so runs can be compared byte for byte.
inline void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& rows, bool include_timing = true) {
  out << kBenchHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.dataset) << ',' << csv_field(r.method) << ',' << (r.gamma ? format_double(*r.gamma) : "") << ','
        << (r.method == "setup" ? "" : std::to_string(r.k)) << ',' << (r.method == "setup" ? "" : std::to_string(r.trial))
        << ',' << (r.seed ? std::to_string(*r.seed) : "") << ',' << format_metric(r.rel_op_err) << ','
        << format_metric(r.rel_max_err) << ',' << format_metric(r.log_det) << ','
        << (include_timing ? format_double(r.wall_time_seconds) : "") << ',' << (r.deterministic ? "true" : "false")
        << ',' << csv_field(r.error) << '\n';
  }
}

inline bool has_failures(const std::vector<BenchRecord>& rows) {
  return std::any_of(rows.begin(), rows.end(), [](const BenchRecord& r) { return !r.error.empty(); });
}

// ---------------------------------------------------------------------------
// Spectrum dump and summarization

inline Vector dump_spectrum(const Dataset& data) { return sym_eig(data.kernel).values; }
inline Vector dump_spectrum(const ExperimentConfig& cfg) { return dump_spectrum(load_dataset(validated(cfg))); }

inline void write_spectrum_csv(std::ostream& out, const Vector& values) {
  out << "index,eigenvalue\n";
  for (Index i = 0; i < values.size(); ++i) out << i << ',' << format_double(values(i)) << '\n';
}

struct Summary {
  LandmarkSet landmarks;
  Matrix coords;  // n x 2 KPCA coordinates
};

// Deterministic k-DPP landmarks plus their position in the top-2 KPCA plane.
inline Summary summarize(const Dataset& data, Index k, bool center = true) {
  const Index n = data.kernel.size();
  Summary s;
  s.landmarks = greedy_kdpp(data.kernel, k);
  s.coords = kpca_project(data.kernel, std::min<Index>(2, n), center);
  if (s.coords.cols() < 2) {
    s.coords.conservativeResize(Eigen::NoChange, 2);
    s.coords.col(1).setZero();
  }
  return s;
}

inline Summary summarize(const ExperimentConfig& cfg, Index k) {
  return summarize(load_dataset(validated(cfg)), k, cfg.center);
}

inline void write_summary_csv(std::ostream& out, const Summary& s) {
  std::vector<bool> mark(static_cast<std::size_t>(s.coords.rows()), false);
  for (Index i : s.landmarks.indices) mark[static_cast<std::size_t>(i)] = true;
  out << "index,pc1,pc2,is_landmark\n";
  for (Index i = 0; i < s.coords.rows(); ++i) {
    out << i << ',' << format_double(s.coords(i, 0)) << ',' << format_double(s.coords(i, 1)) << ','
        << (mark[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
  }
}

}  // namespace detkdpp
