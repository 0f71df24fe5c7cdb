#include "sqla/harness.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "sqla/centroid.hpp"
#include "sqla/errors.hpp"
#include "sqla/estimators.hpp"
#include "sqla/kernels.hpp"
#include "sqla/lowrank.hpp"
#include "sqla/matvec.hpp"
#include "sqla/oracle.hpp"
#include "sqla/pca.hpp"
#include "sqla/sq_matrix.hpp"
#include "sqla/sqm_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sqla::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- report plumbing -------------------------------------------------------------------------

struct Outcome {
  std::optional<double> estimate;
  std::optional<double> oracle;
  std::optional<double> tolerance;
  std::optional<bool> pass;
  AccessCounts counts;
  std::string error;
  double wall_ms = 0.0;
  double fit_x = kNaN;
  double fit_y = kNaN;
};

struct Row {
  std::vector<std::string> head;
  Outcome o;
};

struct Report {
  std::vector<std::string> header;
  std::vector<Row> rows;
  std::vector<std::string> warnings;
};

const std::vector<std::string> kCommonColumns = {
    "estimate", "oracle",       "abs_error",      "tolerance", "pass",
    "n_queries", "n_samples",   "n_norm_queries", "error",     "wall_ms"};

std::string num(double v) { return format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string num(std::uint64_t v, int) { return std::to_string(v); }

std::string opt_num(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void append_row(std::string& buf, const std::vector<std::string>& prefix, const Row& r) {
  std::vector<std::string> cells = prefix;
  cells.insert(cells.end(), r.head.begin(), r.head.end());
  const Outcome& o = r.o;
  cells.push_back(opt_num(o.estimate));
  cells.push_back(opt_num(o.oracle));
  cells.push_back(o.estimate && o.oracle ? format_double(std::abs(*o.estimate - *o.oracle)) : "");
  cells.push_back(opt_num(o.tolerance));
  cells.push_back(o.pass ? (*o.pass ? "1" : "0") : "");
  cells.push_back(std::to_string(o.counts.queries));
  cells.push_back(std::to_string(o.counts.samples));
  cells.push_back(std::to_string(o.counts.norm_queries));
  cells.push_back(o.error);
  cells.push_back(format_double(o.wall_ms));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buf += ',';
    buf += csv_field(cells[i]);
  }
  buf += "\r\n";
}

void append_header(std::string& buf, const std::vector<std::string>& prefix,
                   const std::vector<std::string>& header) {
  std::vector<std::string> cells = prefix;
  cells.insert(cells.end(), header.begin(), header.end());
  cells.insert(cells.end(), kCommonColumns.begin(), kCommonColumns.end());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buf += ',';
    buf += csv_field(cells[i]);
  }
  buf += "\r\n";
}

using TrialFn = std::function<std::vector<Row>(std::size_t)>;
using FailFn = std::function<std::vector<std::string>(std::size_t)>;

// Trials run in parallel; rows are kept in trial order so the CSV does not depend on scheduling.
std::vector<Row> run_trials(std::size_t trials, const TrialFn& fn, const FailFn& fail_head) {
  std::vector<std::vector<Row>> per_trial(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(trials); ++t) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Row> rows;
    try {
      rows = fn(static_cast<std::size_t>(t));
    } catch (const std::exception& e) {
      Row r;
      r.head = fail_head(static_cast<std::size_t>(t));
      r.o.pass = false;
      r.o.error = e.what();
      rows = {r};
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    for (auto& r : rows) r.o.wall_ms = ms;
    per_trial[static_cast<std::size_t>(t)] = std::move(rows);
  }
  std::vector<Row> out;
  for (auto& v : per_trial)
    for (auto& r : v) out.push_back(std::move(r));
  return out;
}

// ---- instance helpers ------------------------------------------------------------------------

DenseVector gaussian_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g;
  DenseVector x(n);
  for (double& v : x) v = g(rng);
  return x;
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> g;
  DenseMatrix a(rows, cols);
  for (double& v : a.data()) v = g(rng);
  return a;
}

DenseVector load_vector(const std::string& path) {
  const DenseMatrix m = io::load_matrix(path);
  if (m.rows() != 1 && m.cols() != 1) throw FormatError(path + ": expected a vector");
  return {m.data().begin(), m.data().end()};
}

double frob_sq(const DenseMatrix& a) { return oracle::exact_dot(a.data(), a.data()); }

struct Common {
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::string output;
  double pass_rate = -1.0;  // negative: command default
  std::string format = "csv";
  std::vector<double> expect_slope;
};

void add_common(CLI::App* app, Common& c, bool seed_required = true) {
  auto* seed = app->add_option("--seed", c.seed, "Master seed");
  if (seed_required) seed->required();
  app->add_option("--trials", c.trials, "Number of trials")->check(CLI::PositiveNumber);
  app->add_option("-o,--output", c.output, "CSV output path (default: stdout)");
  app->add_option("--pass-rate", c.pass_rate, "Required fraction of passing rows")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"csv"}));
}

// ---- inner -----------------------------------------------------------------------------------

struct InnerConfig {
  std::size_t dim = 50;
  double eps = 0.1;
  double delta = 0.05;
  double nu = 0.0;
  std::string x_path, y_path;
};

void add_inner(CLI::App* app, InnerConfig& c) {
  app->add_option("--dim", c.dim, "Dimension of the random vectors")->check(CLI::PositiveNumber);
  app->add_option("--eps", c.eps, "Relative accuracy");
  app->add_option("--delta", c.delta, "Failure probability");
  app->add_option("--nu", c.nu, "Norm slack of the sampled vector");
  app->add_option("--x", c.x_path, "Vector file for x (SQM1/CSV)");
  app->add_option("--y", c.y_path, "Vector file for y (SQM1/CSV)");
}

bool set_inner(InnerConfig& c, const std::string& p, double v) {
  if (p == "dim") c.dim = static_cast<std::size_t>(v);
  else if (p == "eps") c.eps = v;
  else if (p == "delta") c.delta = v;
  else if (p == "nu") c.nu = v;
  else return false;
  return true;
}

Report run_inner(const InnerConfig& c, const Common& common, std::uint64_t run_seed) {
  const EstimatorParams params(c.eps, c.delta);
  if (c.nu < 0.0 || c.nu > 0.5) throw InvalidParameter("nu must lie in [0, 0.5]");
  std::optional<DenseVector> fx, fy;
  if (!c.x_path.empty() || !c.y_path.empty()) {
    if (c.x_path.empty() || c.y_path.empty()) throw InvalidParameter("--x and --y go together");
    fx = load_vector(c.x_path);
    fy = load_vector(c.y_path);
    if (fx->size() != fy->size()) throw DimensionMismatch(fx->size(), fy->size());
  }
  const std::size_t dim = fx ? fx->size() : c.dim;

  Report rep;
  rep.header = {"trial", "dim", "eps", "delta", "nu", "bucket_count", "bucket_size"};
  auto head = [&](std::size_t t) {
    return std::vector<std::string>{num(t + 1), num(dim), num(c.eps), num(c.delta), num(c.nu),
                                    num(params.bucket_count()), num(params.bucket_size())};
  };
  rep.rows = run_trials(
      common.trials,
      [&](std::size_t t) {
        Rng inst = make_rng(run_seed, 2 * t);
        Rng rng = make_rng(run_seed, 2 * t + 1);
        const DenseVector x = fx ? *fx : gaussian_vector(dim, inst);
        const DenseVector y = fy ? *fy : gaussian_vector(dim, inst);
        SqVector xs = SqVector::build_dense(x);
        if (c.nu > 0.0) xs = xs.with_norm_overestimate(c.nu, 1.0 + c.nu / 2.0);
        const QueryVector yq(y);
        Row r;
        r.head = head(t);
        r.o.estimate = inner_product_estimate(xs, yq, params, rng);
        r.o.oracle = oracle::exact_dot(x, y);
        r.o.tolerance = (c.eps + c.nu) * std::sqrt(oracle::exact_dot(x, x) * oracle::exact_dot(y, y));
        r.o.pass = std::abs(*r.o.estimate - *r.o.oracle) <= *r.o.tolerance;
        r.o.counts = xs.stats().snapshot();
        r.o.counts += yq.stats().snapshot();
        r.o.fit_x = c.eps;
        r.o.fit_y = static_cast<double>(r.o.counts.samples);
        return std::vector<Row>{r};
      },
      head);
  return rep;
}

// ---- matvec ----------------------------------------------------------------------------------

struct MatvecConfig {
  std::size_t rows = 100;
  std::size_t k = 5;
  std::size_t samples = 1000;
  double nu = 0.1;
  double delta = 0.01;
  double sample_delta = 0.0;  // per sample() call; 0: delta / samples
  double c_bound = 0.0;       // 0: use the exact C of each instance
  bool orthonormal = false;
};

void add_matvec(CLI::App* app, MatvecConfig& c, bool with_k = true) {
  app->add_option("--rows", c.rows, "Length of the image Vw")->check(CLI::PositiveNumber);
  if (with_k) app->add_option("--k", c.k, "Number of columns of V")->check(CLI::PositiveNumber);
  app->add_option("--samples", c.samples, "Samples drawn per trial");
  app->add_option("--nu", c.nu, "Relative accuracy of the norm estimate");
  app->add_option("--delta", c.delta, "Failure probability of a trial");
  app->add_option("--sample-delta", c.sample_delta,
                  "Failure probability of one sample call (default: delta / samples)");
  app->add_option("--c-bound", c.c_bound, "Bound on C(V,w) (default: exact per instance)");
  app->add_flag("--orthonormal,!--gaussian", c.orthonormal,
                "Orthonormal columns (C = 1) or Gaussian columns");
}

bool set_matvec(MatvecConfig& c, const std::string& p, double v) {
  if (p == "k") c.k = static_cast<std::size_t>(v);
  else if (p == "rows") c.rows = static_cast<std::size_t>(v);
  else if (p == "samples") c.samples = static_cast<std::size_t>(v);
  else if (p == "nu") c.nu = v;
  else if (p == "delta") c.delta = v;
  else if (p == "sample-delta" || p == "sample_delta") c.sample_delta = v;
  else if (p == "c-bound" || p == "c_bound") c.c_bound = v;
  else return false;
  return true;
}

Report run_matvec(const MatvecConfig& c, const Common& common, std::uint64_t run_seed) {
  if (c.k < 1 || c.rows < 1) throw InvalidParameter("rows and k must be positive");
  if (c.orthonormal && c.k > c.rows) throw InvalidParameter("orthonormal columns need k <= rows");
  if (!(c.nu > 0.0 && c.nu < 1.0)) throw InvalidParameter("nu must lie in (0, 1)");
  Report rep;
  rep.header = {"trial",   "n",        "k",               "c_exact",
                "c_bound", "samples",  "attempts",        "acceptance_rate",
                "expected_acceptance", "queries_per_sample"};
  auto fail = [&](std::size_t t) {
    std::vector<std::string> h(rep.header.size());
    h[0] = num(t + 1);
    h[1] = num(c.rows);
    h[2] = num(c.k);
    return h;
  };
  rep.rows = run_trials(
      common.trials,
      [&](std::size_t t) {
        Rng inst = make_rng(run_seed, 2 * t);
        Rng rng = make_rng(run_seed, 2 * t + 1);
        const DenseMatrix v = c.orthonormal ? oracle::random_orthonormal(c.rows, c.k, inst())
                                            : gaussian_matrix(c.rows, c.k, inst);
        const DenseVector w = gaussian_vector(c.k, inst);
        const double cx = oracle::exact_C(v, w);
        auto vt = std::make_shared<const SqMatrix>(SqMatrix::build(v.transpose()));
        MatVecOptions opts;
        opts.delta = c.delta;
        opts.c_bound = c.c_bound > 0.0 ? c.c_bound : cx;
        // Sampling and the norm estimate get separate handles: each sample() call may abort with
        // its own small probability, the norm uses the trial-level delta.
        MatVecOptions sample_opts = opts;
        sample_opts.delta = c.sample_delta > 0.0 ? c.sample_delta
                                                 : c.delta / static_cast<double>(std::max<std::size_t>(c.samples, 1));
        const MatVecHandle sampler(vt, w, sample_opts);
        const MatVecHandle h(vt, w, opts);
        for (std::size_t s = 0; s < c.samples; ++s) sampler.sample(rng);
        const AccessCounts sampling = sampler.stats().snapshot();
        const DenseVector image = oracle::exact_matvec(v, w);

        Row r;
        const double attempts = static_cast<double>(sampling.attempts);
        const double qps = c.samples ? static_cast<double>(sampling.queries) / c.samples : kNaN;
        r.head = {num(t + 1),
                  num(c.rows),
                  num(c.k),
                  num(cx),
                  num(opts.c_bound),
                  num(c.samples),
                  num(sampling.attempts, 0),
                  num(attempts > 0 ? c.samples / attempts : kNaN),
                  num(1.0 / (static_cast<double>(c.k) * cx)),
                  num(qps)};
        r.o.estimate = h.norm_sq_estimate(c.nu, rng);
        r.o.oracle = oracle::exact_dot(image, image);
        r.o.tolerance = c.nu * *r.o.oracle;
        r.o.pass = std::abs(*r.o.estimate - *r.o.oracle) <= *r.o.tolerance;
        r.o.counts = sampling;
        r.o.counts += h.stats().snapshot();
        r.o.fit_x = static_cast<double>(c.k);
        r.o.fit_y = qps;
        return std::vector<Row>{r};
      },
      fail);
  return rep;
}

// ---- centroid --------------------------------------------------------------------------------

struct CentroidConfig {
  std::string v_path, u_path;
  std::size_t n = 50;
  std::size_t d = 20;
  double eps = 0.0;  // absolute; 0 means eps_rel * Z
  double eps_rel = 0.05;
  double delta = 0.05;
  double scale = 1.0;
};

void add_centroid(CLI::App* app, CentroidConfig& c) {
  app->add_option("--points", c.v_path, "Data points, one per row (SQM1/CSV)");
  app->add_option("--query", c.u_path, "Query point u (SQM1/CSV)");
  app->add_option("--n", c.n, "Number of random points")->check(CLI::PositiveNumber);
  app->add_option("--d", c.d, "Dimension of random points")->check(CLI::PositiveNumber);
  app->add_option("--eps", c.eps, "Absolute accuracy (overrides --eps-rel)");
  app->add_option("--eps-rel", c.eps_rel, "Accuracy relative to Z");
  app->add_option("--delta", c.delta, "Failure probability");
  app->add_option("--scale", c.scale, "Multiplies u and V (Z grows as scale^2)");
}

bool set_centroid(CentroidConfig& c, const std::string& p, double v) {
  if (p == "eps") c.eps = v;
  else if (p == "eps-rel" || p == "eps_rel") c.eps_rel = v;
  else if (p == "delta") c.delta = v;
  else if (p == "scale") c.scale = v;
  else if (p == "n") c.n = static_cast<std::size_t>(v);
  else if (p == "d") c.d = static_cast<std::size_t>(v);
  else return false;
  return true;
}

Report run_centroid(const CentroidConfig& c, const Common& common, std::uint64_t run_seed) {
  DenseMatrix v;
  DenseVector u;
  if (!c.v_path.empty() || !c.u_path.empty()) {
    if (c.v_path.empty() || c.u_path.empty())
      throw InvalidParameter("--points and --query go together");
    v = io::load_matrix(c.v_path);
    u = load_vector(c.u_path);
  } else {
    Rng inst = make_rng(common.seed, 0);
    v = gaussian_matrix(c.n, c.d, inst);
    u = gaussian_vector(c.d, inst);
  }
  for (double& x : v.data()) x *= c.scale;
  for (double& x : u) x *= c.scale;
  if (v.cols() != u.size()) throw DimensionMismatch(v.cols(), u.size());
  const double truth = oracle::exact_centroid_distance(v, u);

  Report rep;
  rep.header = {"trial",        "n",            "d",
                "z",            "eps",          "sizing_scale",
                "norm_product", "inner_epsilon"};
  auto fail = [&](std::size_t t) {
    std::vector<std::string> h(rep.header.size());
    h[0] = num(t + 1);
    h[1] = num(v.rows());
    h[2] = num(v.cols());
    return h;
  };
  rep.rows = run_trials(
      common.trials,
      [&](std::size_t t) {
        auto vh = std::make_shared<const SqMatrix>(SqMatrix::build(v));
        auto uh = std::make_shared<const SqVector>(SqVector::build_dense(u));
        auto inst = std::make_shared<const CentroidInstance>(vh, uh);
        const double eps = c.eps > 0.0 ? c.eps : c.eps_rel * inst->z();
        Rng rng = make_rng(run_seed, t + 1);
        const CentroidEstimate est = centroid_distance_estimate(inst, eps, c.delta, rng);
        Row r;
        r.head = {num(t + 1),          num(v.rows()),         num(v.cols()),
                  num(est.z),          num(eps),              num(est.sizing_scale),
                  num(est.norm_product), num(est.inner_epsilon)};
        r.o.estimate = est.value;
        r.o.oracle = truth;
        r.o.tolerance = eps;
        r.o.pass = std::abs(est.value - truth) <= eps;
        r.o.counts = est.counts;
        r.o.fit_x = est.z;
        r.o.fit_y = static_cast<double>(est.counts.samples);
        return std::vector<Row>{r};
      },
      fail);
  return rep;
}

// ---- shared matrix input for lowrank / pca ---------------------------------------------------

struct MatrixSource {
  std::string input;
  std::size_t rows = 200;
  std::size_t cols = 200;
  std::vector<double> spectrum;
  double noise = 0.0;
};

void add_source(CLI::App* app, MatrixSource& s) {
  app->add_option("-i,--input", s.input, "Matrix file (SQM1/CSV)");
  app->add_option("--rows", s.rows, "Rows of a planted matrix (when no --input)");
  app->add_option("--cols", s.cols, "Columns of a planted matrix (when no --input)");
  app->add_option("--spectrum", s.spectrum, "Planted singular values")->delimiter(',');
  app->add_option("--noise", s.noise, "Gaussian noise level of a planted matrix");
}

DenseMatrix load_source(const MatrixSource& s, std::uint64_t seed) {
  if (!s.input.empty()) return io::load_matrix(s.input);
  if (s.spectrum.empty()) throw InvalidParameter("either --input or --spectrum is required");
  return oracle::planted_matrix(s.rows, s.cols, s.spectrum, s.noise, seed);
}

bool dense_oracle_fits(const DenseMatrix& a) { return std::min(a.rows(), a.cols()) <= 512; }

// ---- lowrank ---------------------------------------------------------------------------------

struct LowrankConfig {
  MatrixSource src;
  double sigma = 1.0;
  double eps = 0.05;
  double delta = 0.1;
  std::size_t q = 0;
  double theta = 1.0;
  double tol = 0.05;
  double orth_tol = 0.1;
  int expect_rank = -1;
  bool literal_w = false;
  std::string save_path;
  std::string load_path;
};

void add_lowrank(CLI::App* app, LowrankConfig& c) {
  add_source(app, c.src);
  app->add_option("--sigma", c.sigma, "Singular value threshold")->required();
  app->add_option("--eps", c.eps, "Error parameter");
  app->add_option("--delta", c.delta, "Failure probability");
  app->add_option("--q", c.q, "Sample count override");
  app->add_option("--theta", c.theta, "Constant in the theoretical sample count");
  app->add_option("--tol", c.tol, "Tolerance for the Frobenius and spectrum errors (x |A|_F^2)");
  app->add_option("--orth-tol", c.orth_tol, "Tolerance for |Vh^T Vh - I|_F");
  app->add_option("--expect-rank", c.expect_rank, "Required number of retained values");
  app->add_flag("--literal-w", c.literal_w, "Build the q x q W without merging repeated columns");
  app->add_option("--save", c.save_path, "Save the description of trial 1");
  app->add_option("--load", c.load_path, "Evaluate a saved description instead of sampling");
}

bool set_lowrank(LowrankConfig& c, const std::string& p, double v) {
  if (p == "q") c.q = static_cast<std::size_t>(v);
  else if (p == "sigma") c.sigma = v;
  else if (p == "eps") c.eps = v;
  else if (p == "delta") c.delta = v;
  else if (p == "theta") c.theta = v;
  else if (p == "noise") c.src.noise = v;
  else return false;
  return true;
}

Report run_lowrank(const LowrankConfig& c, const Common& common, std::uint64_t run_seed) {
  const DenseMatrix a = load_source(c.src, common.seed);
  if (!dense_oracle_fits(a)) throw InvalidParameter("lowrank evaluation needs min(rows, cols) <= 512");
  const std::vector<double> s = oracle::exact_singular_values(a);
  const double fro2 = frob_sq(a);
  const DenseMatrix ata = kernels::gram(a);
  std::optional<LowRankDescription> loaded;
  if (!c.load_path.empty()) loaded = load_description(c.load_path);

  LowRankParams params;
  params.sigma = c.sigma;
  params.epsilon = c.eps;
  params.delta = c.delta;
  if (c.q > 0) params.q_override = c.q;
  params.theta_constant = c.theta;
  params.literal_w = c.literal_w;

  Report rep;
  rep.header = {"trial", "q", "ell", "excess", "sigma_sq_err", "orth_err", "gram_ratio"};
  auto fail = [&](std::size_t t) {
    std::vector<std::string> h(rep.header.size());
    h[0] = num(t + 1);
    return h;
  };
  rep.rows = run_trials(
      common.trials,
      [&](std::size_t t) {
        auto am = std::make_shared<const SqMatrix>(SqMatrix::build(a));
        LowRankDescription desc;
        if (loaded) {
          desc = *loaded;
        } else {
          Rng rng = make_rng(run_seed, t + 1);
          desc = low_rank_approx(*am, params, rng);
          if (t == 0 && !c.save_path.empty()) save_description(c.save_path, desc);
        }
        const std::size_t ell = desc.rank();
        const double err = frob_sq(a - reconstruct_d_dense(a, desc));
        double opt = 0.0;
        for (std::size_t i = ell; i < s.size(); ++i) opt += s[i] * s[i];
        double sig_err = 0.0;
        for (std::size_t i = 0; i < ell; ++i)
          sig_err += std::abs(desc.sigma_hat[i] * desc.sigma_hat[i] - (i < s.size() ? s[i] * s[i] : 0.0));
        double orth = 0.0;
        if (ell > 0) {
          const DenseMatrix vh = materialize_v_hat(a, desc);
          orth = std::sqrt(frob_sq(kernels::gram(vh) - DenseMatrix::identity(ell)));
        }
        const DenseMatrix sm = materialize_s(a, desc);
        const double gram_ratio = std::sqrt(frob_sq(ata - kernels::gram(sm))) /
                                  (fro2 / std::sqrt(static_cast<double>(desc.q())));
        Row r;
        r.head = {num(t + 1),    num(desc.q()), num(ell),       num(err - opt),
                  num(sig_err), num(orth),     num(gram_ratio)};
        r.o.estimate = err;
        r.o.oracle = opt;
        r.o.tolerance = c.tol * fro2;
        bool ok = err - opt <= c.tol * fro2 && sig_err <= c.tol * fro2 && orth <= c.orth_tol;
        if (c.expect_rank >= 0) ok = ok && ell == static_cast<std::size_t>(c.expect_rank);
        r.o.pass = ok;
        r.o.counts = am->stats().snapshot();
        r.o.fit_x = static_cast<double>(desc.q());
        r.o.fit_y = err - opt;
        return std::vector<Row>{r};
      },
      fail);
  return rep;
}

// ---- pca -------------------------------------------------------------------------------------

struct PcaConfig {
  MatrixSource src;
  double sigma = 1.0;
  std::size_t k = 1;
  double eta = 0.1;
  double eps_sigma = 0.005;
  double eps_v = 0.2;
  double delta = 0.005;
  std::size_t q = 0;
  double theta = 1.0;
  std::size_t handle_samples = 0;
  double handle_delta = 1e-3;
  double tv_tol = 0.05;
};

void add_pca(CLI::App* app, PcaConfig& c) {
  add_source(app, c.src);
  app->add_option("--sigma", c.sigma, "Threshold below the top k singular values")->required();
  app->add_option("--k", c.k, "Number of components")->required()->check(CLI::PositiveNumber);
  app->add_option("--eta", c.eta, "Relative spectral gap")->required();
  app->add_option("--eps-sigma", c.eps_sigma, "Eigenvalue accuracy (x |A|_F^2)");
  app->add_option("--eps-v", c.eps_v, "Eigenvector accuracy");
  app->add_option("--delta", c.delta, "Failure probability");
  app->add_option("--q", c.q, "Sample count override");
  app->add_option("--theta", c.theta, "Constant in the theoretical sample count");
  app->add_option("--handle-samples", c.handle_samples,
                  "Samples drawn from each eigenvector handle for a TV check");
  app->add_option("--handle-delta", c.handle_delta, "Failure probability of one handle sample");
  app->add_option("--tv-tol", c.tv_tol, "TV tolerance for the handle samples");
}

bool set_pca(PcaConfig& c, const std::string& p, double v) {
  if (p == "q") c.q = static_cast<std::size_t>(v);
  else if (p == "sigma") c.sigma = v;
  else if (p == "eta") c.eta = v;
  else if (p == "eps-sigma" || p == "eps_sigma") c.eps_sigma = v;
  else if (p == "eps-v" || p == "eps_v") c.eps_v = v;
  else if (p == "delta") c.delta = v;
  else if (p == "theta") c.theta = v;
  else return false;
  return true;
}

Report run_pca(const PcaConfig& c, const Common& common, std::uint64_t run_seed) {
  auto a = std::make_shared<const DenseMatrix>(load_source(c.src, common.seed));
  const bool with_oracle = dense_oracle_fits(*a);
  std::optional<SvdResult> svd;
  if (with_oracle) svd = oracle::exact_svd(*a);
  const double fro2 = frob_sq(*a);

  PcaParams params;
  params.sigma = c.sigma;
  params.k = c.k;
  params.eta = c.eta;
  params.eps_sigma = c.eps_sigma;
  params.eps_v = c.eps_v;
  params.delta = c.delta;
  if (c.q > 0) params.q_override = c.q;
  params.theta_constant = c.theta;
  params.handle_delta = c.handle_delta;

  Report rep;
  rep.header = {"trial", "i",   "sigma_hat_sq", "sigma_exact_sq", "vec_error", "overlap", "tv",
                "q",     "seed", "eps",         "eps_sigma",      "eps_v",     "eta"};
  std::vector<std::vector<std::string>> warnings(common.trials);
  auto fail = [&](std::size_t t) {
    std::vector<std::string> h(rep.header.size());
    h[0] = num(t + 1);
    h[8] = num(derive_seed(run_seed, t + 1), 0);
    h[10] = num(c.eps_sigma);
    h[11] = num(c.eps_v);
    h[12] = num(c.eta);
    return h;
  };
  rep.rows = run_trials(
      common.trials,
      [&](std::size_t t) {
        auto am = std::make_shared<const SqMatrix>(SqMatrix::build(*a));
        const std::uint64_t seed = derive_seed(run_seed, t + 1);
        const PcaResult res = pca(am, params, seed);
        warnings[t] = res.warnings;
        const AccessCounts base = am->stats().snapshot();
        std::optional<oracle::EigvecDiagnostics> diag;
        if (with_oracle) diag = oracle::eigvec_error_oracle(*a, res);

        std::vector<Row> rows;
        for (std::size_t i = 1; i <= c.k; ++i) {
          Row r;
          r.o.counts = base;
          std::optional<double> tv;
          if (c.handle_samples > 0) {
            auto h = eigvec_access(res, i);
            Rng rng = make_rng(seed, 100 + i);
            std::vector<std::size_t> counts(h->dim(), 0);
            for (std::size_t s = 0; s < c.handle_samples; ++s) ++counts[h->sample(rng) - 1];
            r.o.counts += h->handle().stats().snapshot();
            if (with_oracle) tv = oracle::tv_distance(counts, oracle::l2_distribution(svd->v.col(i - 1)));
          }
          const double hat = res.sigma_hat_sq[i - 1];
          r.head = {num(t + 1),
                    num(i),
                    num(hat),
                    diag ? num(diag->sigma_sq[i - 1]) : "",
                    diag ? num(diag->error[i - 1]) : "",
                    diag ? num(diag->overlap[i - 1]) : "",
                    tv ? num(*tv) : "",
                    num(res.q()),
                    num(seed, 0),
                    num(res.epsilon),
                    num(c.eps_sigma),
                    num(c.eps_v),
                    num(c.eta)};
          r.o.estimate = hat;
          if (diag) {
            r.o.oracle = diag->sigma_sq[i - 1];
            r.o.tolerance = c.eps_sigma * fro2;
            bool ok = std::abs(hat - *r.o.oracle) <= *r.o.tolerance && diag->error[i - 1] <= c.eps_v;
            if (tv) ok = ok && *tv <= c.tv_tol;
            r.o.pass = ok;
            r.o.fit_x = static_cast<double>(res.q());
            r.o.fit_y = std::abs(hat - *r.o.oracle);
          }
          rows.push_back(std::move(r));
        }
        return rows;
      },
      fail);
  std::set<std::string> seen;
  for (const auto& w : warnings)
    for (const auto& s : w)
      if (seen.insert(s).second) rep.warnings.push_back(s);
  return rep;
}

// ---- gen -------------------------------------------------------------------------------------

struct GenConfig {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> spectrum;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string output;
};

int run_gen(const GenConfig& c, std::ostream& out, std::ostream& err) {
  if (c.spectrum.empty()) throw SpectrumViolation("empty spectrum");
  for (std::size_t i = 0; i < c.spectrum.size(); ++i) {
    if (!(c.spectrum[i] > 0.0)) throw SpectrumViolation("spectrum values must be positive");
    if (i > 0 && c.spectrum[i] > c.spectrum[i - 1])
      throw SpectrumViolation("spectrum must be nonincreasing");
  }
  if (c.noise < 0.0) throw InvalidParameter("noise must be nonnegative");
  const DenseMatrix a = oracle::planted_matrix(c.rows, c.cols, c.spectrum, c.noise, c.seed);
  const std::size_t r = c.spectrum.size();
  const double fro2 = frob_sq(a);

  std::vector<double> s;
  if (dense_oracle_fits(a)) {
    s = oracle::exact_singular_values(a);
    // Each requested gap sigma_i^2 - sigma_{i+1}^2 must survive at least at half its size.
    for (std::size_t i = 0; i < r; ++i) {
      const double want = c.spectrum[i] * c.spectrum[i] -
                          (i + 1 < r ? c.spectrum[i + 1] * c.spectrum[i + 1] : 0.0);
      const double next = i + 1 < s.size() ? s[i + 1] : 0.0;
      const double got = s[i] * s[i] - next * next;
      if (want > 0.0 && got < 0.5 * want)
        throw SpectrumViolation("noise closes the gap after singular value " + std::to_string(i + 1));
    }
  } else {
    err << "warning: matrix too large for the exact SVD; reporting the requested spectrum\n";
    s = c.spectrum;
  }
  io::save_matrix(c.output, a);

  double eta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r; ++i) {
    const double next = i + 1 < s.size() ? s[i + 1] : 0.0;
    eta = std::min(eta, (s[i] * s[i] - next * next) / fro2);
  }
  std::string realized;
  for (std::size_t i = 0; i < r; ++i) realized += (i ? "," : "") + format_double(s[i]);
  std::string buf;
  buf += "rows,cols,rank,frobenius_norm,K,eta,realized_spectrum\r\n";
  buf += num(c.rows) + "," + num(c.cols) + "," + num(r) + "," + format_double(std::sqrt(fro2)) + "," +
         format_double(fro2 / (s[r - 1] * s[r - 1])) + "," + format_double(eta) + "," +
         csv_field(realized) + "\r\n";
  out << buf;
  return 0;
}

// ---- output ----------------------------------------------------------------------------------

struct Fit {
  std::vector<double> x;
  std::vector<double> median_y;
};

Fit summarize(const std::vector<Row>& rows) {
  std::map<double, std::vector<double>> by_x;
  for (const auto& r : rows)
    if (std::isfinite(r.o.fit_x) && std::isfinite(r.o.fit_y)) by_x[r.o.fit_x].push_back(r.o.fit_y);
  Fit f;
  for (auto& [x, ys] : by_x) {
    std::sort(ys.begin(), ys.end());
    const std::size_t m = ys.size();
    f.x.push_back(x);
    f.median_y.push_back(m % 2 ? ys[m / 2] : 0.5 * (ys[m / 2 - 1] + ys[m / 2]));
  }
  return f;
}

int finish(const std::string& csv, const std::vector<Row>& rows, const Common& common,
           double default_rate, const std::vector<std::string>& warnings, std::ostream& out,
           std::ostream& err, std::optional<double> slope) {
  if (common.output.empty()) {
    out << csv;
  } else {
    std::ofstream f(common.output, std::ios::binary);
    if (!f) throw FormatError("cannot open " + common.output + " for writing");
    f << csv;
    if (!f) throw FormatError("failed writing " + common.output);
  }
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  std::size_t judged = 0, passed = 0;
  for (const auto& r : rows)
    if (r.o.pass) {
      ++judged;
      if (*r.o.pass) ++passed;
    }
  const double threshold = common.pass_rate >= 0.0 ? common.pass_rate : default_rate;
  bool ok = true;
  if (judged > 0) {
    const double rate = static_cast<double>(passed) / static_cast<double>(judged);
    err << "pass rate " << format_double(rate) << " (" << passed << "/" << judged
        << "), required " << format_double(threshold) << '\n';
    ok = rate >= threshold;
  }
  if (slope && common.expect_slope.size() == 2) {
    const bool in = *slope >= common.expect_slope[0] && *slope <= common.expect_slope[1];
    err << "slope " << format_double(*slope) << (in ? " within " : " outside ") << "["
        << format_double(common.expect_slope[0]) << ", " << format_double(common.expect_slope[1])
        << "]\n";
    ok = ok && in;
  }
  return ok ? 0 : 1;
}

using Runner = std::function<Report(std::uint64_t run_seed)>;

int single(const Runner& run, const Common& common, double default_rate, std::ostream& out,
           std::ostream& err) {
  const Report rep = run(common.seed);
  std::string csv;
  append_header(csv, {}, rep.header);
  for (const auto& r : rep.rows) append_row(csv, {}, r);
  return finish(csv, rep.rows, common, default_rate, rep.warnings, out, err, std::nullopt);
}

int sweep(const std::string& param, const std::vector<double>& values,
          const std::function<bool(double)>& set, const Runner& run, const Common& common,
          double default_rate, const char* fit_x, const char* fit_y, std::ostream& out,
          std::ostream& err) {
  if (values.empty()) throw InvalidParameter("no sweep values");
  std::string csv;
  std::vector<Row> all;
  std::vector<std::string> warnings;
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (!set(values[v])) throw InvalidParameter("parameter '" + param + "' cannot be swept");
    const Report rep = run(derive_seed(common.seed, 0x5eed0000 + v));
    if (v == 0) append_header(csv, {param}, rep.header);
    for (const auto& r : rep.rows) {
      append_row(csv, {format_double(values[v])}, r);
      all.push_back(r);
    }
    warnings.insert(warnings.end(), rep.warnings.begin(), rep.warnings.end());
  }
  const Fit f = summarize(all);
  std::optional<double> slope;
  if (f.x.size() >= 2) {
    for (std::size_t i = 0; i < f.x.size(); ++i)
      err << "median " << fit_y << " at " << fit_x << "=" << format_double(f.x[i]) << ": "
          << format_double(f.median_y[i]) << '\n';
    slope = loglog_slope(f.x, f.median_y);
    err << "log-log slope of " << fit_y << " vs " << fit_x << ": " << format_double(*slope) << '\n';
  }
  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  return finish(csv, all, common, default_rate, warnings, out, err, slope);
}

void apply_thread_cap() {
  if (const char* env = std::getenv("SQLA_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) kernels::set_max_threads(n);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  q += '"';
  return q;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch(x.size(), y.size());
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) throw InvalidParameter("need two positive points for a slope");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw InvalidParameter("sweep values are all equal");
  return sxy / sxx;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  apply_thread_cap();
  CLI::App app{"Sample-and-query linear algebra experiments"};
  app.require_subcommand(1);

  GenConfig gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a matrix with a planted spectrum");
  gen_cmd->add_option("--rows", gen.rows)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cols", gen.cols)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--spectrum", gen.spectrum, "Singular values")->required()->delimiter(',');
  gen_cmd->add_option("--noise", gen.noise, "Gaussian noise level");
  gen_cmd->add_option("--seed", gen.seed)->required();
  gen_cmd->add_option("-o,--output", gen.output, "Output SQM1 file")->required();

  Common inner_common, matvec_common, msweep_common, centroid_common, lowrank_common, pca_common;
  InnerConfig inner;
  MatvecConfig matvec, msweep_cfg;
  msweep_cfg.orthonormal = true;  // the k sweep fits cost at C = 1 unless --gaussian
  CentroidConfig centroid;
  LowrankConfig lowrank;
  PcaConfig pcac;

  auto* inner_cmd = app.add_subcommand("inner", "Median-of-means inner-product estimation");
  add_inner(inner_cmd, inner);
  add_common(inner_cmd, inner_common);

  auto* matvec_cmd = app.add_subcommand("matvec", "Rejection-sampling access to Vw");
  add_matvec(matvec_cmd, matvec);
  // not required here: `matvec sweep` takes its own --seed
  add_common(matvec_cmd, matvec_common, false);
  std::vector<double> msweep_k;
  auto* msweep_cmd = matvec_cmd->add_subcommand("sweep", "Sweep k and fit the query-cost slope");
  msweep_cmd->add_option("--k", msweep_k, "Values of k")->required()->delimiter(',');
  add_matvec(msweep_cmd, msweep_cfg, false);
  add_common(msweep_cmd, msweep_common);
  msweep_cmd->add_option("--expect-slope", msweep_common.expect_slope, "lo,hi")
      ->delimiter(',')
      ->expected(2);

  auto* centroid_cmd = app.add_subcommand("centroid", "Distance to the centroid of a point set");
  add_centroid(centroid_cmd, centroid);
  add_common(centroid_cmd, centroid_common);

  auto* lowrank_cmd = app.add_subcommand("lowrank", "Threshold low-rank approximation");
  add_lowrank(lowrank_cmd, lowrank);
  add_common(lowrank_cmd, lowrank_common);

  auto* pca_cmd = app.add_subcommand("pca", "Top-k eigenvalues and eigenvector access");
  add_pca(pca_cmd, pcac);
  add_common(pca_cmd, pca_common);

  // sweep <algo> --param NAME --values a,b,c [algo options]
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter of an algorithm");
  sweep_cmd->require_subcommand(1);
  std::string sw_param;
  std::vector<double> sw_values;
  Common sw_common;
  InnerConfig sw_inner;
  MatvecConfig sw_matvec;
  CentroidConfig sw_centroid;
  LowrankConfig sw_lowrank;
  PcaConfig sw_pca;
  auto add_sweep_opts = [&](CLI::App* sub) {
    sub->add_option("--param", sw_param, "Swept parameter")->required();
    sub->add_option("--values", sw_values, "Swept values")->required()->delimiter(',');
    add_common(sub, sw_common);
    sub->add_option("--expect-slope", sw_common.expect_slope, "lo,hi")->delimiter(',')->expected(2);
  };
  auto* sw_inner_cmd = sweep_cmd->add_subcommand("inner", "Sweep eps, delta or dim of the inner-product estimator");
  add_inner(sw_inner_cmd, sw_inner);
  add_sweep_opts(sw_inner_cmd);
  auto* sw_matvec_cmd = sweep_cmd->add_subcommand("matvec", "Sweep a matvec parameter");
  add_matvec(sw_matvec_cmd, sw_matvec);
  add_sweep_opts(sw_matvec_cmd);
  auto* sw_centroid_cmd = sweep_cmd->add_subcommand("centroid", "Sweep a centroid parameter (scale for the Z dependence)");
  add_centroid(sw_centroid_cmd, sw_centroid);
  add_sweep_opts(sw_centroid_cmd);
  auto* sw_lowrank_cmd = sweep_cmd->add_subcommand("lowrank", "Sweep a low-rank parameter (usually q)");
  add_lowrank(sw_lowrank_cmd, sw_lowrank);
  add_sweep_opts(sw_lowrank_cmd);
  auto* sw_pca_cmd = sweep_cmd->add_subcommand("pca", "Sweep a PCA parameter (usually q)");
  add_pca(sw_pca_cmd, sw_pca);
  add_sweep_opts(sw_pca_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) return run_gen(gen, out, err);
    if (*inner_cmd) {
      return single([&](std::uint64_t s) { return run_inner(inner, inner_common, s); }, inner_common,
                    1.0 - inner.delta, out, err);
    }
    if (*matvec_cmd) {
      if (!*msweep_cmd && matvec_cmd->count("--seed") == 0) {
        err << "--seed is required\n";
        return 2;
      }
      if (*msweep_cmd) {
        MatvecConfig cfg = msweep_cfg;
        return sweep(
            "k", msweep_k,
            [&](double v) {
              if (!(v >= 1.0)) return false;
              cfg.k = static_cast<std::size_t>(v);
              return true;
            },
            [&](std::uint64_t s) { return run_matvec(cfg, msweep_common, s); }, msweep_common,
            1.0 - msweep_cfg.delta, "k", "queries_per_sample", out, err);
      }
      return single([&](std::uint64_t s) { return run_matvec(matvec, matvec_common, s); },
                    matvec_common, 1.0 - matvec.delta, out, err);
    }
    if (*centroid_cmd) {
      return single([&](std::uint64_t s) { return run_centroid(centroid, centroid_common, s); },
                    centroid_common, 1.0 - centroid.delta, out, err);
    }
    if (*lowrank_cmd) {
      return single([&](std::uint64_t s) { return run_lowrank(lowrank, lowrank_common, s); },
                    lowrank_common, 0.9, out, err);
    }
    if (*pca_cmd) {
      return single([&](std::uint64_t s) { return run_pca(pcac, pca_common, s); }, pca_common, 0.9,
                    out, err);
    }
    if (*sweep_cmd) {
      if (*sw_inner_cmd) {
        return sweep(
            sw_param, sw_values, [&](double v) { return set_inner(sw_inner, sw_param, v); },
            [&](std::uint64_t s) { return run_inner(sw_inner, sw_common, s); }, sw_common,
            1.0 - sw_inner.delta, "eps", "n_samples", out, err);
      }
      if (*sw_matvec_cmd) {
        return sweep(
            sw_param, sw_values, [&](double v) { return set_matvec(sw_matvec, sw_param, v); },
            [&](std::uint64_t s) { return run_matvec(sw_matvec, sw_common, s); }, sw_common,
            1.0 - sw_matvec.delta, "k", "queries_per_sample", out, err);
      }
      if (*sw_centroid_cmd) {
        return sweep(
            sw_param, sw_values, [&](double v) { return set_centroid(sw_centroid, sw_param, v); },
            [&](std::uint64_t s) { return run_centroid(sw_centroid, sw_common, s); }, sw_common,
            1.0 - sw_centroid.delta, "z", "n_samples", out, err);
      }
      if (*sw_lowrank_cmd) {
        return sweep(
            sw_param, sw_values, [&](double v) { return set_lowrank(sw_lowrank, sw_param, v); },
            [&](std::uint64_t s) { return run_lowrank(sw_lowrank, sw_common, s); }, sw_common, 0.9,
            "q", "excess", out, err);
      }
      if (*sw_pca_cmd) {
        return sweep(
            sw_param, sw_values, [&](double v) { return set_pca(sw_pca, sw_param, v); },
            [&](std::uint64_t s) { return run_pca(sw_pca, sw_common, s); }, sw_common, 0.9, "q",
            "abs_error", out, err);
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run_cli(static_cast<int>(storage.size()), argv.data(), out, err);
}

}  // namespace sqla::harness
