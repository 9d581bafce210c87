#include "robustfit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>

#include "robustfit/correspondence_io.hpp"
#include "robustfit/error.hpp"
#include "robustfit/random.hpp"

namespace robustfit::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_error(double v) { return std::isnan(v) ? "nan" : io::format_number(v); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

template <typename T>
T parse_unsigned(const std::string& s, int line, const char* name) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string(name) + ": '" + s + "' is not an unsigned integer", line);
  }
  return v;
}

double parse_real(const std::string& s, int line, const char* name, bool allow_nan) {
  if (allow_nan && s == "nan") return kNaN;
  double v = 0.0;
  if (!io::parse_number(s, v)) {
    throw ParseError(std::string(name) + ": '" + s + "' is not a finite number", line);
  }
  return v;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

BenchRecord run_once(const NamedDataset& ds, LoMethod method, double sigma, std::size_t trial,
                     double huber_c, const BenchConfig& cfg) {
  BenchRecord rec;
  rec.dataset = ds.id;
  rec.method = method;
  rec.sigma = sigma;
  rec.trial = trial;
  rec.seed = derive_seed(cfg.master_seed, trial);

  RansacConfig rc = cfg.base;
  rc.epsilon.reset();
  rc.sigma = sigma;
  rc.seed = rec.seed;
  rc.lo_method = method;
  rc.huber_c = huber_c;
  try {
    const RunReport report = run_ransac(ds.data, rc);
    rec.error_px = validation_error(report.best->model, ds.data, cfg.symmetric_transfer);
    rec.inliers = report.best->inlier_count;
    rec.iterations = report.iterations_used;
    rec.lo_count = report.lo_invocations;
    rec.wall_ms = report.wall_ms;
    rec.sample_digest = report.sample_digest;
  } catch (const EstimationFailed& e) {
    rec.error_px = kNaN;
    rec.iterations = e.report().iterations_used;
    rec.lo_count = e.report().lo_invocations;
    rec.wall_ms = e.report().wall_ms;
    rec.sample_digest = e.report().sample_digest;
  } catch (const Error&) {
    rec.error_px = kNaN;
  }
  return rec;
}

}  // namespace

void BenchConfig::validate() const {
  if (methods.empty()) throw InvalidInput("bench: empty method list");
  if (sigmas.empty()) throw InvalidInput("bench: empty sigma list");
  if (trials < 1) throw InvalidInput("bench: trials must be >= 1");
  for (double s : sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("bench: sigmas must be positive");
  }
}

double validation_error(const ModelMatrix& model, const Dataset& data, bool symmetric_transfer) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const Correspondence& c : data.correspondences) {
    if (c.label != Label::inlier) continue;
    sum += (symmetric_transfer && model.kind() == ModelKind::homography)
               ? symmetric_transfer_error(model, c)
               : residual(model, c);
    ++n;
  }
  return n == 0 ? kNaN : sum / static_cast<double>(n);
}

BenchRecord run_single(const NamedDataset& ds, LoMethod method, double sigma, std::size_t trial,
                       const BenchConfig& cfg) {
  if (method != LoMethod::huber || !cfg.huber_sweep) {
    return run_once(ds, method, sigma, trial, cfg.base.huber_c, cfg);
  }
  BenchRecord out;
  std::vector<double> errors;
  double inliers = 0.0;
  double iterations = 0.0;
  double lo = 0.0;
  double wall = 0.0;
  bool failed = false;
  for (double c : kHuberSweep) {
    const BenchRecord r = run_once(ds, method, sigma, trial, c, cfg);
    if (std::isnan(r.error_px)) failed = true;
    errors.push_back(r.error_px);
    inliers += static_cast<double>(r.inliers);
    iterations += static_cast<double>(r.iterations);
    lo += static_cast<double>(r.lo_count);
    wall += r.wall_ms;
    out = r;
  }
  const double k = static_cast<double>(std::size(kHuberSweep));
  out.error_px = failed ? kNaN : mean_of(errors);
  out.inliers = static_cast<std::size_t>(std::llround(inliers / k));
  out.iterations = static_cast<std::size_t>(std::llround(iterations / k));
  out.lo_count = static_cast<std::size_t>(std::llround(lo / k));
  out.wall_ms = wall / k;
  return out;
}

std::vector<BenchRecord> run_bench(const std::vector<NamedDataset>& datasets,
                                   const BenchConfig& cfg) {
  cfg.validate();
  if (datasets.empty()) throw InvalidInput("bench: no datasets");
  const std::size_t nd = datasets.size();
  const std::size_t ns = cfg.sigmas.size();
  const std::size_t nm = cfg.methods.size();
  const std::size_t nt = cfg.trials;
  std::vector<BenchRecord> rows(nd * ns * nm * nt);

  // A task is one (dataset, sigma, trial); it fills its nm slots.
  const std::size_t tasks = nd * ns * nt;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      const std::size_t t = task % nt;
      const std::size_t s = (task / nt) % ns;
      const std::size_t d = task / (nt * ns);
      for (std::size_t m = 0; m < nm; ++m) {
        rows[((d * ns + s) * nm + m) * nt + t] =
            run_single(datasets[d], cfg.methods[m], cfg.sigmas[s], t, cfg);
      }
    }
  };

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
  out << kCsvHeader << '\n';
  for (const BenchRecord& r : rows) {
    if (r.dataset.find_first_of(",\n\r") != std::string::npos) {
      throw InvalidInput("bench: dataset id '" + r.dataset + "' contains a separator");
    }
    out << r.dataset << ',' << to_string(r.method) << ',' << io::format_number(r.sigma) << ','
        << r.trial << ',' << r.seed << ',' << format_error(r.error_px) << ',' << r.inliers << ','
        << r.iterations << ',' << r.lo_count << ',' << io::format_number(r.wall_ms) << '\n';
  }
}

std::vector<BenchRecord> parse_csv(std::istream& in) {
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) throw ParseError("empty bench CSV", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ParseError("unexpected CSV header", 1);
  std::vector<BenchRecord> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 10) {
      throw ParseError("expected 10 fields, got " + std::to_string(f.size()), lineno);
    }
    BenchRecord r;
    r.dataset = f[0];
    try {
      r.method = lo_method_from_string(f[1]);
    } catch (const InvalidInput& e) {
      throw ParseError(e.what(), lineno);
    }
    r.sigma = parse_real(f[2], lineno, "sigma", false);
    r.trial = parse_unsigned<std::size_t>(f[3], lineno, "trial");
    r.seed = parse_unsigned<std::uint64_t>(f[4], lineno, "seed");
    r.error_px = parse_real(f[5], lineno, "error_px", true);
    r.inliers = parse_unsigned<std::size_t>(f[6], lineno, "inliers");
    r.iterations = parse_unsigned<std::size_t>(f[7], lineno, "iterations");
    r.lo_count = parse_unsigned<std::size_t>(f[8], lineno, "lo_count");
    r.wall_ms = parse_real(f[9], lineno, "wall_ms", false);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_digest_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
  out << "dataset,method,sigma,trial,sample_digest\n";
  for (const BenchRecord& r : rows) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(r.sample_digest));
    out << r.dataset << ',' << to_string(r.method) << ',' << io::format_number(r.sigma) << ','
        << r.trial << ',' << hex << '\n';
  }
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return kNaN;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& rows) {
  struct Group {
    std::vector<double> errors;
    std::map<std::string, std::vector<double>> per_dataset;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double wall = 0.0;
  };
  std::map<std::pair<int, double>, Group> groups;
  for (const BenchRecord& r : rows) {
    Group& g = groups[{static_cast<int>(r.method), r.sigma}];
    ++g.runs;
    g.wall += r.wall_ms;
    if (std::isnan(r.error_px)) {
      ++g.failures;
      continue;
    }
    g.errors.push_back(r.error_px);
    g.per_dataset[r.dataset].push_back(r.error_px);
  }

  std::vector<SummaryRow> out;
  for (auto& [key, g] : groups) {
    SummaryRow s;
    s.method = static_cast<LoMethod>(key.first);
    s.sigma = key.second;
    s.runs = g.runs;
    s.failures = g.failures;
    std::vector<double> means;
    for (const auto& [id, errs] : g.per_dataset) means.push_back(mean_of(errs));
    s.mean = mean_of(means);
    std::sort(g.errors.begin(), g.errors.end());
    s.median = quantile_sorted(g.errors, 0.5);
    s.q1 = quantile_sorted(g.errors, 0.25);
    s.q3 = quantile_sorted(g.errors, 0.75);
    s.iqr = s.q3 - s.q1;
    s.mean_wall_ms = g.wall / static_cast<double>(g.runs);
    out.push_back(s);
  }
  return out;
}

std::vector<Selection> select_thresholds(const std::vector<SummaryRow>& summary) {
  std::map<int, std::vector<const SummaryRow*>> by_method;
  for (const SummaryRow& s : summary) {
    if (!std::isnan(s.mean)) by_method[static_cast<int>(s.method)].push_back(&s);
  }
  std::vector<Selection> out;
  for (const auto& [m, rows] : by_method) {
    double best_err = std::numeric_limits<double>::infinity();
    for (const SummaryRow* s : rows) best_err = std::min(best_err, s->mean);
    const SummaryRow* pick = nullptr;
    for (const SummaryRow* s : rows) {
      if (s->mean > 1.01 * best_err) continue;
      if (!pick || s->mean_wall_ms < pick->mean_wall_ms ||
          (s->mean_wall_ms == pick->mean_wall_ms && s->sigma < pick->sigma)) {
        pick = s;
      }
    }
    out.push_back(Selection{pick->method, pick->sigma, pick->mean, pick->mean_wall_ms});
  }
  return out;
}

}  // namespace robustfit::bench
