#include "matbf/classical.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "matbf/errors.hpp"
#include "matbf/parallel.hpp"

namespace matbf {

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("significance level must lie in (0, 1)");
}

// Upper-tail Student-t quantile at probability q.
double t_upper(double q, double dof) {
  return boost::math::quantile(boost::math::complement(boost::math::students_t(dof), q));
}

// (N-1) t / sqrt((N - 2 + t^2) N), t the upper level/(2N) quantile on N-2 dof.
double grubbs_critical(std::size_t N, double level) {
  const double Nd = static_cast<double>(N);
  const double t = t_upper(level / (2.0 * Nd), Nd - 2.0);
  return (Nd - 1.0) * t / std::sqrt((Nd - 2.0 + t * t) * Nd);
}

struct Extreme {
  double R = 0.0;
  std::size_t pos = 0;
};

Extreme most_extreme(const std::vector<double>& x) {
  const double N = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / N;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (N - 1.0));
  if (!(sd > 0.0) || !(sd > 1e-14 * std::abs(mean)))
    throw DomainError("zero sample variance");
  Extreme e;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::abs(x[i] - mean) / sd;
    if (r > e.R) e = {r, i};
  }
  return e;
}

}  // namespace

GrubbsResult grubbs_test(const std::vector<double>& x, double alpha_level) {
  check_level(alpha_level);
  if (x.size() < 3) throw InputError("grubbs_test: at least 3 points required");
  const Extreme e = most_extreme(x);
  GrubbsResult r;
  r.G = e.R;
  r.argmax = e.pos;
  r.critical = grubbs_critical(x.size(), alpha_level);
  if (r.G > r.critical) r.flagged = e.pos;
  return r;
}

std::vector<std::size_t> gesd_test(const std::vector<double>& x, std::size_t max_outliers,
                                   double alpha_level) {
  check_level(alpha_level);
  if (max_outliers == 0) return {};
  if (x.size() < max_outliers + 2)
    throw InputError("gesd_test: length must be at least max_outliers + 2");
  std::vector<double> work = x;
  std::vector<std::size_t> index(x.size());
  std::iota(index.begin(), index.end(), 0);
  std::vector<std::size_t> removed;
  std::size_t count = 0;
  const double N = static_cast<double>(x.size());
  for (std::size_t i = 1; i <= max_outliers; ++i) {
    const Extreme e = most_extreme(work);
    const double di = static_cast<double>(i);
    const double t = t_upper(alpha_level / (2.0 * (N - di + 1.0)), N - di - 1.0);
    const double lambda = (N - di) * t / std::sqrt((N - di - 1.0 + t * t) * (N - di + 1.0));
    removed.push_back(index[e.pos]);
    if (e.R > lambda) count = i;
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(e.pos));
    index.erase(index.begin() + static_cast<std::ptrdiff_t>(e.pos));
  }
  removed.resize(count);
  return removed;
}

std::size_t default_gesd_cap(std::size_t length) {
  return static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(length)));
}

ClassicalReport elementwise_scan(const MatrixSeries& series, const ClassicalOptions& opts) {
  if (opts.levels.empty()) throw InputError("elementwise_scan: no significance levels");
  for (double l : opts.levels) check_level(l);
  const std::size_t T = series.size();
  if (T < 3) throw InputError("elementwise_scan: at least 3 observations per entry required");
  if (opts.window && (*opts.window < 3 || *opts.window > T))
    throw InputError("elementwise_scan: window must lie in [3, series length]");

  ClassicalReport rep;
  rep.p = series.p();
  rep.n = series.n();
  rep.bonferroni = opts.bonferroni;
  rep.nominal_levels = opts.levels;
  for (const auto& o : series.obs()) rep.times.push_back(o.t);
  const double pn = static_cast<double>(rep.p) * rep.n;
  for (double l : opts.levels) rep.levels.push_back(opts.bonferroni ? l / pn : l);

  const std::size_t E = static_cast<std::size_t>(rep.p * rep.n), L = rep.levels.size();
  rep.flags.assign(L, std::vector<std::vector<unsigned char>>(E, std::vector<unsigned char>(T, 0)));
  std::vector<std::string> errors(E);

  const auto run = [&](const std::vector<double>& x, double level) {
    if (opts.test == ClassicalTest::grubbs) {
      const auto r = grubbs_test(x, level);
      return r.flagged ? std::vector<std::size_t>{*r.flagged} : std::vector<std::size_t>{};
    }
    std::size_t cap = opts.max_outliers.value_or(default_gesd_cap(x.size()));
    cap = std::min(cap, x.size() - 2);
    return gesd_test(x, cap, level);
  };

  parallel_for(E, [&](std::size_t e) {
    const Eigen::Index i = static_cast<Eigen::Index>(e % rep.p);
    const Eigen::Index j = static_cast<Eigen::Index>(e / rep.p);
    std::vector<double> full(T);
    for (std::size_t s = 0; s < T; ++s) full[s] = series[s].Y(i, j);
    try {
      for (std::size_t l = 0; l < L; ++l) {
        if (!opts.window) {
          for (std::size_t s : run(full, rep.levels[l])) rep.flags[l][e][s] = 1;
        } else {
          // Trailing window ending at s; only the newest point can be flagged.
          const std::size_t w = *opts.window;
          for (std::size_t s = w - 1; s < T; ++s) {
            const std::vector<double> x(full.begin() + static_cast<std::ptrdiff_t>(s + 1 - w),
                                        full.begin() + static_cast<std::ptrdiff_t>(s + 1));
            for (std::size_t k : run(x, rep.levels[l]))
              if (k == w - 1) rep.flags[l][e][s] = 1;
          }
        }
      }
    } catch (const std::exception& ex) {
      errors[e] = std::to_string(i) + "," + std::to_string(j) + ": " + ex.what();
    }
  });
  for (auto& m : errors)
    if (!m.empty()) rep.entry_errors.push_back(std::move(m));

  rep.count_per_time.assign(L, std::vector<long>(T, 0));
  rep.rows_per_time.assign(L, std::vector<long>(T, 0));
  rep.cols_per_time.assign(L, std::vector<long>(T, 0));
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t s = 0; s < T; ++s) {
      std::vector<char> row(rep.p, 0), col(rep.n, 0);
      for (std::size_t e = 0; e < E; ++e)
        if (rep.flags[l][e][s]) {
          ++rep.count_per_time[l][s];
          row[e % rep.p] = 1;
          col[e / rep.p] = 1;
        }
      rep.rows_per_time[l][s] = std::accumulate(row.begin(), row.end(), 0L);
      rep.cols_per_time[l][s] = std::accumulate(col.begin(), col.end(), 0L);
    }
  return rep;
}

}  // namespace matbf
