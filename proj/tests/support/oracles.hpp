#pragma once

// Deliberately naive reference implementations, written independently of
// src/metrics.cpp, used to cross-check it.

#include <cmath>
#include <vector>

namespace misery::fixture {

struct Pairs {
  std::vector<double> pred;
  std::vector<double> truth;
};

inline double brute_mae(const Pairs& p) {
  long double s = 0;
  for (std::size_t i = 0; i < p.pred.size(); ++i) s += std::fabs(p.pred[i] - p.truth[i]);
  return static_cast<double>(s / p.pred.size());
}

inline double brute_rmse(const Pairs& p) {
  long double s = 0;
  for (std::size_t i = 0; i < p.pred.size(); ++i) s += (p.pred[i] - p.truth[i]) * (p.pred[i] - p.truth[i]);
  return static_cast<double>(std::sqrt(s / p.pred.size()));
}

inline double brute_corr(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) sx += x[i], sy += y[i];
  const long double mx = sx / n, my = sy / n;
  long double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(cov / std::sqrt(vx * vy));
}

// rank = 1 + (# smaller) + (# equal others) / 2
inline std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      else if (v[j] == v[i] && j != i) ++equal;
    }
    r[i] = 1 + less + equal / 2;
  }
  return r;
}

inline double brute_pearson(const Pairs& p) { return brute_corr(p.pred, p.truth); }
inline double brute_spearman(const Pairs& p) { return brute_corr(brute_ranks(p.pred), brute_ranks(p.truth)); }

inline double brute_r2(const Pairs& p) {
  long double mean = 0;
  for (double t : p.truth) mean += t;
  mean /= p.truth.size();
  long double res = 0, tot = 0;
  for (std::size_t i = 0; i < p.pred.size(); ++i) {
    res += (p.truth[i] - p.pred[i]) * (p.truth[i] - p.pred[i]);
    tot += (p.truth[i] - mean) * (p.truth[i] - mean);
  }
  return static_cast<double>(1 - res / tot);
}

}  // namespace misery::fixture
