// SPDX-License-Identifier: Apache-2.0

#include "segeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace segeval {

namespace {

void require_sample(std::span<const double> x, const char* what) {
  if (x.empty()) throw std::invalid_argument(std::string(what) + ": empty sample");
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

void require_pair(std::span<const double> x, std::span<const double> y, const char* what) {
  require_sample(x, what);
  require_sample(y, what);
  if (x.size() != y.size()) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

bool is_constant(std::span<const double> x) {
  return std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end();
}

// Assumes validated, non-constant inputs. Sums of centred products are used
// directly so that exactly mirrored inputs give exactly +-1.
double pearson_unchecked(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace

std::string_view to_string(TieMode mode) {
  return mode == TieMode::midrank ? "midrank" : "countbelow";
}

std::optional<TieMode> parse_tie_mode(std::string_view text) {
  if (text == "midrank") return TieMode::midrank;
  if (text == "countbelow") return TieMode::countbelow;
  return std::nullopt;
}

std::vector<double> rank_transform(std::span<const double> x, TieMode mode) {
  require_sample(x, "rank_transform");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });

  std::vector<double> ranks(x.size());
  std::size_t group_start = 0;
  while (group_start < order.size()) {
    std::size_t group_end = group_start + 1;
    while (group_end < order.size() && x[order[group_end]] == x[order[group_start]]) ++group_end;
    // Positions [group_start, group_end) hold one tie group.
    const double rank = mode == TieMode::countbelow
                            ? static_cast<double>(group_start)
                            : static_cast<double>(group_start + 1 + group_end) / 2.0;
    for (auto k = group_start; k < group_end; ++k) ranks[order[k]] = rank;
    group_start = group_end;
  }
  return ranks;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  require_pair(x, y, "pearson_r");
  if (is_constant(x) || is_constant(y)) return 0.0;
  return pearson_unchecked(x, y);
}

double spearman_rho(std::span<const double> x, std::span<const double> y, TieMode mode) {
  require_pair(x, y, "spearman_rho");
  if (is_constant(x) || is_constant(y)) return 0.0;
  const auto rx = rank_transform(x, mode);
  const auto ry = rank_transform(y, mode);
  return pearson_unchecked(rx, ry);
}

double ks_statistic(std::span<const double> x, std::span<const double> y) {
  require_sample(x, "ks_statistic");
  require_sample(y, "ks_statistic");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());

  // Merge walk: at each distinct pooled value, consume everything <= it from
  // both samples, then compare the right-continuous ECDFs.
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      v = a[i];
    } else {
      v = b[j];
    }
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

double mean(std::span<const double> x) {
  require_sample(x, "mean");
  if (is_constant(x)) return x.front();
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

Moments population_moments(std::span<const double> x) {
  require_sample(x, "population_moments");
  if (is_constant(x)) return {x.front(), 0.0};
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / static_cast<double>(x.size()))};
}

}  // namespace segeval
