// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace segeval {

// Order statistics over finite samples. Every function throws
// std::invalid_argument on empty input, non-finite values or length mismatch.

enum class TieMode {
  midrank,     // tied values share the mean of their 1-based sorted positions
  countbelow,  // rank = number of strictly smaller values
};

std::string_view to_string(TieMode mode);
std::optional<TieMode> parse_tie_mode(std::string_view text);

std::vector<double> rank_transform(std::span<const double> x, TieMode mode);

/// Pearson correlation with population moments. Returns exactly 0 when either
/// input is constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of the rank vectors; 0 when either sample is constant.
double spearman_rho(std::span<const double> x, std::span<const double> y,
                    TieMode mode = TieMode::midrank);

/// Two-sample Kolmogorov-Smirnov statistic: sup |F_x - F_y| over the pooled
/// sample points, with F(v) = fraction of values <= v.
double ks_statistic(std::span<const double> x, std::span<const double> y);

struct Moments {
  double mean = 0.0;
  double std = 0.0;  // population (divide by n)
};

Moments population_moments(std::span<const double> x);

double mean(std::span<const double> x);

}  // namespace segeval
