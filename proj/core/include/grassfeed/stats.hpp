// SPDX-License-Identifier: Apache-2.0
//
// grassfeed: limited-feedback block diagonalization simulator
// Copyright (C) 2026 The grassfeed authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace grassfeed::stats {

/// Two-sided standard normal quantile at 99% confidence.
inline constexpr double kZ99 = 2.5758293035489004;

/// Pairwise (cascade) summation; result depends only on element order.
double pairwise_sum(std::span<const double> values);

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation
    double ci99 = 0.0;   // half-width of the 99% normal confidence interval for the mean
};

Summary summarize(std::span<const double> values);

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

struct KsResult {
    double statistic;
    double p_value;
};

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS statistic sup |F_n - F| against a continuous CDF.
double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);

} // namespace grassfeed::stats
