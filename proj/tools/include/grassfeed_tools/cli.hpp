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
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace grassfeed::tools {

/// Entry point of the `grassfeed` executable. args[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SelftestCase {
    int M;
    int N;
    unsigned bits;
};

struct SelftestResult {
    SelftestCase config;
    double ks_statistic;
    double p_value;
    double mean_exhaustive;
    double mean_emulated;
    double relative_mean_error;
    double truncation_probability; // P(min d2 > 1) of the emulated law
    bool passed;
};

/// The emulator-vs-exhaustive equivalence suite on d2 samples.
inline const std::vector<SelftestCase> kSelftestCases = {{4, 2, 8}, {6, 2, 8}, {4, 1, 10}};

/// Draws `samples` exhaustive and `samples` emulated distances and applies a
/// two-sample KS test at `alpha` plus a relative mean tolerance. The
/// emulation guard is lowered so that small codebooks can be compared.
SelftestResult run_selftest_case(const SelftestCase& c, std::size_t samples, std::uint64_t seed, double alpha = 0.01,
                                 double mean_tolerance = 0.02);

} // namespace grassfeed::tools
