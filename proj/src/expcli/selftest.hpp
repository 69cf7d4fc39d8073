// Copyright 2026 The ncflo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NCFLO_EXPCLI_SELFTEST_HPP
#define NCFLO_EXPCLI_SELFTEST_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ncflo::exp {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;  ///< largest deviation seen
    double tolerance = 0.0;
    std::string detail;
};

/// Cross-oracle and closed-form checks at small sizes (a few seconds).
std::vector<CheckResult> run_selftest(std::uint64_t seed = 12345);

}  // namespace ncflo::exp

#endif
