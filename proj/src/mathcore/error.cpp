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

#include "mathcore/error.hpp"

namespace ncflo {

const char *error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDimension:
            return "invalid-dimension";
        case ErrorCode::InvalidTolerance:
            return "invalid-tolerance";
        case ErrorCode::InvalidConfig:
            return "invalid-config";
        case ErrorCode::DimensionMismatch:
            return "dimension-mismatch";
        case ErrorCode::Capacity:
            return "capacity";
        case ErrorCode::Normalization:
            return "normalization";
        case ErrorCode::PauliExclusion:
            return "pauli-exclusion";
        case ErrorCode::PostSelectionFailure:
            return "post-selection-failure";
        case ErrorCode::Numerical:
            return "numerical";
        case ErrorCode::Degenerate:
            return "degenerate";
        case ErrorCode::Io:
            return "io";
    }
    return "unknown";
}

}  // namespace ncflo
