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

#ifndef NCFLO_EXPCLI_EXPCLI_HPP
#define NCFLO_EXPCLI_EXPCLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mathcore/linalg.hpp"

namespace ncflo::exp {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char *kVersion = "0.1.0";
inline constexpr const char *kInstancesHeader =
    "instance_id,seed,n,m,d,attempts,chi_max,nu_nc,gamma,haar_ratio,ks_pt,anticonc_frac,wall_ms";

enum class Mode { Rates, Branch, Chi, Stats, Witness, FermionantCheck, All };
enum class Control { Monitored, Commuting };

const char *mode_name(Mode m);
Mode parse_mode(const std::string &s);
const char *control_name(Control c);
Control parse_control(const std::string &s);

struct Caps {
    int n_max_d2 = 8;
    int n_max_d3 = 6;
    long witness_cap = 256;
    long table_cap = 1L << 27;
    int dense_limit = 512;
    int factorial_cap = 9;
    int max_attempts = 200;
};

struct ExperimentConfig {
    Mode mode = Mode::All;
    std::vector<int> n{3};
    std::vector<int> d{2};
    std::vector<double> kappa{0.5};
    double eps = 1e-3;
    int instances = 200;
    int shots = 1000;
    std::uint64_t seed = 0;
    int boundary_l = 0;
    int boundary_r = 0;
    Control control = Control::Monitored;
    std::string out;
    int threads = 0;  ///< 0: hardware concurrency
    int t = -1;       ///< witness cut; -1: floor(n/2)
    bool operator_boundary = false;
    bool branches = false;  ///< write branches.csv (always on in branch mode)
    bool timing = false;    ///< record wall_ms; off keeps outputs byte-stable
    Caps caps;

    /// Accepts a config object, or a manifest carrying one under "config".
    /// Unknown keys are rejected.
    static ExperimentConfig from_json(const Json &j);
    Json to_json() const;
    /// Throws InvalidConfig with the offending field named.
    void validate() const;
};

struct RunRecord {
    long instance_id = 0;
    std::uint64_t seed = 0;
    int n = 0;
    int m = 0;
    int d = 0;
    int attempts = 0;
    double chi_max = math::kNaN;
    double nu_nc = math::kNaN;
    double gamma = math::kNaN;
    double haar_ratio = math::kNaN;
    double ks_pt = math::kNaN;
    double anticonc_frac = math::kNaN;
    double wall_ms = 0.0;
};

struct RateRow {
    long instance_id = 0;
    std::uint64_t seed = 0;
    int n = 0;
    int m = 0;
    int d = 0;
    double kappa = 0.0;
    int shots = 0;
    int collision_free = 0;
    double rate = 0.0;
    double rate_exact = 0.0;
    double rate_asymptotic = 0.0;
};

struct BranchRow {
    long instance_id = 0;
    long beta_index = 0;
    double amplitude_re = 0.0;
    double amplitude_im = 0.0;
    double prob = 0.0;
};

struct FermionantRow {
    long instance_id = 0;
    std::uint64_t seed = 0;
    int n = 0;
    int d = 0;
    math::Complex closure;
    math::Complex fermionant_form;
    double abs_error = 0.0;
};

struct WitnessRow {
    int n = 0;
    int t = 0;
    int d = 0;
    long size = 0;
    int rank = 0;
    bool diagonal = false;
    double max_off_diagonal = 0.0;
    double min_diagonal = 0.0;
    std::vector<int> diagonal_exponents;
};

struct OutputBundle {
    Json manifest;
    Json summary;
    std::vector<RunRecord> records;
    std::vector<RateRow> rates;
    std::vector<BranchRow> branches;
    std::vector<FermionantRow> fermionant;
    std::vector<WitnessRow> witness;
    int postselection_failures = 0;
};

/// Thread precedence: explicit override, then NCFLO_THREADS, then the config
/// value, then hardware concurrency.
int resolve_threads(const ExperimentConfig &cfg, std::optional<int> override_threads = std::nullopt);

OutputBundle run_ensemble(const ExperimentConfig &cfg, std::optional<int> override_threads = std::nullopt);

/// Writes manifest.json, instances.csv and the mode-dependent tables into dir.
void write_bundle(const OutputBundle &bundle, const std::string &dir);

std::string instances_csv(const std::vector<RunRecord> &records);

}  // namespace ncflo::exp

#endif
