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

#include "expcli/expcli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "brancheval/brancheval.hpp"
#include "mathcore/error.hpp"
#include "mpodiag/mpodiag.hpp"
#include "statdiag/statdiag.hpp"

namespace ncflo::exp {

namespace {

struct NamedMode {
    Mode mode;
    const char *name;
};

constexpr NamedMode kModes[] = {
    {Mode::Rates, "rates"},   {Mode::Branch, "branch"},   {Mode::Chi, "chi"},
    {Mode::Stats, "stats"},   {Mode::Witness, "witness"}, {Mode::FermionantCheck, "fermionant-check"},
    {Mode::All, "all"},
};

}  // namespace

const char *mode_name(Mode m) {
    for (const auto &nm : kModes) {
        if (nm.mode == m) {
            return nm.name;
        }
    }
    return "unknown";
}

Mode parse_mode(const std::string &s) {
    for (const auto &nm : kModes) {
        if (s == nm.name) {
            return nm.mode;
        }
    }
    fail(ErrorCode::InvalidConfig, "unknown mode '" + s + "'");
}

const char *control_name(Control c) {
    return c == Control::Monitored ? "monitored" : "commuting";
}

Control parse_control(const std::string &s) {
    if (s == "monitored") {
        return Control::Monitored;
    }
    if (s == "commuting") {
        return Control::Commuting;
    }
    fail(ErrorCode::InvalidConfig, "control must be 'monitored' or 'commuting', got '" + s + "'");
}

namespace {

template <typename T>
std::vector<T> read_list(const Json &v, const char *key) {
    try {
        if (v.is_array()) {
            return v.get<std::vector<T>>();
        }
        return {v.get<T>()};
    } catch (const nlohmann::json::exception &) {
        fail(ErrorCode::InvalidConfig, std::string("config field '") + key + "' has the wrong type");
    }
}

template <typename T>
T read_value(const Json &v, const char *key) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception &) {
        fail(ErrorCode::InvalidConfig, std::string("config field '") + key + "' has the wrong type");
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json &input) {
    require(input.is_object(), ErrorCode::InvalidConfig, "config must be a JSON object");
    const Json &j = input.contains("config") && input.contains("schema_version") ? input.at("config") : input;
    require(j.is_object(), ErrorCode::InvalidConfig, "config must be a JSON object");
    ExperimentConfig c;
    for (const auto &[key, v] : j.items()) {
        if (key == "mode") {
            c.mode = parse_mode(read_value<std::string>(v, "mode"));
        } else if (key == "n") {
            c.n = read_list<int>(v, "n");
        } else if (key == "d") {
            c.d = read_list<int>(v, "d");
        } else if (key == "kappa") {
            c.kappa = read_list<double>(v, "kappa");
        } else if (key == "eps") {
            c.eps = read_value<double>(v, "eps");
        } else if (key == "instances") {
            c.instances = read_value<int>(v, "instances");
        } else if (key == "shots") {
            c.shots = read_value<int>(v, "shots");
        } else if (key == "seed") {
            c.seed = read_value<std::uint64_t>(v, "seed");
        } else if (key == "boundary_l") {
            c.boundary_l = read_value<int>(v, "boundary_l");
        } else if (key == "boundary_r") {
            c.boundary_r = read_value<int>(v, "boundary_r");
        } else if (key == "control") {
            c.control = parse_control(read_value<std::string>(v, "control"));
        } else if (key == "out") {
            c.out = read_value<std::string>(v, "out");
        } else if (key == "threads") {
            c.threads = read_value<int>(v, "threads");
        } else if (key == "t") {
            c.t = read_value<int>(v, "t");
        } else if (key == "operator_boundary") {
            c.operator_boundary = read_value<bool>(v, "operator_boundary");
        } else if (key == "branches") {
            c.branches = read_value<bool>(v, "branches");
        } else if (key == "timing") {
            c.timing = read_value<bool>(v, "timing");
        } else if (key == "caps") {
            require(v.is_object(), ErrorCode::InvalidConfig, "config field 'caps' must be an object");
            for (const auto &[ck, cv] : v.items()) {
                if (ck == "n_max_d2") {
                    c.caps.n_max_d2 = read_value<int>(cv, "caps.n_max_d2");
                } else if (ck == "n_max_d3") {
                    c.caps.n_max_d3 = read_value<int>(cv, "caps.n_max_d3");
                } else if (ck == "witness_cap") {
                    c.caps.witness_cap = read_value<long>(cv, "caps.witness_cap");
                } else if (ck == "table_cap") {
                    c.caps.table_cap = read_value<long>(cv, "caps.table_cap");
                } else if (ck == "dense_limit") {
                    c.caps.dense_limit = read_value<int>(cv, "caps.dense_limit");
                } else if (ck == "factorial_cap") {
                    c.caps.factorial_cap = read_value<int>(cv, "caps.factorial_cap");
                } else if (ck == "max_attempts") {
                    c.caps.max_attempts = read_value<int>(cv, "caps.max_attempts");
                } else {
                    fail(ErrorCode::InvalidConfig, "unknown config field 'caps." + ck + "'");
                }
            }
        } else {
            fail(ErrorCode::InvalidConfig, "unknown config field '" + key + "'");
        }
    }
    return c;
}

Json ExperimentConfig::to_json() const {
    Json j;
    j["mode"] = mode_name(mode);
    j["n"] = n;
    j["d"] = d;
    j["kappa"] = kappa;
    j["eps"] = eps;
    j["instances"] = instances;
    j["shots"] = shots;
    j["seed"] = seed;
    j["boundary_l"] = boundary_l;
    j["boundary_r"] = boundary_r;
    j["control"] = control_name(control);
    j["out"] = out;
    j["threads"] = threads;
    j["t"] = t;
    j["operator_boundary"] = operator_boundary;
    j["branches"] = branches;
    j["timing"] = timing;
    j["caps"] = {{"n_max_d2", caps.n_max_d2},       {"n_max_d3", caps.n_max_d3},
                 {"witness_cap", caps.witness_cap}, {"table_cap", caps.table_cap},
                 {"dense_limit", caps.dense_limit}, {"factorial_cap", caps.factorial_cap},
                 {"max_attempts", caps.max_attempts}};
    return j;
}

void ExperimentConfig::validate() const {
    auto check = [](bool ok, const std::string &msg) { require(ok, ErrorCode::InvalidConfig, "invalid config: " + msg); };
    check(!n.empty(), "n list is empty");
    for (int v : n) {
        check(v >= 1, "n must be >= 1");
    }
    check(!d.empty(), "d list is empty");
    for (int v : d) {
        check(v >= 2, "d must be >= 2");
    }
    check(!kappa.empty(), "kappa list is empty");
    for (double k : kappa) {
        check(std::isfinite(k) && k > 0.0, "kappa must be finite and > 0");
    }
    check(std::isfinite(eps) && eps >= 0.0, "eps must be finite and >= 0");
    check(instances >= 1, "instances must be >= 1");
    check(shots >= 1, "shots must be >= 1");
    check(threads >= 0, "threads must be >= 0");
    int dmin = *std::min_element(d.begin(), d.end());
    check(boundary_l >= 0 && boundary_l < dmin, "boundary_l must lie in [0, d)");
    check(boundary_r >= 0 && boundary_r < dmin, "boundary_r must lie in [0, d)");
    check(t >= -1, "t must be >= 0 (or -1 for floor(n/2))");
    if (t >= 0) {
        for (int v : n) {
            check(t <= v, "t must not exceed n");
        }
    }
    check(!(mode == Mode::Rates && control == Control::Commuting),
          "the commuting control has no monitoring stage; use control = monitored for rates");
    check(caps.n_max_d2 >= 1 && caps.n_max_d3 >= 1 && caps.witness_cap >= 1 && caps.table_cap >= 1 &&
              caps.dense_limit >= 1 && caps.factorial_cap >= 1 && caps.max_attempts >= 1,
          "caps must be positive");
}

int resolve_threads(const ExperimentConfig &cfg, std::optional<int> override_threads) {
    if (override_threads && *override_threads > 0) {
        return *override_threads;
    }
    if (const char *env = std::getenv("NCFLO_THREADS")) {
        char *end = nullptr;
        long v = std::strtol(env, &end, 10);
        require(end != env && *end == '\0' && v >= 1, ErrorCode::InvalidConfig,
                std::string("NCFLO_THREADS must be a positive integer, got '") + env + "'");
        return static_cast<int>(v);
    }
    if (cfg.threads > 0) {
        return cfg.threads;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

bool needs_rates(Mode m) {
    return m == Mode::Rates || m == Mode::All;
}
bool needs_table(Mode m) {
    return m == Mode::Branch || m == Mode::Stats || m == Mode::Chi || m == Mode::All;
}
bool needs_chi(Mode m) {
    return m == Mode::Chi || m == Mode::All;
}
bool needs_stats(Mode m) {
    return m == Mode::Branch || m == Mode::Stats || m == Mode::All;
}

struct Point {
    int n;
    int d;
    double kappa;
    int m;
    long first_id = 0;
    long count = 0;
    std::string status = "ok";
};

/// Branch-level capacity for (n, d), or an empty string when within caps.
std::string branch_capacity(const ExperimentConfig &cfg, int n, int d) {
    int n_max = d == 2 ? cfg.caps.n_max_d2 : d == 3 ? cfg.caps.n_max_d3 : mpo::kRoutingMaxN;
    long table = kernel::ipow(static_cast<long>(d) * d, n);
    if (n > n_max) {
        return "n = " + std::to_string(n) + " exceeds the cap " + std::to_string(n_max) + " for d = " + std::to_string(d);
    }
    if (n > mpo::kRoutingMaxN) {
        return "n exceeds the routing-tensor cap " + std::to_string(mpo::kRoutingMaxN);
    }
    if (table > cfg.caps.table_cap) {
        return "d^(2n) = " + std::to_string(table) + " exceeds the table cap";
    }
    if (n > cfg.caps.factorial_cap) {
        return "n exceeds the factorial cap " + std::to_string(cfg.caps.factorial_cap);
    }
    return {};
}

std::string point_capacity(const ExperimentConfig &cfg, const Point &p) {
    if (cfg.mode == Mode::FermionantCheck) {
        return p.n > cfg.caps.factorial_cap ? "n exceeds the factorial cap " + std::to_string(cfg.caps.factorial_cap)
                                            : std::string();
    }
    if (cfg.control == Control::Monitored && p.d * p.m > cfg.caps.dense_limit) {
        return "dm = " + std::to_string(p.d * p.m) + " exceeds the dense-matrix limit " +
               std::to_string(cfg.caps.dense_limit);
    }
    if (needs_table(cfg.mode)) {
        return branch_capacity(cfg, p.n, p.d);
    }
    return {};
}

struct InstanceResult {
    RunRecord record;
    std::optional<RateRow> rate;
    std::vector<BranchRow> branches;
    std::optional<FermionantRow> fermionant;
    bool failed = false;
    std::string note;
};

void fill_stats(RunRecord &rec, const branch::AmplitudeTable &table) {
    stat::EnsembleStats st = stat::porter_thomas_stats(branch::conditional_distribution(table));
    rec.gamma = st.gamma;
    rec.haar_ratio = st.haar_ratio;
    rec.ks_pt = st.ks_distance;
    rec.anticonc_frac = st.anticoncentration;
}

InstanceResult run_fermionant_instance(const ExperimentConfig &cfg, const Point &p, long id) {
    InstanceResult out;
    RunRecord &rec = out.record;
    rec.instance_id = id;
    rec.seed = math::mix_seed(cfg.seed, static_cast<std::uint64_t>(id));
    rec.n = p.n;
    rec.d = p.d;
    rec.m = p.m;
    rec.attempts = 1;
    math::RngStream rng(rec.seed);
    math::ComplexMatrix a = flo::scalar_post_selected(p.n, p.kappa, rng);
    flo::PostSelectedSub sub = branch::scalar_blocks(a, p.d);
    FermionantRow row;
    row.instance_id = id;
    row.seed = rec.seed;
    row.n = p.n;
    row.d = p.d;
    row.closure = branch::cyclic_closure(sub, branch::BranchOutcome::zero(p.n, p.d), cfg.caps.factorial_cap);
    row.fermionant_form = branch::cyclic_closure_fermionant_form(a, p.d, cfg.caps.factorial_cap);
    row.abs_error = std::abs(row.closure - row.fermionant_form);
    out.fermionant = row;
    return out;
}

InstanceResult run_instance(const ExperimentConfig &cfg, const Point &p, long id) {
    if (cfg.mode == Mode::FermionantCheck) {
        return run_fermionant_instance(cfg, p, id);
    }
    InstanceResult out;
    RunRecord &rec = out.record;
    rec.instance_id = id;
    rec.seed = math::mix_seed(cfg.seed, static_cast<std::uint64_t>(id));
    rec.n = p.n;
    rec.m = p.m;
    rec.d = p.d;
    math::RngStream rng(rec.seed);
    flo::DiluteConfig dil = flo::DiluteConfig::make(p.n, p.d, p.kappa);

    flo::PostSelectedSub sub;
    std::optional<branch::BranchOutcome> beta;
    if (cfg.control == Control::Commuting) {
        branch::CommutingControl cc = branch::commuting_control_instance(p.n, p.d, rng, p.kappa);
        sub = std::move(cc.sub);
        beta = cc.beta;
        rec.attempts = 1;
    } else {
        flo::PropagatorBlocks v = flo::make_instance(dil, rng, cfg.caps.dense_limit);
        if (needs_rates(cfg.mode)) {
            RateRow rr;
            rr.instance_id = id;
            rr.seed = rec.seed;
            rr.n = p.n;
            rr.m = p.m;
            rr.d = p.d;
            rr.kappa = p.kappa;
            rr.shots = cfg.shots;
            rr.collision_free = flo::count_collision_free(v, dil, cfg.shots, rng);
            rr.rate = static_cast<double>(rr.collision_free) / cfg.shots;
            rr.rate_exact = flo::collision_free_rate_exact(p.n, p.m, p.d);
            rr.rate_asymptotic = flo::collision_free_rate_asymptotic(p.kappa, p.d);
            out.rate = rr;
        }
        try {
            flo::PostSelection ps = flo::post_select(v, dil, rng, cfg.caps.max_attempts);
            rec.attempts = ps.attempts;
            sub = std::move(ps.sub);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::PostSelectionFailure) {
                throw;
            }
            rec.attempts = cfg.caps.max_attempts;
            out.failed = true;
            out.note = e.what();
            return out;
        }
    }
    if (!needs_table(cfg.mode)) {
        return out;
    }

    branch::AmplitudeTable table;
    try {
        table = branch::amplitude_table(sub, cfg.boundary_l, cfg.boundary_r, cfg.caps.table_cap);
        if (cfg.control == Control::Monitored) {
            // Monitored byproducts follow the Born rule of the conditional branch distribution.
            long idx = branch::sample_index(branch::conditional_distribution(table), rng);
            beta = branch::BranchOutcome::from_index(idx, p.n, p.d);
        }
        if (needs_stats(cfg.mode)) {
            fill_stats(rec, cfg.control == Control::Commuting ? branch::restrict_z_only(table) : table);
        }
    } catch (const Error &e) {
        if (e.code() != ErrorCode::Degenerate) {
            throw;
        }
        out.note = "instance " + std::to_string(id) + ": " + e.what();
        // A vanishing boundary slice leaves beta unsampled; fall back to a uniform draw.
        if (!beta) {
            beta = branch::BranchOutcome::uniform(p.n, p.d, rng);
        }
    }
    if (cfg.mode == Mode::Branch || cfg.branches) {
        std::vector<double> prob(table.amplitudes.size(), math::kNaN);
        if (table.normalization > 0.0) {
            prob = branch::conditional_distribution(table);
        }
        for (size_t i = 0; i < table.amplitudes.size(); ++i) {
            out.branches.push_back(
                {id, static_cast<long>(i), table.amplitudes[i].real(), table.amplitudes[i].imag(), prob[i]});
        }
    }
    rec.nu_nc = stat::nc_score(branch::dress(sub, *beta)).value;
    if (needs_chi(cfg.mode)) {
        mpo::RoutingTensor f =
            mpo::routing_tensor(sub, *beta, cfg.boundary_l, cfg.boundary_r, cfg.operator_boundary);
        rec.chi_max = mpo::chi_profile(f, cfg.eps).chi_max;
    }
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json point_summary(const Point &p, const std::vector<InstanceResult> &results) {
    Json s;
    s["n"] = p.n;
    s["d"] = p.d;
    s["kappa"] = p.kappa;
    s["m"] = p.m;
    s["status"] = p.status;
    s["instances"] = p.count;
    s["first_instance_id"] = p.first_id;
    if (p.count == 0) {
        return s;
    }
    std::vector<double> chi, nc, gamma, ratio, ks, ac, rate, attempts, ferr;
    int failures = 0;
    for (long i = 0; i < p.count; ++i) {
        const InstanceResult &r = results[p.first_id + i];
        failures += r.failed ? 1 : 0;
        attempts.push_back(r.record.attempts);
        auto push = [](std::vector<double> &v, double x) {
            if (!std::isnan(x)) {
                v.push_back(x);
            }
        };
        push(chi, r.record.chi_max);
        push(nc, r.record.nu_nc);
        push(gamma, r.record.gamma);
        push(ratio, r.record.haar_ratio);
        push(ks, r.record.ks_pt);
        push(ac, r.record.anticonc_frac);
        if (r.rate) {
            rate.push_back(r.rate->rate);
        }
        if (r.fermionant) {
            ferr.push_back(r.fermionant->abs_error);
        }
    }
    s["postselection_failures"] = failures;
    s["median_attempts"] = stat::median(attempts);
    auto add = [&](const char *key, const std::vector<double> &v, bool with_mean) {
        if (v.empty()) {
            return;
        }
        s[std::string("median_") + key] = stat::median(v);
        if (with_mean) {
            s[std::string("mean_") + key] = stat::mean(v);
        }
    };
    add("chi_max", chi, false);
    add("nu_nc", nc, true);
    add("gamma", gamma, false);
    add("haar_ratio", ratio, false);
    add("ks_pt", ks, false);
    add("anticonc_frac", ac, false);
    if (!rate.empty()) {
        s["median_rate"] = stat::median(rate);
        s["rate_exact"] = flo::collision_free_rate_exact(p.n, p.m, p.d);
        s["rate_asymptotic"] = flo::collision_free_rate_asymptotic(p.kappa, p.d);
    }
    if (!ferr.empty()) {
        s["max_abs_error"] = *std::max_element(ferr.begin(), ferr.end());
    }
    return s;
}

Json reference_block(const ExperimentConfig &cfg) {
    Json ref;
    Json gin;
    for (int d : {2, 3}) {
        stat::StoredReference r = stat::stored_ginibre_reference(d);
        gin[std::to_string(d)] = {{"mean", r.mean}, {"stderr", r.stderr_}, {"pairs", r.pairs}, {"seed", r.seed}};
    }
    ref["ginibre_nc_mean"] = gin;
    Json rates = Json::array();
    for (double k : cfg.kappa) {
        for (int d : cfg.d) {
            rates.push_back({{"d", d}, {"kappa", k}, {"p_inf", flo::collision_free_rate_asymptotic(k, d)}});
        }
    }
    ref["collision_free_asymptotic"] = rates;
    Json haar = Json::array();
    for (int d : cfg.d) {
        for (int n : cfg.n) {
            double outcomes = std::pow(static_cast<double>(d), 2 * n);
            haar.push_back({{"n", n}, {"d", d}, {"outcomes", outcomes}, {"gamma_mean", 2.0 / (outcomes + 1.0)}});
        }
    }
    ref["haar_gamma_mean"] = haar;
    ref["porter_thomas_density"] = "exp(-x)";
    ref["anticoncentration_reference"] = std::exp(-1.0);
    ref["histogram"] = {{"bins", stat::kHistogramBins}, {"low", stat::kHistogramLow}, {"high", stat::kHistogramHigh}};
    return ref;
}

Json conventions_block(const ExperimentConfig &cfg) {
    Json c;
    c["index_base"] = "0-based blocks, modes, steps and labels; mode (j, alpha) has flat index j*d + alpha";
    c["tensor_slot_order"] = "slot t = 0 is the most significant digit";
    c["byproduct"] = "relabeled update xi -> d^-1 xi^T D_beta; raw D^T byproducts mapped by transpose relabel";
    c["beta_index"] = "sum_t (a_t d + b_t) (d^2)^(n-1-t)";
    c["boundary"] = {{"l", cfg.boundary_l}, {"r", cfg.boundary_r}};
    c["branch_distribution"] = "conditioned on the fixed boundary readout r, full enumeration";
    c["monitored_beta"] = "Born-sampled from p(beta|c) once per instance";
    c["chi_definition"] = cfg.operator_boundary
                              ? "relative eps-rank of the routing tensor with open wire legs (d^2 extra left index)"
                              : "relative eps-rank of the scalar routing tensor with boundaries contracted";
    c["chi_truncation"] = "relative";
    c["commuting_control"] =
        "S_{t,k} = a_{t,k} 1_d with a the post-selected scalar sub-matrix of a Haar U(m); beta_t = (0, b_t), b_t "
        "uniform; statistics over the d^n Z-only outcomes";
    c["input_labels"] = "uniform per block per shot (Bell-initialized inputs have maximally mixed reduced states)";
    c["seeding"] = "instance seed = mix_seed(master seed, global instance id)";
    c["wall_ms"] = cfg.timing ? "measured" : "not measured (0)";
    return c;
}

std::vector<Point> build_points(const ExperimentConfig &cfg) {
    std::vector<Point> points;
    for (double k : cfg.kappa) {
        for (int d : cfg.d) {
            for (int n : cfg.n) {
                Point p{n, d, k, flo::DiluteConfig::make(n, d, k).m};
                points.push_back(p);
            }
        }
    }
    return points;
}

}  // namespace

OutputBundle run_ensemble(const ExperimentConfig &cfg, std::optional<int> override_threads) {
    cfg.validate();
    const int threads = resolve_threads(cfg, override_threads);
    OutputBundle bundle;
    Json notes = Json::array();
    std::vector<Point> points = build_points(cfg);

    if (cfg.mode == Mode::Witness) {
        for (const Point &p : points) {
            if (p.kappa != cfg.kappa.front()) {
                continue;
            }
            int t = cfg.t >= 0 ? cfg.t : p.n / 2;
            try {
                mpo::WitnessMatrix w = mpo::rank_witness(p.n, t, p.d, cfg.caps.witness_cap);
                bundle.witness.push_back({p.n, t, p.d, static_cast<long>(w.subsets.size()), w.rank, w.diagonal,
                                          w.max_off_diagonal, w.min_diagonal, w.diagonal_exponents});
            } catch (const Error &e) {
                if (e.code() != ErrorCode::Capacity) {
                    throw;
                }
                notes.push_back("witness n=" + std::to_string(p.n) + " d=" + std::to_string(p.d) + ": " + e.what());
            }
        }
        points.clear();
    }

    long next_id = 0;
    for (Point &p : points) {
        std::string cap = point_capacity(cfg, p);
        if (!cap.empty()) {
            p.status = "skipped: " + cap;
            notes.push_back("n=" + std::to_string(p.n) + " d=" + std::to_string(p.d) +
                            " kappa=" + format_double(p.kappa) + " skipped: " + cap);
            continue;
        }
        p.first_id = next_id;
        p.count = cfg.instances;
        next_id += cfg.instances;
    }
    if (cfg.mode == Mode::All && cfg.control == Control::Commuting) {
        notes.push_back("rates are not defined for the commuting control and were not computed");
    }

    std::vector<const Point *> owner(static_cast<size_t>(next_id));
    for (const Point &p : points) {
        for (long i = 0; i < p.count; ++i) {
            owner[p.first_id + i] = &p;
        }
    }
    std::vector<InstanceResult> results(static_cast<size_t>(next_id));
    std::atomic<long> cursor{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            long id = cursor.fetch_add(1);
            if (id >= next_id) {
                return;
            }
            try {
                auto start = std::chrono::steady_clock::now();
                results[id] = run_instance(cfg, *owner[id], id);
                if (cfg.timing) {
                    std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - start;
                    results[id].record.wall_ms = dt.count();
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                cursor.store(next_id);
                return;
            }
        }
    };
    const int pool = static_cast<int>(std::min<long>(threads, std::max<long>(next_id, 1)));
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> workers;
        for (int i = 0; i < pool; ++i) {
            workers.emplace_back(worker);
        }
        for (auto &th : workers) {
            th.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    for (InstanceResult &r : results) {
        bundle.records.push_back(r.record);
        if (r.rate) {
            bundle.rates.push_back(*r.rate);
        }
        if (r.fermionant) {
            bundle.fermionant.push_back(*r.fermionant);
        }
        bundle.branches.insert(bundle.branches.end(), r.branches.begin(), r.branches.end());
        bundle.postselection_failures += r.failed ? 1 : 0;
        if (!r.note.empty()) {
            notes.push_back(r.note);
        }
    }

    Json summary;
    summary["mode"] = mode_name(cfg.mode);
    summary["control"] = control_name(cfg.control);
    Json pts = Json::array();
    for (const Point &p : points) {
        pts.push_back(point_summary(p, results));
    }
    summary["points"] = pts;
    if (cfg.mode == Mode::Witness) {
        Json w = Json::array();
        for (const WitnessRow &row : bundle.witness) {
            w.push_back({{"n", row.n},
                         {"t", row.t},
                         {"d", row.d},
                         {"size", row.size},
                         {"rank", row.rank},
                         {"diagonal", row.diagonal},
                         {"max_off_diagonal", row.max_off_diagonal},
                         {"min_diagonal", row.min_diagonal},
                         {"diagonal_exponents", row.diagonal_exponents}});
        }
        summary["witness"] = w;
    }
    summary["postselection_failures"] = bundle.postselection_failures;
    bundle.summary = summary;

    Json outputs = Json::array({"manifest.json", "instances.csv"});
    if (!bundle.rates.empty()) {
        outputs.push_back("rates.csv");
    }
    if (!bundle.branches.empty()) {
        outputs.push_back("branches.csv");
    }
    if (!bundle.fermionant.empty()) {
        outputs.push_back("fermionant.csv");
    }
    if (cfg.mode == Mode::Witness) {
        outputs.push_back("witness.json");
    }

    Json &m = bundle.manifest;
    m["schema_version"] = kSchemaVersion;
    m["tool"] = "ncflo";
    m["version"] = kVersion;
    m["config"] = cfg.to_json();
    m["conventions"] = conventions_block(cfg);
    m["reference"] = reference_block(cfg);
    m["instances_columns"] = kInstancesHeader;
    m["summary"] = summary;
    m["notes"] = notes;
    m["outputs"] = outputs;
    return bundle;
}

std::string instances_csv(const std::vector<RunRecord> &records) {
    std::ostringstream os;
    os << kInstancesHeader << '\n';
    for (const RunRecord &r : records) {
        os << r.instance_id << ',' << r.seed << ',' << r.n << ',' << r.m << ',' << r.d << ',' << r.attempts << ','
           << format_double(r.chi_max) << ',' << format_double(r.nu_nc) << ',' << format_double(r.gamma) << ','
           << format_double(r.haar_ratio) << ',' << format_double(r.ks_pt) << ',' << format_double(r.anticonc_frac)
           << ',' << format_double(r.wall_ms) << '\n';
    }
    return os.str();
}

namespace {

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    f << text;
    f.close();
    require(!f.fail(), ErrorCode::Io, "failed writing '" + path.string() + "'");
}

}  // namespace

void write_bundle(const OutputBundle &bundle, const std::string &dir) {
    require(!dir.empty(), ErrorCode::InvalidConfig, "write_bundle: output directory is empty");
    std::filesystem::path root(dir);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    require(!ec, ErrorCode::Io, "cannot create output directory '" + dir + "': " + ec.message());

    write_text(root / "manifest.json", bundle.manifest.dump(2) + "\n");
    write_text(root / "instances.csv", instances_csv(bundle.records));
    if (!bundle.rates.empty()) {
        std::ostringstream os;
        os << "instance_id,seed,n,m,d,kappa,shots,collision_free,rate,rate_exact,rate_asymptotic\n";
        for (const RateRow &r : bundle.rates) {
            os << r.instance_id << ',' << r.seed << ',' << r.n << ',' << r.m << ',' << r.d << ','
               << format_double(r.kappa) << ',' << r.shots << ',' << r.collision_free << ',' << format_double(r.rate)
               << ',' << format_double(r.rate_exact) << ',' << format_double(r.rate_asymptotic) << '\n';
        }
        write_text(root / "rates.csv", os.str());
    }
    if (!bundle.branches.empty()) {
        std::ostringstream os;
        os << "instance_id,beta_index,amplitude_re,amplitude_im,prob\n";
        for (const BranchRow &r : bundle.branches) {
            os << r.instance_id << ',' << r.beta_index << ',' << format_double(r.amplitude_re) << ','
               << format_double(r.amplitude_im) << ',' << format_double(r.prob) << '\n';
        }
        write_text(root / "branches.csv", os.str());
    }
    if (!bundle.fermionant.empty()) {
        std::ostringstream os;
        os << "instance_id,seed,n,d,closure_re,closure_im,fermionant_form_re,fermionant_form_im,abs_error\n";
        for (const FermionantRow &r : bundle.fermionant) {
            os << r.instance_id << ',' << r.seed << ',' << r.n << ',' << r.d << ',' << format_double(r.closure.real())
               << ',' << format_double(r.closure.imag()) << ',' << format_double(r.fermionant_form.real()) << ','
               << format_double(r.fermionant_form.imag()) << ',' << format_double(r.abs_error) << '\n';
        }
        write_text(root / "fermionant.csv", os.str());
    }
    if (bundle.summary.contains("witness")) {
        write_text(root / "witness.json", bundle.summary["witness"].dump(2) + "\n");
    }
}

}  // namespace ncflo::exp
