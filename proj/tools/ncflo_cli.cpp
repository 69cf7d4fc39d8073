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

// Command-line front end. Everything numerical goes through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ncflo/ncflo.h"

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int parse_int(const std::string &s) {
    size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception &) {
        throw UsageError("not an integer: '" + s + "'");
    }
    if (pos != s.size()) {
        throw UsageError("not an integer: '" + s + "'");
    }
    return v;
}

double parse_double(const std::string &s) {
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception &) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (pos != s.size()) {
        throw UsageError("not a number: '" + s + "'");
    }
    return v;
}

/// "3", "3,5,7", "2..6" or mixtures such as "2..4,8".
std::vector<int> parse_int_list(const std::string &text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto dots = tok.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_int(tok));
            continue;
        }
        int lo = parse_int(tok.substr(0, dots));
        int hi = parse_int(tok.substr(dots + 2));
        if (hi < lo) {
            throw UsageError("empty range '" + tok + "'");
        }
        for (int v = lo; v <= hi; ++v) {
            out.push_back(v);
        }
    }
    if (out.empty()) {
        throw UsageError("empty list");
    }
    return out;
}

std::vector<double> parse_double_list(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        out.push_back(parse_double(tok));
    }
    if (out.empty()) {
        throw UsageError("empty list");
    }
    return out;
}

struct Flags {
    std::string config, n, d, kappa, control, out;
    std::optional<double> eps;
    std::optional<int> instances, shots, threads, boundary_l, boundary_r, t;
    std::optional<std::uint64_t> seed;
    bool operator_boundary = false;
    bool branches = false;
    bool timing = false;
};

void add_run_flags(CLI::App *cmd, Flags &f) {
    cmd->add_option("--config", f.config, "JSON config file (flags override its values)");
    cmd->add_option("--n", f.n, "fermion counts, e.g. 6, 3,4,5 or 2..6");
    cmd->add_option("--d", f.d, "local dimensions, e.g. 2 or 2,3");
    cmd->add_option("--kappa", f.kappa, "dilution ratios, e.g. 0.5 or 0.25,0.5");
    cmd->add_option("--eps", f.eps, "relative truncation for chi (default 1e-3)");
    cmd->add_option("--instances", f.instances, "instances per grid point (default 200)");
    cmd->add_option("--shots", f.shots, "monitoring shots per instance in rates mode (default 1000)");
    cmd->add_option("--seed", f.seed, "master seed (default 0)");
    cmd->add_option("--out", f.out, "output directory for the bundle");
    cmd->add_option("--threads", f.threads, "worker threads (overrides NCFLO_THREADS)");
    cmd->add_option("--control", f.control, "monitored or commuting");
    cmd->add_option("--boundary-l", f.boundary_l, "input boundary label (default 0)");
    cmd->add_option("--boundary-r", f.boundary_r, "output boundary label (default 0)");
    cmd->add_option("--t", f.t, "witness cut (default floor(n/2))");
    cmd->add_flag("--operator-boundary", f.operator_boundary, "keep the wire legs open in the chi diagnostic");
    cmd->add_flag("--branches", f.branches, "also write branches.csv");
    cmd->add_flag("--timing", f.timing, "record wall_ms per instance");
}

Json build_config(const std::string &mode, const Flags &f) {
    Json j = Json::object();
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) {
            throw UsageError("cannot read config file '" + f.config + "'");
        }
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception &e) {
            throw UsageError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (j.contains("schema_version") && j.contains("config")) {
            j = j["config"];
        }
    }
    j["mode"] = mode;
    if (!f.n.empty()) {
        j["n"] = parse_int_list(f.n);
    }
    if (!f.d.empty()) {
        j["d"] = parse_int_list(f.d);
    }
    if (!f.kappa.empty()) {
        j["kappa"] = parse_double_list(f.kappa);
    }
    if (f.eps) {
        j["eps"] = *f.eps;
    }
    if (f.instances) {
        j["instances"] = *f.instances;
    }
    if (f.shots) {
        j["shots"] = *f.shots;
    }
    if (f.seed) {
        j["seed"] = *f.seed;
    }
    if (!f.out.empty()) {
        j["out"] = f.out;
    }
    if (f.threads) {
        j["threads"] = *f.threads;
    }
    if (!f.control.empty()) {
        j["control"] = f.control;
    }
    if (f.boundary_l) {
        j["boundary_l"] = *f.boundary_l;
    }
    if (f.boundary_r) {
        j["boundary_r"] = *f.boundary_r;
    }
    if (f.t) {
        j["t"] = *f.t;
    }
    if (f.operator_boundary) {
        j["operator_boundary"] = true;
    }
    if (f.branches) {
        j["branches"] = true;
    }
    if (f.timing) {
        j["timing"] = true;
    }
    return j;
}

int report_failure(ncflo_status st) {
    std::cerr << "error (" << ncflo_status_name(st) << "): " << ncflo_last_error() << "\n";
    return 1;
}

void print_witness(const Json &summary) {
    for (const auto &w : summary["witness"]) {
        std::cout << "witness n=" << w["n"].get<int>() << " t=" << w["t"].get<int>() << " d=" << w["d"].get<int>()
                  << ": rank " << w["rank"].get<int>() << " of " << w["size"].get<long>() << ", diagonal "
                  << (w["diagonal"].get<bool>() ? "yes" : "no") << " (max off-diagonal "
                  << w["max_off_diagonal"].get<double>() << ", min diagonal " << w["min_diagonal"].get<double>()
                  << ")\n";
    }
}

int run_mode(const std::string &mode, const Flags &f) {
    Json cfg = build_config(mode, f);
    char *summary = nullptr;
    ncflo_status st = ncflo_run_experiment(cfg.dump().c_str(), nullptr, f.threads.value_or(0), &summary);
    if (st != NCFLO_OK) {
        return report_failure(st);
    }
    Json s = Json::parse(summary);
    ncflo_string_free(summary);
    if (mode == "witness") {
        print_witness(s);
        for (const auto &w : s["witness"]) {
            if (!w["diagonal"].get<bool>() || w["rank"].get<long>() != w["size"].get<long>()) {
                return 1;
            }
        }
        return 0;
    }
    std::cout << s.dump(2) << "\n";
    return 0;
}

int run_selftest(std::uint64_t seed) {
    char *report = nullptr;
    ncflo_status st = ncflo_selftest(seed, &report);
    if (report == nullptr) {
        return report_failure(st);
    }
    Json r = Json::parse(report);
    ncflo_string_free(report);
    for (const auto &c : r) {
        std::printf("%s  %-34s worst %.3e  tol %.1e%s%s\n", c["passed"].get<bool>() ? "PASS" : "FAIL",
                    c["name"].get<std::string>().c_str(), c["worst"].get<double>(), c["tolerance"].get<double>(),
                    c["detail"].get<std::string>().empty() ? "" : "  ", c["detail"].get<std::string>().c_str());
    }
    return st == NCFLO_OK ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"ncflo: monitored fermionic linear optics branch diagnostics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ncflo_version()));

    Flags flags;
    const std::vector<std::pair<std::string, std::string>> modes = {
        {"rates", "collision-free rates against the closed forms"},
        {"branch", "amplitude tables and branches.csv"},
        {"chi", "routing-tensor cut ranks"},
        {"stats", "second moment, Porter-Thomas distance, anti-concentration"},
        {"witness", "rank-witness matrix of the used-leg sectors"},
        {"fermionant-check", "cyclic closure against the fermionant form"},
        {"all", "every per-instance diagnostic"},
    };
    std::vector<CLI::App *> commands;
    for (const auto &[name, help] : modes) {
        CLI::App *cmd = app.add_subcommand(name, help);
        add_run_flags(cmd, flags);
        commands.push_back(cmd);
    }
    std::uint64_t selftest_seed = 12345;
    CLI::App *selftest = app.add_subcommand("selftest", "cross-oracle and closed-form checks");
    selftest->add_option("--seed", selftest_seed, "seed for the random checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (selftest->parsed()) {
            return run_selftest(selftest_seed);
        }
        for (size_t i = 0; i < commands.size(); ++i) {
            if (commands[i]->parsed()) {
                return run_mode(modes[i].first, flags);
            }
        }
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
