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

#include "flomodel/flomodel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "mathcore/error.hpp"

namespace ncflo::flo {

namespace {

int blocks_for(int n, double kappa) {
    require(std::isfinite(kappa) && kappa > 0.0, ErrorCode::InvalidConfig, "DiluteConfig: kappa must be > 0");
    double target = kappa * static_cast<double>(n) * static_cast<double>(n);
    // Guard against kappa*n^2 landing a hair above an integer.
    return static_cast<int>(std::ceil(target - 1e-9));
}

void check_shape(int n, int m) {
    require(n >= 1, ErrorCode::InvalidConfig, "DiluteConfig: n must be >= 1");
    require(m >= n, ErrorCode::InvalidConfig,
            "DiluteConfig: need m >= n, got m = " + std::to_string(m) + ", n = " + std::to_string(n));
}

/// Sequential projection-DPP sampler. `keep_going(mode)` is consulted after
/// every draw; returning false stops early (used by rate counting).
std::vector<int> run_dpp(const ComplexMatrix &columns, RngStream &rng, const std::function<bool(int)> &keep_going) {
    const Eigen::Index rows = columns.rows();
    const Eigen::Index rank = columns.cols();
    ComplexMatrix q = columns;
    Eigen::VectorXd w = q.rowwise().squaredNorm();
    std::vector<int> drawn;
    drawn.reserve(static_cast<size_t>(rank));
    for (Eigen::Index remaining = rank; remaining > 0; --remaining) {
        double total = w.sum();
        double defect = total / static_cast<double>(remaining) - 1.0;
        if (!(std::abs(defect) <= 1e-8)) {
            std::ostringstream msg;
            msg << "sample_projection_dpp: conditional probabilities sum to " << total << " for remaining rank "
                << remaining << " (relative defect " << defect << ")";
            fail(ErrorCode::Numerical, msg.str());
        }
        double u = rng.uniform() * total;
        Eigen::Index pick = rows - 1;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            acc += w(i);
            if (u < acc) {
                pick = i;
                break;
            }
        }
        while (w(pick) <= 0.0 && pick > 0) {
            --pick;
        }
        drawn.push_back(static_cast<int>(pick));
        if (!keep_going(static_cast<int>(pick))) {
            break;
        }
        if (remaining == 1) {
            break;
        }
        math::ComplexVector v = q.row(pick).adjoint();
        double vn = v.norm();
        v /= vn;
        math::ComplexVector y = q * v;
        q.noalias() -= y * v.adjoint();
        for (Eigen::Index i = 0; i < rows; ++i) {
            w(i) = std::max(0.0, w(i) - std::norm(y(i)));
        }
        w(pick) = 0.0;
    }
    std::sort(drawn.begin(), drawn.end());
    return drawn;
}

std::vector<int> random_labels(int n, int d, RngStream &rng) {
    std::vector<int> labels(n);
    for (int &l : labels) {
        l = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    }
    return labels;
}

ComplexMatrix input_columns(const PropagatorBlocks &v, const std::vector<int> &modes) {
    ComplexMatrix cols(v.matrix().rows(), static_cast<Eigen::Index>(modes.size()));
    for (size_t k = 0; k < modes.size(); ++k) {
        cols.col(static_cast<Eigen::Index>(k)) = v.matrix().col(modes[k]);
    }
    return cols;
}

}  // namespace

DiluteConfig DiluteConfig::make(int n, int d, double kappa) {
    require(d >= 2, ErrorCode::InvalidConfig, "DiluteConfig: local dimension d must be >= 2");
    require(n >= 1, ErrorCode::InvalidConfig, "DiluteConfig: n must be >= 1");
    DiluteConfig cfg{n, d, kappa, blocks_for(n, kappa)};
    check_shape(n, cfg.m);
    return cfg;
}

DiluteConfig DiluteConfig::make_scalar(int n, double kappa) {
    require(n >= 1, ErrorCode::InvalidConfig, "DiluteConfig: n must be >= 1");
    DiluteConfig cfg{n, 1, kappa, blocks_for(n, kappa)};
    check_shape(n, cfg.m);
    return cfg;
}

DiluteConfig DiluteConfig::with_blocks(int n, int d, int m) {
    require(d >= 1, ErrorCode::InvalidConfig, "DiluteConfig: local dimension d must be >= 1");
    check_shape(n, m);
    return DiluteConfig{n, d, static_cast<double>(m) / (static_cast<double>(n) * n), m};
}

PropagatorBlocks::PropagatorBlocks(ComplexMatrix unitary, int m, int d) : u_(std::move(unitary)), m_(m), d_(d) {
    require(m >= 1 && d >= 1, ErrorCode::InvalidDimension, "PropagatorBlocks: m and d must be >= 1");
    require(u_.rows() == static_cast<Eigen::Index>(m) * d && u_.cols() == u_.rows(), ErrorCode::DimensionMismatch,
            "PropagatorBlocks: matrix must be (dm) x (dm)");
}

PropagatorBlocks make_instance(const DiluteConfig &cfg, RngStream &rng, int dense_limit) {
    require(cfg.dim() <= dense_limit, ErrorCode::Capacity,
            "make_instance: dm = " + std::to_string(cfg.dim()) + " exceeds the dense-matrix limit " +
                std::to_string(dense_limit));
    return PropagatorBlocks(math::haar_unitary(cfg.dim(), rng), cfg.m, cfg.d);
}

std::vector<int> sample_projection_dpp(const ComplexMatrix &columns, RngStream &rng) {
    require(columns.cols() >= 1 && columns.cols() <= columns.rows(), ErrorCode::InvalidDimension,
            "sample_projection_dpp: need 1 <= rank <= rows");
    return run_dpp(columns, rng, [](int) { return true; });
}

std::vector<int> input_modes(const DiluteConfig &cfg, const std::vector<int> &labels) {
    require(static_cast<int>(labels.size()) == cfg.n, ErrorCode::DimensionMismatch,
            "input_modes: need one internal label per input block");
    std::vector<int> modes(labels.size());
    for (int k = 0; k < cfg.n; ++k) {
        require(labels[k] >= 0 && labels[k] < cfg.d, ErrorCode::InvalidConfig, "input_modes: label out of range");
        modes[k] = (cfg.first_input_block() + k) * cfg.d + labels[k];
    }
    return modes;
}

MonitorRecord coarse_grain(const std::vector<int> &modes, int m, int d, int n) {
    MonitorRecord rec;
    rec.modes = modes;
    std::sort(rec.modes.begin(), rec.modes.end());
    rec.block_flags.assign(static_cast<size_t>(m), 0);
    std::vector<int> per_block(static_cast<size_t>(m), 0);
    for (int mode : rec.modes) {
        per_block[mode / d] += 1;
        rec.block_flags[mode / d] = 1;
    }
    int flagged = 0;
    for (int j = 0; j < m; ++j) {
        flagged += rec.block_flags[j];
    }
    rec.collision_free = flagged == n;
    if (rec.collision_free) {
        for (int j = 0; j < m; ++j) {
            if (rec.block_flags[j]) {
                rec.selected_blocks.push_back(j);
            }
        }
    }
    return rec;
}

MonitorRecord sample_monitor_record(const PropagatorBlocks &v, const DiluteConfig &cfg,
                                    const std::vector<int> &labels, RngStream &rng) {
    require(v.m() == cfg.m && v.d() == cfg.d, ErrorCode::DimensionMismatch,
            "sample_monitor_record: configuration does not match the propagator");
    auto modes = run_dpp(input_columns(v, input_modes(cfg, labels)), rng, [](int) { return true; });
    return coarse_grain(modes, cfg.m, cfg.d, cfg.n);
}

MonitorRecord sample_monitor_record(const PropagatorBlocks &v, const DiluteConfig &cfg, RngStream &rng) {
    auto labels = random_labels(cfg.n, cfg.d, rng);
    return sample_monitor_record(v, cfg, labels, rng);
}

PostSelectedSub extract_sub(const PropagatorBlocks &v, const DiluteConfig &cfg, const std::vector<int> &selected) {
    require(static_cast<int>(selected.size()) == cfg.n, ErrorCode::DimensionMismatch,
            "extract_sub: need exactly n selected blocks");
    PostSelectedSub sub{BlockGrid(cfg.n, cfg.d)};
    for (int t = 0; t < cfg.n; ++t) {
        for (int k = 0; k < cfg.n; ++k) {
            sub.blocks(t, k) = v.block(selected[t], cfg.first_input_block() + k);
        }
    }
    return sub;
}

PostSelection post_select(const PropagatorBlocks &v, const DiluteConfig &cfg, RngStream &rng, int max_attempts) {
    require(max_attempts >= 1, ErrorCode::InvalidConfig, "post_select: max_attempts must be >= 1");
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        MonitorRecord rec = sample_monitor_record(v, cfg, rng);
        if (rec.collision_free) {
            PostSelectedSub sub = extract_sub(v, cfg, rec.selected_blocks);
            return PostSelection{std::move(rec), std::move(sub), attempt};
        }
    }
    fail(ErrorCode::PostSelectionFailure,
         "post_select: no collision-free record in " + std::to_string(max_attempts) + " attempts");
}

double collision_free_rate_exact(int n, int m, int d) {
    require(n >= 1, ErrorCode::InvalidConfig, "collision_free_rate: n must be >= 1");
    require(m >= n, ErrorCode::InvalidConfig, "collision_free_rate: need m >= n");
    require(d >= 1, ErrorCode::InvalidConfig, "collision_free_rate: d must be >= 1");
    double p = 1.0;
    const double dm = static_cast<double>(d) * m;
    for (int i = 0; i < n; ++i) {
        p *= (1.0 - i / static_cast<double>(m)) / (1.0 - i / dm);
    }
    return p;
}

double collision_free_rate_binomial(int n, int m, int d) {
    require(n >= 1, ErrorCode::InvalidConfig, "collision_free_rate: n must be >= 1");
    require(m >= n, ErrorCode::InvalidConfig, "collision_free_rate: need m >= n");
    require(d >= 1, ErrorCode::InvalidConfig, "collision_free_rate: d must be >= 1");
    auto log_choose = [](long double a, long double b) {
        return std::lgamma(a + 1.0L) - std::lgamma(b + 1.0L) - std::lgamma(a - b + 1.0L);
    };
    long double lm = m;
    long double ln = n;
    long double ldm = static_cast<long double>(d) * m;
    long double log_p = log_choose(lm, ln) + ln * std::log(static_cast<long double>(d)) - log_choose(ldm, ln);
    return static_cast<double>(std::exp(log_p));
}

double collision_free_rate_asymptotic(double kappa, int d) {
    require(std::isfinite(kappa) && kappa > 0.0, ErrorCode::InvalidConfig, "collision_free_rate: kappa must be > 0");
    require(d >= 2, ErrorCode::InvalidConfig, "collision_free_rate: d must be >= 2");
    return std::exp(-(1.0 - 1.0 / d) / (2.0 * kappa));
}

int count_collision_free(const PropagatorBlocks &v, const DiluteConfig &cfg, int shots, RngStream &rng) {
    require(shots >= 1, ErrorCode::InvalidConfig, "count_collision_free: shots must be >= 1");
    int hits = 0;
    std::vector<std::uint8_t> occupied(static_cast<size_t>(cfg.m));
    for (int s = 0; s < shots; ++s) {
        auto labels = random_labels(cfg.n, cfg.d, rng);
        std::fill(occupied.begin(), occupied.end(), 0);
        bool clean = true;
        // Stopping at the first collision leaves the collision-free indicator
        // unchanged; the remaining draws cannot undo it.
        run_dpp(input_columns(v, input_modes(cfg, labels)), rng, [&](int mode) {
            int block = mode / cfg.d;
            if (occupied[block]) {
                clean = false;
                return false;
            }
            occupied[block] = 1;
            return true;
        });
        hits += clean ? 1 : 0;
    }
    return hits;
}

ComplexMatrix scalar_post_selected(int n, double kappa, RngStream &rng) {
    DiluteConfig cfg = DiluteConfig::make_scalar(n, kappa);
    ComplexMatrix u = math::haar_unitary(cfg.m, rng);
    ComplexMatrix cols = u.rightCols(n);
    auto rows = run_dpp(cols, rng, [](int) { return true; });
    ComplexMatrix a(n, n);
    for (int t = 0; t < n; ++t) {
        a.row(t) = cols.row(rows[t]);
    }
    return a;
}

}  // namespace ncflo::flo
