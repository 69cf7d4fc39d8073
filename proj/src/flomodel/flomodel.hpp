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

#ifndef NCFLO_FLOMODEL_FLOMODEL_HPP
#define NCFLO_FLOMODEL_FLOMODEL_HPP

#include <cstdint>
#include <vector>

#include "mathcore/block_grid.hpp"
#include "mathcore/linalg.hpp"
#include "mathcore/rng.hpp"

namespace ncflo::flo {

using math::BlockGrid;
using math::ComplexMatrix;
using math::RngStream;

inline constexpr int kDefaultDenseLimit = 512;
inline constexpr int kDefaultMaxAttempts = 200;

/// n fermions on m = ceil(kappa n^2) blocks of d orbitals; the last n blocks
/// are occupied on input. Block and mode indices are 0-based throughout; mode
/// (j, alpha) has flat index j*d + alpha.
struct DiluteConfig {
    int n = 0;
    int d = 0;
    double kappa = 0.5;
    int m = 0;

    /// Physical configuration (d >= 2).
    static DiluteConfig make(int n, int d, double kappa = 0.5);
    /// Scalar (d = 1) pipeline, used by the commuting control.
    static DiluteConfig make_scalar(int n, double kappa = 0.5);
    /// Explicit block count (m >= n), for closed-form checks on arbitrary m.
    static DiluteConfig with_blocks(int n, int d, int m);

    int dim() const {
        return d * m;
    }
    int first_input_block() const {
        return m - n;
    }
};

/// A dm x dm single-particle propagator viewed as an m x m grid of d x d blocks.
class PropagatorBlocks {
   public:
    PropagatorBlocks(ComplexMatrix unitary, int m, int d);

    int m() const {
        return m_;
    }
    int d() const {
        return d_;
    }
    const ComplexMatrix &matrix() const {
        return u_;
    }
    /// V_{j,k}: rows j*d..(j+1)*d, cols k*d..(k+1)*d.
    ComplexMatrix block(int j, int k) const {
        return u_.block(static_cast<Eigen::Index>(j) * d_, static_cast<Eigen::Index>(k) * d_, d_, d_);
    }

   private:
    ComplexMatrix u_;
    int m_;
    int d_;
};

struct MonitorRecord {
    std::vector<int> modes;  ///< occupied modes J, ascending
    std::vector<std::uint8_t> block_flags;  ///< c_j
    bool collision_free = false;
    std::vector<int> selected_blocks;  ///< l_1 < ... < l_n when collision-free
};

/// S_{t,k} = V_{l_t, m-n+k}.
struct PostSelectedSub {
    BlockGrid blocks;
    int n() const {
        return blocks.n();
    }
    int d() const {
        return blocks.d();
    }
};

struct PostSelection {
    MonitorRecord record;
    PostSelectedSub sub;
    int attempts = 0;
};

PropagatorBlocks make_instance(const DiluteConfig &cfg, RngStream &rng, int dense_limit = kDefaultDenseLimit);

/// Exact sample of the projection DPP whose kernel is the span of the given
/// orthonormal columns: returns mode set J (ascending) with probability
/// |det(columns_{J,:})|^2. Sequential algorithm: draw a row with probability
/// (row norm^2)/(remaining rank), project the drawn direction out.
std::vector<int> sample_projection_dpp(const ComplexMatrix &columns, RngStream &rng);

/// Input modes for one shot: block m-n+k carries internal label labels[k].
std::vector<int> input_modes(const DiluteConfig &cfg, const std::vector<int> &labels);

/// Monitoring record for the given input labels.
MonitorRecord sample_monitor_record(const PropagatorBlocks &v, const DiluteConfig &cfg,
                                    const std::vector<int> &labels, RngStream &rng);

/// Monitoring record for Bell-initialized inputs: the reduced input state of
/// each occupied block is maximally mixed, so every shot draws its internal
/// labels uniformly before sampling the fine-grained modes.
MonitorRecord sample_monitor_record(const PropagatorBlocks &v, const DiluteConfig &cfg, RngStream &rng);

MonitorRecord coarse_grain(const std::vector<int> &modes, int m, int d, int n);

PostSelectedSub extract_sub(const PropagatorBlocks &v, const DiluteConfig &cfg, const std::vector<int> &selected);

/// Repeat sample_monitor_record until collision-free. Throws
/// PostSelectionFailure after max_attempts.
PostSelection post_select(const PropagatorBlocks &v, const DiluteConfig &cfg, RngStream &rng,
                          int max_attempts = kDefaultMaxAttempts);

/// Product form prod_{i<n} (1 - i/m)/(1 - i/(dm)).
double collision_free_rate_exact(int n, int m, int d);
/// Binomial form C(m,n) d^n / C(dm,n), evaluated through log-gamma.
double collision_free_rate_binomial(int n, int m, int d);
/// exp[-(1 - 1/d)/(2 kappa)].
double collision_free_rate_asymptotic(double kappa, int d);

/// Number of collision-free records among `shots` fresh monitoring shots.
int count_collision_free(const PropagatorBlocks &v, const DiluteConfig &cfg, int shots, RngStream &rng);

/// Scalar (d = 1) post-selected n x n sub-matrix of a Haar U(m), the input of
/// the commuting control. Every d = 1 record is collision-free.
ComplexMatrix scalar_post_selected(int n, double kappa, RngStream &rng);

}  // namespace ncflo::flo

#endif
