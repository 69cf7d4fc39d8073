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

#include "mpodiag/mpodiag.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mathcore/error.hpp"

namespace ncflo::mpo {

using kernel::ipow;

Complex RoutingTensor::sum() const {
    require(!operator_boundary, ErrorCode::InvalidConfig, "RoutingTensor::sum: operator-boundary tensor, use operator_sum");
    Complex total(0.0, 0.0);
    for (const Complex &v : values) {
        total += v;
    }
    return total;
}

ComplexMatrix RoutingTensor::operator_sum() const {
    require(operator_boundary, ErrorCode::InvalidConfig, "RoutingTensor::operator_sum: scalar tensor, use sum");
    ComplexMatrix total = ComplexMatrix::Zero(d, d);
    const int w = width();
    for (size_t i = 0; i < support.size(); ++i) {
        for (int j = 0; j < w; ++j) {
            total(j / d, j % d) += values[i * w + j];
        }
    }
    return total;
}

RoutingTensor routing_tensor(const flo::PostSelectedSub &s, const branch::BranchOutcome &beta, int boundary_l,
                             int boundary_r, bool operator_boundary) {
    const int n = s.n();
    const int d = s.d();
    require(n <= kRoutingMaxN, ErrorCode::Capacity,
            "routing_tensor: n = " + std::to_string(n) + " exceeds the cap " + std::to_string(kRoutingMaxN));
    require(boundary_l >= 0 && boundary_l < d && boundary_r >= 0 && boundary_r < d, ErrorCode::InvalidConfig,
            "routing_tensor: boundary labels must lie in [0, d)");
    branch::DressedBlocks dressed = branch::dress(s, beta);
    RoutingTensor f{n, d, operator_boundary, boundary_l, boundary_r, {}, {}};
    const int w = f.width();
    f.support.reserve(math::factorial(n));
    f.values.reserve(math::factorial(n) * w);
    for (const Permutation &sigma : math::permutations(n, kRoutingMaxN)) {
        ComplexMatrix term = branch::pathcycle_term(dressed.blocks, kernel::path_cycle_decompose(sigma));
        const double sign = sigma.sign();
        f.support.push_back(sigma);
        if (operator_boundary) {
            for (int j = 0; j < w; ++j) {
                f.values.push_back(sign * term(j / d, j % d));
            }
        } else {
            f.values.push_back(sign * term(boundary_r, boundary_l));
        }
    }
    return f;
}

namespace {

long prefix_key(const Permutation &sigma, int from, int to, int n) {
    long key = 0;
    for (int s = from; s < to; ++s) {
        key = key * n + sigma(s);
    }
    return key;
}

void check_cut(const RoutingTensor &f, int t) {
    require(t >= 1 && t < f.n, ErrorCode::InvalidConfig, "cut index must lie in [1, n-1]");
}

}  // namespace

ComplexMatrix dense_matricization(const RoutingTensor &f, int t) {
    check_cut(f, t);
    const int n = f.n;
    const int w = f.width();
    const long rows = ipow(n, t) * w;
    const long cols = ipow(n, n - t);
    require(rows * cols <= (1L << 26), ErrorCode::Capacity, "dense_matricization: matrix too large");
    ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
    for (size_t i = 0; i < f.support.size(); ++i) {
        long left = prefix_key(f.support[i], 0, t, n);
        long right = prefix_key(f.support[i], t, n, n);
        for (int j = 0; j < w; ++j) {
            m(left * w + j, right) = f.values[i * w + j];
        }
    }
    return m;
}

namespace {

ChiProfile finish_profile(std::vector<int> chi, double eps, math::RankMode mode) {
    ChiProfile p;
    p.eps = eps;
    p.mode = mode;
    for (int &c : chi) {
        c = std::max(c, 1);
    }
    p.chi = std::move(chi);
    p.chi_max = p.chi.empty() ? 1 : *std::max_element(p.chi.begin(), p.chi.end());
    return p;
}

}  // namespace

ChiProfile chi_profile(const RoutingTensor &f, double eps, math::RankMode mode) {
    require(eps >= 0.0 && std::isfinite(eps), ErrorCode::InvalidTolerance, "chi_profile: eps must be finite and >= 0");
    const int n = f.n;
    const int w = f.width();
    std::vector<int> chi;
    for (int t = 1; t < n; ++t) {
        // Group permutations by the set of labels used in the first t steps.
        std::map<unsigned, std::vector<size_t>> sectors;
        for (size_t i = 0; i < f.support.size(); ++i) {
            unsigned mask = 0;
            for (int s = 0; s < t; ++s) {
                mask |= 1u << f.support[i](s);
            }
            sectors[mask].push_back(i);
        }
        std::vector<double> sv;
        for (const auto &[mask, members] : sectors) {
            std::map<long, int> rows;
            std::map<long, int> cols;
            for (size_t i : members) {
                rows.emplace(prefix_key(f.support[i], 0, t, n), 0);
                cols.emplace(prefix_key(f.support[i], t, n, n), 0);
            }
            int r = 0;
            for (auto &kv : rows) {
                kv.second = r++;
            }
            int c = 0;
            for (auto &kv : cols) {
                kv.second = c++;
            }
            ComplexMatrix block = ComplexMatrix::Zero(static_cast<long>(rows.size()) * w, cols.size());
            for (size_t i : members) {
                int row = rows[prefix_key(f.support[i], 0, t, n)];
                int col = cols[prefix_key(f.support[i], t, n, n)];
                for (int j = 0; j < w; ++j) {
                    block(static_cast<long>(row) * w + j, col) = f.values[i * w + j];
                }
            }
            auto part = math::singular_values(block);
            sv.insert(sv.end(), part.begin(), part.end());
        }
        double smax = sv.empty() ? 0.0 : *std::max_element(sv.begin(), sv.end());
        long max_dim = std::max(ipow(n, t) * w, ipow(n, n - t));
        chi.push_back(math::eps_rank_from_singular_values(sv, eps, mode, smax, max_dim));
    }
    return finish_profile(std::move(chi), eps, mode);
}

ChiProfile chi_profile_dense(const RoutingTensor &f, double eps, math::RankMode mode) {
    std::vector<int> chi;
    for (int t = 1; t < f.n; ++t) {
        chi.push_back(math::eps_rank(dense_matricization(f, t), eps, mode));
    }
    return finish_profile(std::move(chi), eps, mode);
}

namespace {

std::vector<std::vector<int>> subsets_of_size(int n, int t) {
    std::vector<std::vector<int>> out;
    std::vector<int> current;
    auto rec = [&](auto &&self, int start) -> void {
        if (static_cast<int>(current.size()) == t) {
            out.push_back(current);
            return;
        }
        for (int i = start; i < n; ++i) {
            current.push_back(i);
            self(self, i + 1);
            current.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace

WitnessMatrix rank_witness(int n, int t, int d, long cap) {
    require(n >= 1 && d >= 2, ErrorCode::InvalidDimension, "rank_witness: need n >= 1 and d >= 2");
    require(t >= 0 && t <= n, ErrorCode::InvalidConfig, "rank_witness: t must lie in [0, n]");
    const long size = static_cast<long>(math::binomial(n, t));
    require(size <= cap, ErrorCode::Capacity,
            "rank_witness: C(n,t) = " + std::to_string(size) + " exceeds the cap " + std::to_string(cap));
    WitnessMatrix w;
    w.n = n;
    w.t = t;
    w.d = d;
    w.subsets = subsets_of_size(n, t);
    w.matrix = ComplexMatrix::Zero(size, size);
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    for (long i = 0; i < size; ++i) {
        for (long j = 0; j < size; ++j) {
            const auto &prefix = w.subsets[i];
            std::vector<int> suffix;
            for (int k = 0; k < n; ++k) {
                if (std::find(w.subsets[j].begin(), w.subsets[j].end(), k) == w.subsets[j].end()) {
                    suffix.push_back(k);
                }
            }
            math::BlockGrid grid(n, d);
            for (int s = 0; s < t; ++s) {
                grid(s, prefix[s]) = id;
            }
            for (int s = t; s < n; ++s) {
                grid(s, suffix[s - t]) = id;
            }
            w.matrix(i, j) = branch::evaluate_pathcycle(grid).trace();
        }
    }
    w.min_diagonal = size > 0 ? std::abs(w.matrix(0, 0)) : 0.0;
    for (long i = 0; i < size; ++i) {
        for (long j = 0; j < size; ++j) {
            double v = std::abs(w.matrix(i, j));
            if (i == j) {
                w.min_diagonal = std::min(w.min_diagonal, v);
            } else {
                w.max_off_diagonal = std::max(w.max_off_diagonal, v);
            }
        }
    }
    w.diagonal = w.max_off_diagonal < 1e-12 && w.min_diagonal > 1e-12;
    w.rank = math::eps_rank(w.matrix, 0.0);
    const double scale = std::pow(static_cast<double>(d), n + 1);
    for (long i = 0; i < size; ++i) {
        double x = std::abs(w.matrix(i, i)) * scale;
        int c = x > 0.0 ? static_cast<int>(std::lround(std::log(x) / std::log(static_cast<double>(d)))) : -1;
        bool exact = c >= 0 && std::abs(x - std::pow(static_cast<double>(d), c)) <= 1e-9 * x;
        w.diagonal_exponents.push_back(exact ? c : -1);
    }
    return w;
}

BoundReport theorem_bound_check(const ChiProfile &profile, int d) {
    const int n = static_cast<int>(profile.chi.size()) + 1;
    BoundReport r;
    for (int t = 1; t < n; ++t) {
        long c = static_cast<long>(math::binomial(n, t));
        long bound = c * d * d;
        int chi = profile.chi[t - 1];
        r.bound.push_back(bound);
        r.ratio.push_back(static_cast<double>(chi) / static_cast<double>(c));
        r.within.push_back(chi <= bound);
        r.all_within = r.all_within && chi <= bound;
    }
    return r;
}

}  // namespace ncflo::mpo
