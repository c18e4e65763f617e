#include "tenfact/tiling.hpp"

#include <algorithm>
#include <string>

namespace tenfact {

namespace {

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

Index binomial(Index n, Index k) {
    if (k < 0 || k > n) return 0;
    Index out = 1;
    for (Index i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

/// Declared window of 1-based indices for window j on a mode of size p.
IndexRange window_range(Index j, Index lambda, Index p) {
    return {1 + (j - 1) * lambda, std::min(j * lambda, p)};
}

/// The active set that owns a cell whose above-1 modes are `above`: the
/// lexicographically smallest size-`limit` superset, i.e. `above` plus the
/// smallest remaining modes.
std::vector<Index> owning_active_set(const std::vector<Index>& above, Index num_modes, Index limit) {
    std::vector<Index> out = above;
    for (Index l = 1; l <= num_modes && static_cast<Index>(out.size()) < limit; ++l) {
        if (!std::binary_search(above.begin(), above.end(), l)) out.push_back(l);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::array<Index, 4> TilePlan::class_counts() const {
    std::array<Index, 4> counts{0, 0, 0, 0};
    for (const Tile& t : tiles) ++counts[static_cast<std::size_t>(t.tile_class - 1)];
    return counts;
}

std::vector<std::vector<Index>> enumerate_active_sets(Index num_modes, Index limit) {
    if (limit < 1 || limit > num_modes)
        throw std::invalid_argument("enumerate_active_sets: subset size " + std::to_string(limit) +
                                    " outside [1, " + std::to_string(num_modes) + "]");
    std::vector<std::vector<Index>> out;
    std::vector<Index> cur(static_cast<std::size_t>(limit));
    // Iterative lexicographic subset enumeration.
    for (Index i = 0; i < limit; ++i) cur[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        out.push_back(cur);
        Index i = limit - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == num_modes - (limit - 1 - i)) --i;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
        for (Index k = i + 1; k < limit; ++k)
            cur[static_cast<std::size_t>(k)] = cur[static_cast<std::size_t>(k - 1)] + 1;
    }
    return out;
}

DenseTensor rank_one_support(const DenseTensor& col, const DenseTensor& slice) {
    if (col.order() != 1) throw ShapeError("rank_one_support: column must be an order-1 tensor");
    const Index k_count = col.shape().dim(1);
    std::vector<Index> dims;
    dims.push_back(k_count);
    dims.insert(dims.end(), slice.shape().dims().begin(), slice.shape().dims().end());
    DenseTensor out((Shape(dims)));
    for (Index q = 0; q < slice.size(); ++q) {
        if (slice[q] == 0.0) continue;
        for (Index k = 0; k < k_count; ++k) {
            if (col[k] != 0.0) out[k + q * k_count] = 1.0;
        }
    }
    return out;
}

TilePlan design_tiles(const ProblemSpec& spec) {
    const Index users = spec.num_users;
    const Index delta = spec.max_users_per_server;
    const Index modes = spec.num_subfunctions;
    const Index blocks = ceil_div(users, delta);
    const auto active_sets = enumerate_active_sets(modes, spec.max_subfunctions_per_server);

    TilePlan plan;
    plan.demand_shape = spec.demand_shape();

    for (Index i = 1; i <= blocks; ++i) {
        const IndexRange user_block{1 + (i - 1) * delta, std::min(i * delta, users)};
        for (const auto& active : active_sets) {
            // Window indices run over the active modes only; inactive modes
            // stay pinned at 1.
            std::vector<Index> j(active.size(), 1);
            while (true) {
                Tile t;
                t.block = i;
                t.active_modes = active;
                t.users = user_block;
                t.window.assign(static_cast<std::size_t>(modes), 1);
                t.rows.assign(static_cast<std::size_t>(modes), IndexRange{1, 1});
                bool all_windows_full = true;
                for (std::size_t a = 0; a < active.size(); ++a) {
                    const Index l = active[a];
                    const Index lambda = spec.window_sizes[static_cast<std::size_t>(l - 1)];
                    const Index p = spec.mode_sizes[static_cast<std::size_t>(l - 1)];
                    t.window[static_cast<std::size_t>(l - 1)] = j[a];
                    t.rows[static_cast<std::size_t>(l - 1)] = window_range(j[a], lambda, p);
                    if (t.rows[static_cast<std::size_t>(l - 1)].size() != lambda) all_windows_full = false;
                }
                const bool full_block = t.users.size() == delta;
                t.tile_class = full_block ? (all_windows_full ? 1 : 3) : (all_windows_full ? 2 : 4);
                plan.tiles.push_back(std::move(t));

                // Advance the window multi-index (first active mode fastest).
                std::size_t a = 0;
                for (; a < active.size(); ++a) {
                    const Index l = active[a];
                    const Index wmax = ceil_div(spec.mode_sizes[static_cast<std::size_t>(l - 1)],
                                                spec.window_sizes[static_cast<std::size_t>(l - 1)]);
                    if (j[a] < wmax) {
                        ++j[a];
                        break;
                    }
                    j[a] = 1;
                }
                if (a == active.size()) break;
            }
        }
    }

    std::sort(plan.tiles.begin(), plan.tiles.end(), [](const Tile& a, const Tile& b) {
        if (a.block != b.block) return a.block < b.block;
        if (a.window != b.window) return a.window < b.window;
        return a.active_modes < b.active_modes;
    });
    for (std::size_t i = 0; i < plan.tiles.size(); ++i) plan.tiles[i].id = static_cast<Index>(i + 1);
    return plan;
}

std::array<Index, 4> class_cardinalities(const ProblemSpec& spec) {
    const Index full_blocks = spec.num_users / spec.max_users_per_server;
    const bool residual_block = spec.num_users % spec.max_users_per_server != 0;
    const auto active_sets = enumerate_active_sets(spec.num_subfunctions, spec.max_subfunctions_per_server);

    Index full_windows_per_set = 0;   // window combos with every active window full
    Index any_windows_per_set = 0;    // all window combos
    std::array<Index, 4> counts{0, 0, 0, 0};
    for (const auto& active : active_sets) {
        Index full_combos = 1;
        Index all_combos = 1;
        for (Index l : active) {
            const Index p = spec.mode_sizes[static_cast<std::size_t>(l - 1)];
            const Index lambda = spec.window_sizes[static_cast<std::size_t>(l - 1)];
            full_combos *= p / lambda;
            all_combos *= ceil_div(p, lambda);
        }
        full_windows_per_set += full_combos;
        any_windows_per_set += all_combos;
    }
    const Index residual_windows = any_windows_per_set - full_windows_per_set;
    counts[0] = full_blocks * full_windows_per_set;
    counts[1] = residual_block ? full_windows_per_set : 0;
    counts[2] = full_blocks * residual_windows;
    counts[3] = residual_block ? residual_windows : 0;
    return counts;
}

TilePlan apply_ownership(TilePlan plan, const DenseTensor& support) {
    if (support.shape() != plan.demand_shape)
        throw ShapeError("apply_ownership: support shape does not match the plan");
    const Shape& shape = plan.demand_shape;
    const Index modes = shape.order() - 1;
    const Index users = shape.dim(1);

    plan.mask = DenseTensor(shape);
    Shape row_shape(std::vector<Index>(shape.dims().begin() + 1, shape.dims().end()));

    for (Tile& tile : plan.tiles) {
        tile.owned_users.clear();
        tile.owned_rows.clear();
        tile.owned_row_users.clear();
        std::vector<bool> user_hit(static_cast<std::size_t>(users), false);

        // Walk the declared row box in Little-Endian order.
        std::vector<Index> row(static_cast<std::size_t>(modes));
        for (Index m = 0; m < modes; ++m) row[static_cast<std::size_t>(m)] = tile.rows[static_cast<std::size_t>(m)].lo;
        while (true) {
            const Index row_pos = linear_index(row, row_shape);
            std::vector<Index> row_users;
            for (Index k = tile.users.lo; k <= tile.users.hi; ++k) {
                const Index cell = (k - 1) + (row_pos - 1) * users;
                if (support[cell] != 0.0 && plan.mask[cell] == 0.0) {
                    plan.mask[cell] = 1.0;
                    row_users.push_back(k);
                    user_hit[static_cast<std::size_t>(k - 1)] = true;
                }
            }
            if (!row_users.empty()) {
                tile.owned_rows.push_back(row);
                tile.owned_row_users.push_back(std::move(row_users));
            }

            Index m = 0;
            for (; m < modes; ++m) {
                auto& r = row[static_cast<std::size_t>(m)];
                if (r < tile.rows[static_cast<std::size_t>(m)].hi) {
                    ++r;
                    break;
                }
                r = tile.rows[static_cast<std::size_t>(m)].lo;
            }
            if (m == modes) break;
        }

        for (Index k = tile.users.lo; k <= tile.users.hi; ++k) {
            if (user_hit[static_cast<std::size_t>(k - 1)]) tile.owned_users.push_back(k);
        }
        tile.rank_budget = std::min<Index>(static_cast<Index>(tile.owned_users.size()),
                                           static_cast<Index>(tile.owned_rows.size()));
    }

    // Anything left unclaimed cannot be produced by any server pattern.
    std::string orphans;
    Index orphan_count = 0;
    for (Index q = 0; q < support.size(); ++q) {
        if (support[q] != 0.0 && plan.mask[q] == 0.0) {
            ++orphan_count;
            if (orphan_count <= 8) {
                const auto idx = multi_index(q + 1, shape);
                orphans += " (";
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    if (i > 0) orphans += ",";
                    orphans += std::to_string(idx[i]);
                }
                orphans += ")";
            }
        }
    }
    if (orphan_count > 0) {
        throw ValidationError("apply_ownership: " + std::to_string(orphan_count) +
                              " demand entries outside every tile (inadmissible demand):" + orphans);
    }
    plan.ownership_applied = true;
    return plan;
}

Index rank_budget(const Tile& tile) { return tile.rank_budget; }

DenseTensor admissible_support(const ProblemSpec& spec) {
    DenseTensor out(spec.demand_shape());
    for (Index q = 0; q < out.size(); ++q) {
        const auto idx = multi_index(q + 1, out.shape());
        Index active = 0;
        for (Index l = 1; l <= spec.num_subfunctions; ++l) {
            if (spec.exponent(l, idx[static_cast<std::size_t>(l)]) > 0) ++active;
        }
        if (active <= spec.max_subfunctions_per_server) out[q] = 1.0;
    }
    return out;
}

DenseTensor tensor_support(const DenseTensor& t, double threshold) {
    DenseTensor s(t.shape());
    for (Index q = 0; q < t.size(); ++q) s[q] = std::abs(t[q]) > threshold ? 1.0 : 0.0;
    return s;
}

Index bound_constructive(const TilePlan& plan) {
    if (!plan.ownership_applied)
        throw std::logic_error("bound_constructive: ownership has not been applied");
    Index total = 0;
    for (const Tile& t : plan.tiles) total += t.rank_budget;
    return total;
}

Index bound_simplified(Index num_users, Index max_users_per_server, Index num_subfunctions,
                       Index max_subfunctions_per_server, Index mode_size, Index window_size) {
    if (num_users % max_users_per_server != 0)
        throw ValidationError("bound_simplified: Delta must divide K");
    if (mode_size % window_size != 0)
        throw ValidationError("bound_simplified: Lambda must divide P");
    if (max_subfunctions_per_server < 1 || max_subfunctions_per_server > num_subfunctions)
        throw ValidationError("bound_simplified: Gamma must lie in [1, L]");
    Index window_volume = 1;
    Index window_count = 1;
    for (Index g = 0; g < max_subfunctions_per_server; ++g) {
        window_volume *= window_size;
        window_count *= mode_size / window_size;
    }
    return (num_users / max_users_per_server) *
           binomial(num_subfunctions, max_subfunctions_per_server) *
           std::min(max_users_per_server, window_volume) * window_count;
}

Index bound_general(const ProblemSpec& spec) {
    const Index modes = spec.num_subfunctions;
    const Index limit = spec.max_subfunctions_per_server;
    const Index delta = spec.max_users_per_server;
    const Index blocks = ceil_div(spec.num_users, delta);
    const auto active_sets = enumerate_active_sets(modes, limit);

    Index total = 0;
    for (const auto& active : active_sets) {
        // Enumerate window combos for this active set; for each tile count the
        // rows it actually owns under the plan order, then charge
        // min(block size, owned rows) per user block.
        std::vector<Index> j(active.size(), 1);
        while (true) {
            std::vector<Index> low_modes;   // active modes whose window contains index 1
            Index forced = 1;               // rows from windows excluding index 1
            std::vector<Index> forced_modes;
            for (std::size_t a = 0; a < active.size(); ++a) {
                const Index l = active[a];
                const Index lambda = spec.window_sizes[static_cast<std::size_t>(l - 1)];
                const Index p = spec.mode_sizes[static_cast<std::size_t>(l - 1)];
                const IndexRange r = window_range(j[a], lambda, p);
                if (j[a] == 1) {
                    low_modes.push_back(l);
                } else {
                    forced *= r.size();
                    forced_modes.push_back(l);
                }
            }

            // Rows split by which low modes sit above index 1; a subset S is
            // owned here only if this active set is the lexicographically
            // smallest cover of (forced modes + S).
            Index owned = 0;
            const std::size_t n_low = low_modes.size();
            for (std::size_t bits = 0; bits < (std::size_t{1} << n_low); ++bits) {
                std::vector<Index> above = forced_modes;
                Index ways = 1;
                for (std::size_t b = 0; b < n_low; ++b) {
                    const Index l = low_modes[b];
                    if (bits & (std::size_t{1} << b)) {
                        above.push_back(l);
                        ways *= spec.window_sizes[static_cast<std::size_t>(l - 1)] - 1;
                    }
                }
                std::sort(above.begin(), above.end());
                if (owning_active_set(above, modes, limit) == active) owned += forced * ways;
            }

            if (owned > 0) {
                for (Index i = 1; i <= blocks; ++i) {
                    const Index block_size = std::min(i * delta, spec.num_users) - (i - 1) * delta;
                    total += std::min(block_size, owned);
                }
            }

            std::size_t a = 0;
            for (; a < active.size(); ++a) {
                const Index l = active[a];
                const Index wmax = ceil_div(spec.mode_sizes[static_cast<std::size_t>(l - 1)],
                                            spec.window_sizes[static_cast<std::size_t>(l - 1)]);
                if (j[a] < wmax) {
                    ++j[a];
                    break;
                }
                j[a] = 1;
            }
            if (a == active.size()) break;
        }
    }
    return total;
}

bool lemma1_check(const Matrix& d_support, const DenseTensor& e_support,
                  const DenseTensor& product_support) {
    const Index servers = d_support.cols();
    if (e_support.order() < 1 || e_support.shape().dim(1) != servers)
        throw ShapeError("lemma1_check: server counts of the factor supports differ");
    const Index users = d_support.rows();
    const Index row_count = e_support.size() / std::max<Index>(servers, 1);
    std::vector<Index> prod_dims;
    prod_dims.push_back(users);
    for (Index m = 2; m <= e_support.order(); ++m) prod_dims.push_back(e_support.shape().dim(m));
    if (product_support.shape() != Shape(prod_dims))
        throw ShapeError("lemma1_check: product support has the wrong shape");

    DenseTensor covered((Shape(prod_dims)));
    for (Index n = 0; n < servers; ++n) {
        for (Index r = 0; r < row_count; ++r) {
            if (e_support[n + r * servers] == 0.0) continue;
            for (Index k = 0; k < users; ++k) {
                if (d_support(k, n) != 0.0) covered[k + r * users] = 1.0;
            }
        }
    }
    for (Index q = 0; q < product_support.size(); ++q) {
        if (product_support[q] != 0.0 && covered[q] == 0.0) return false;
    }
    return true;
}

}  // namespace tenfact
