#include "tenfact/factorizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tenfact/mlsvd.hpp"
#include "tenfact/protocol.hpp"

namespace tenfact {

namespace {

Shape row_shape_of(const Shape& demand_shape) {
    return Shape(std::vector<Index>(demand_shape.dims().begin() + 1, demand_shape.dims().end()));
}

}  // namespace

DenseTensor Factorization::encoding_tensor() const {
    if (server_slices.empty())
        throw ShapeError("encoding_tensor: no servers; use encoding_unfolded for the empty case");
    return stack_first(server_slices);
}

Matrix Factorization::encoding_unfolded() const {
    const Shape rows = row_shape_of(demand_shape);
    Matrix m(num_servers, rows.count());
    for (Index n = 0; n < num_servers; ++n) {
        const auto& slice = server_slices[static_cast<std::size_t>(n)];
        for (Index q = 0; q < slice.size(); ++q) m(n, q) = slice[q];
    }
    return m;
}

DenseTensor Factorization::reconstruct() const {
    if (num_servers == 0) return DenseTensor(demand_shape);
    return mode_n_product(encoding_tensor(), decoding, 1);
}

Factorization factorize(const DenseTensor& demand, const TilePlan& plan, double tol) {
    if (!plan.ownership_applied)
        throw std::logic_error("factorize: plan ownership has not been applied");
    if (demand.shape() != plan.demand_shape)
        throw ShapeError("factorize: demand shape does not match the plan");

    const Shape row_shape = row_shape_of(demand.shape());
    const Index users = demand.shape().dim(1);

    Factorization out;
    out.demand_shape = demand.shape();
    out.tolerance = tol;
    out.tile_ranges.reserve(plan.tiles.size());

    std::vector<Vector> columns;  // decoding columns in server order

    for (const Tile& tile : plan.tiles) {
        const Index first_col = static_cast<Index>(columns.size()) + 1;
        if (tile.rank_budget == 0) {
            out.tile_ranges.push_back({first_col, first_col - 1});
            continue;
        }

        // Crop: owned users x owned rows, zero where another tile owns the cell.
        const Index n_users = static_cast<Index>(tile.owned_users.size());
        const Index n_rows = static_cast<Index>(tile.owned_rows.size());
        DenseTensor crop(Shape{n_users, n_rows});
        for (Index b = 0; b < n_rows; ++b) {
            const auto& row = tile.owned_rows[static_cast<std::size_t>(b)];
            const auto& row_users = tile.owned_row_users[static_cast<std::size_t>(b)];
            const Index row_pos = linear_index(row, row_shape);
            for (Index a = 0; a < n_users; ++a) {
                const Index k = tile.owned_users[static_cast<std::size_t>(a)];
                if (std::binary_search(row_users.begin(), row_users.end(), k)) {
                    crop[a + b * n_users] = demand[(k - 1) + (row_pos - 1) * users];
                }
            }
        }

        const auto piece = mode1_factorize(crop, tile.rank_budget, tol);
        if (!piece) {
            out.tile_ranges.push_back({first_col, first_col - 1});
            continue;
        }
        if (piece->numerical_rank > tile.rank_budget) {
            throw ValidationError("factorize: tile " + std::to_string(tile.id) +
                                  " has numerical rank " + std::to_string(piece->numerical_rank) +
                                  " above its budget " + std::to_string(tile.rank_budget));
        }

        for (Index s = 0; s < piece->rank; ++s) {
            Vector col = Vector::Zero(users);
            for (Index a = 0; a < n_users; ++a) {
                col(tile.owned_users[static_cast<std::size_t>(a)] - 1) = piece->left(a, s);
            }
            columns.push_back(std::move(col));

            DenseTensor slice(row_shape);
            for (Index b = 0; b < n_rows; ++b) {
                const Index row_pos = linear_index(tile.owned_rows[static_cast<std::size_t>(b)], row_shape);
                slice[row_pos - 1] = piece->right.at({s + 1, b + 1});
            }
            out.server_slices.push_back(std::move(slice));
        }
        out.tile_ranges.push_back({first_col, first_col + piece->rank - 1});
    }

    out.num_servers = static_cast<Index>(columns.size());
    out.decoding = Matrix::Zero(users, out.num_servers);
    for (Index n = 0; n < out.num_servers; ++n) out.decoding.col(n) = columns[static_cast<std::size_t>(n)];
    return out;
}

double verify_reconstruction(const Factorization& fact, const DenseTensor& demand) {
    if (demand.shape() != fact.demand_shape)
        throw ShapeError("verify_reconstruction: demand shape does not match the factorization");
    const DenseTensor rebuilt = fact.reconstruct();
    double err2 = 0.0;
    for (Index q = 0; q < demand.size(); ++q) {
        const double d = rebuilt[q] - demand[q];
        err2 += d * d;
    }
    const double ref = frobenius_norm(demand);
    if (ref < 1e-300) return std::sqrt(err2);
    return std::sqrt(err2) / ref;
}

std::vector<ServerAssignment> extract_assignments(const Factorization& fact, const ProblemSpec& spec) {
    const Shape row_shape = row_shape_of(fact.demand_shape);
    std::vector<ServerAssignment> out(static_cast<std::size_t>(fact.num_servers));
    for (Index n = 0; n < fact.num_servers; ++n) {
        ServerAssignment& a = out[static_cast<std::size_t>(n)];
        const auto& slice = fact.server_slices[static_cast<std::size_t>(n)];
        std::set<Index> subf;
        for (Index q = 0; q < slice.size(); ++q) {
            if (slice[q] == 0.0) continue;
            std::vector<Index> idx = multi_index(q + 1, row_shape);
            for (Index l = 1; l <= spec.num_subfunctions; ++l) {
                if (spec.exponent(l, idx[static_cast<std::size_t>(l - 1)]) != 0) subf.insert(l);
            }
            a.monomials.push_back(std::move(idx));
        }
        a.subfunctions.assign(subf.begin(), subf.end());
        for (Index k = 0; k < fact.decoding.rows(); ++k) {
            if (fact.decoding(k, n) != 0.0) a.users.push_back(k + 1);
        }
    }
    return out;
}

ConstraintAudit verify_constraints(const Factorization& fact, const ProblemSpec& spec) {
    ConstraintAudit audit;
    const auto assignments = extract_assignments(fact, spec);
    const Index modes = spec.num_subfunctions;

    audit.costs.window_achieved.assign(static_cast<std::size_t>(modes), 0);
    audit.costs.declared_normalized = normalized_constraints(spec);
    audit.costs.per_server_multiplications.assign(static_cast<std::size_t>(fact.num_servers), 0);

    for (Index n = 1; n <= fact.num_servers; ++n) {
        const ServerAssignment& a = assignments[static_cast<std::size_t>(n - 1)];

        const Index fan_out = static_cast<Index>(a.users.size());
        audit.costs.communication_achieved = std::max(audit.costs.communication_achieved, fan_out);
        if (fan_out > spec.max_users_per_server) {
            audit.violations.push_back({ConstraintKind::UserLimit, n, 0, fan_out,
                                        "server " + std::to_string(n) + " serves " +
                                            std::to_string(fan_out) + " users, limit " +
                                            std::to_string(spec.max_users_per_server)});
        }

        const Index subf = static_cast<Index>(a.subfunctions.size());
        audit.costs.computation_achieved = std::max(audit.costs.computation_achieved, subf);
        if (subf > spec.max_subfunctions_per_server) {
            audit.violations.push_back({ConstraintKind::SubfunctionLimit, n, 0, subf,
                                        "server " + std::to_string(n) + " computes " +
                                            std::to_string(subf) + " subfunctions, limit " +
                                            std::to_string(spec.max_subfunctions_per_server)});
        }

        Index mults = 0;
        for (Index l = 1; l <= modes; ++l) {
            Index lo = 0, hi = 0, max_exp = 0;
            for (const auto& p : a.monomials) {
                const Index i = p[static_cast<std::size_t>(l - 1)];
                if (lo == 0) {
                    lo = hi = i;
                } else {
                    lo = std::min(lo, i);
                    hi = std::max(hi, i);
                }
                max_exp = std::max(max_exp, spec.exponent(l, i));
            }
            if (lo == 0) continue;  // mode untouched by this server

            const Index lambda = spec.window_sizes[static_cast<std::size_t>(l - 1)];
            const Index span = hi - lo + 1;
            auto& achieved = audit.costs.window_achieved[static_cast<std::size_t>(l - 1)];
            achieved = std::max(achieved, span);
            if (span > lambda) {
                audit.violations.push_back({ConstraintKind::WindowRange, n, l, span,
                                            "server " + std::to_string(n) + " spans " +
                                                std::to_string(span) + " indices on mode " +
                                                std::to_string(l) + ", window " + std::to_string(lambda)});
            }
            // Anchored containment: both endpoints must fall in the same
            // window of the fixed partition [1..Lambda], [Lambda+1..2 Lambda], ...
            if ((lo - 1) / lambda != (hi - 1) / lambda) {
                audit.violations.push_back({ConstraintKind::WindowAnchor, n, l, span,
                                            "server " + std::to_string(n) + " crosses anchored windows on mode " +
                                                std::to_string(l) + " (indices " + std::to_string(lo) +
                                                ".." + std::to_string(hi) + ")"});
            }
            mults += power_cost(max_exp, lambda);
        }
        audit.costs.per_server_multiplications[static_cast<std::size_t>(n - 1)] = mults;
        audit.costs.total_multiplications += mults;
    }

    audit.costs.rate = fact.num_servers > 0
                           ? static_cast<double>(spec.num_users) / static_cast<double>(fact.num_servers)
                           : 0.0;
    audit.ok = audit.violations.empty();
    return audit;
}

Matrix linearize(const DenseTensor& demand) { return unfold(demand, 1); }

BaselineCount baseline_server_count(Index num_users, Index max_users_per_server,
                                    Index num_flat_subfunctions, Index max_subfunctions_per_server,
                                    Index granularity) {
    if (num_users < 1 || max_users_per_server < 1 || num_flat_subfunctions < 1 ||
        max_subfunctions_per_server < 1 || granularity < 1) {
        throw std::invalid_argument("baseline_server_count: all parameters must be >= 1");
    }
    const Index numerator = num_users * num_flat_subfunctions *
                            std::min(max_users_per_server, max_subfunctions_per_server);
    const Index denominator = max_users_per_server * max_subfunctions_per_server * granularity;
    BaselineCount out;
    out.value = static_cast<double>(numerator) / static_cast<double>(denominator);
    out.integral = numerator % denominator == 0;
    return out;
}

Matrix decoding_support(const Factorization& fact) {
    Matrix s = Matrix::Zero(fact.decoding.rows(), fact.decoding.cols());
    for (Index j = 0; j < s.cols(); ++j)
        for (Index i = 0; i < s.rows(); ++i)
            if (fact.decoding(i, j) != 0.0) s(i, j) = 1.0;
    return s;
}

DenseTensor encoding_support(const Factorization& fact) {
    const Shape row_shape = row_shape_of(fact.demand_shape);
    std::vector<Index> dims;
    dims.push_back(std::max<Index>(fact.num_servers, 1));
    dims.insert(dims.end(), row_shape.dims().begin(), row_shape.dims().end());
    DenseTensor s((Shape(dims)));
    for (Index n = 0; n < fact.num_servers; ++n) {
        const auto& slice = fact.server_slices[static_cast<std::size_t>(n)];
        for (Index q = 0; q < slice.size(); ++q) {
            if (slice[q] != 0.0) s[n + q * dims[0]] = 1.0;
        }
    }
    return s;
}

}  // namespace tenfact
