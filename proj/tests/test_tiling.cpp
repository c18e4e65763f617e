#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tenfact/tiling.hpp"

using namespace tenfact;

namespace {

/// Independent ownership oracle: a support cell belongs to the first tile (in
/// plan order) whose declared block contains it, straight from the tile
/// geometry. Returns cell -> tile id.
std::map<Index, Index> ownership_oracle(const TilePlan& plan, const DenseTensor& support) {
    std::map<Index, Index> owner;
    const Shape& shape = support.shape();
    for (Index pos = 1; pos <= support.size(); ++pos) {
        if (support[pos - 1] == 0.0) continue;
        const auto idx = multi_index(pos, shape);
        for (const Tile& tile : plan.tiles) {
            bool inside = tile.users.contains(idx[0]);
            for (Index m = 1; inside && m < shape.order(); ++m) {
                inside = tile.rows[static_cast<std::size_t>(m - 1)].contains(idx[static_cast<std::size_t>(m)]);
            }
            if (inside) {
                owner[pos] = tile.id;
                break;
            }
        }
    }
    return owner;
}

/// Owned cells of a tile as linear positions, from the library's output.
std::set<Index> owned_cells(const Tile& tile, const Shape& shape) {
    std::set<Index> cells;
    const Shape row_shape(std::vector<Index>(shape.dims().begin() + 1, shape.dims().end()));
    for (std::size_t b = 0; b < tile.owned_rows.size(); ++b) {
        const Index row_pos = linear_index(tile.owned_rows[b], row_shape);
        for (Index k : tile.owned_row_users[b]) {
            cells.insert((k - 1) + (row_pos - 1) * shape.dim(1) + 1);
        }
    }
    return cells;
}

ProblemSpec uniform_spec(Index users, Index delta, Index modes, Index limit, Index p, Index lambda) {
    ProblemSpec spec;
    spec.num_users = users;
    spec.num_subfunctions = modes;
    spec.mode_sizes.assign(static_cast<std::size_t>(modes), p);
    spec.window_sizes.assign(static_cast<std::size_t>(modes), lambda);
    spec.max_subfunctions_per_server = limit;
    spec.max_users_per_server = delta;
    spec.validate();
    return spec;
}

}  // namespace

TEST_CASE("active sets enumerate in lexicographic order") {
    CHECK(enumerate_active_sets(2, 2) == std::vector<std::vector<Index>>{{1, 2}});
    CHECK(enumerate_active_sets(3, 1) == std::vector<std::vector<Index>>{{1}, {2}, {3}});
    const auto sets = enumerate_active_sets(4, 3);
    CHECK(sets == std::vector<std::vector<Index>>{{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}});
    CHECK_THROWS_AS(enumerate_active_sets(2, 3), std::invalid_argument);
}

TEST_CASE("rank-one support is the outer placement of column against slice") {
    SUBCASE("zero column gives zero support") {
        const DenseTensor col(Shape{3});
        DenseTensor slice(Shape{2, 2});
        for (Index q = 0; q < 4; ++q) slice[q] = 1.0;
        CHECK(frobenius_norm(rank_one_support(col, slice)) == 0.0);
    }
    SUBCASE("unit column selects one user slab") {
        DenseTensor col(Shape{2});
        col.at({1}) = 1.0;
        DenseTensor slice(Shape{2, 2});
        for (Index q = 0; q < 4; ++q) slice[q] = 1.0;
        const DenseTensor s = rank_one_support(col, slice);
        for (Index a = 1; a <= 2; ++a)
            for (Index b = 1; b <= 2; ++b) {
                CHECK(s.at({1, a, b}) == 1.0);
                CHECK(s.at({2, a, b}) == 0.0);
            }
    }
    SUBCASE("random pair matches the brute-force outer product") {
        std::mt19937 rng(307);
        std::bernoulli_distribution coin(0.5);
        DenseTensor col(Shape{4});
        for (Index q = 0; q < 4; ++q) col[q] = coin(rng) ? 1.0 : 0.0;
        DenseTensor slice(Shape{3, 2});
        for (Index q = 0; q < 6; ++q) slice[q] = coin(rng) ? 1.0 : 0.0;
        const DenseTensor s = rank_one_support(col, slice);
        for (Index k = 1; k <= 4; ++k)
            for (Index a = 1; a <= 3; ++a)
                for (Index b = 1; b <= 2; ++b)
                    CHECK(s.at({k, a, b}) == col.at({k}) * slice.at({a, b}));
    }
}

TEST_CASE("the four-user system designs eight full tiles of shape 2x2x2") {
    const TilePlan plan = design_tiles(fixtures::four_user_spec());
    REQUIRE(plan.tiles.size() == 8);
    for (const Tile& t : plan.tiles) {
        CHECK(t.tile_class == 1);
        CHECK(t.users.size() == 2);
        CHECK(t.active_modes == std::vector<Index>{1, 2});
        CHECK(t.rows[0].size() == 2);
        CHECK(t.rows[1].size() == 2);
    }
    CHECK(plan.class_counts() == std::array<Index, 4>{8, 0, 0, 0});
}

TEST_CASE("a fifth user adds four residual-block tiles") {
    const TilePlan plan = design_tiles(fixtures::five_user_spec());
    REQUIRE(plan.tiles.size() == 12);
    Index full = 0, residual = 0;
    for (const Tile& t : plan.tiles) {
        if (t.tile_class == 1) {
            ++full;
            CHECK((t.users == IndexRange{1, 2} || t.users == IndexRange{3, 4}));
        } else {
            ++residual;
            CHECK(t.tile_class == 2);
            CHECK(t.users == IndexRange{5, 5});
        }
    }
    CHECK(full == 8);
    CHECK(residual == 4);
}

TEST_CASE("maxed-out limits give a single all-covering tile") {
    const TilePlan plan = design_tiles(uniform_spec(4, 4, 2, 2, 4, 4));
    REQUIRE(plan.tiles.size() == 1);
    CHECK(plan.tiles[0].users == IndexRange{1, 4});
    CHECK(plan.tiles[0].rows[0] == IndexRange{1, 4});
    CHECK(plan.tiles[0].rows[1] == IndexRange{1, 4});
}

TEST_CASE("tiles respect the block and window geometry") {
    std::mt19937 rng(311);
    for (int round = 0; round < 25; ++round) {
        const ProblemSpec spec = fixtures::random_spec(rng, 9, 4, 7, 0.0);
        const TilePlan plan = design_tiles(spec);
        const Index delta = spec.max_users_per_server;
        for (const Tile& t : plan.tiles) {
            CHECK(t.users.lo == 1 + (t.block - 1) * delta);
            CHECK(t.users.hi == std::min(t.block * delta, spec.num_users));
            CHECK(static_cast<Index>(t.active_modes.size()) == spec.max_subfunctions_per_server);
            for (Index l = 1; l <= spec.num_subfunctions; ++l) {
                const IndexRange r = t.rows[static_cast<std::size_t>(l - 1)];
                const bool active = std::binary_search(t.active_modes.begin(), t.active_modes.end(), l);
                if (!active) {
                    CHECK(r == IndexRange{1, 1});
                    CHECK(t.window[static_cast<std::size_t>(l - 1)] == 1);
                } else {
                    const Index j = t.window[static_cast<std::size_t>(l - 1)];
                    const Index lambda = spec.window_sizes[static_cast<std::size_t>(l - 1)];
                    CHECK(r.lo == 1 + (j - 1) * lambda);
                    CHECK(r.hi == std::min(j * lambda, spec.mode_sizes[static_cast<std::size_t>(l - 1)]));
                }
            }
        }
        // Plan order is strictly increasing on (block, window, active set).
        for (std::size_t i = 1; i < plan.tiles.size(); ++i) {
            const Tile& a = plan.tiles[i - 1];
            const Tile& b = plan.tiles[i];
            const auto key = [](const Tile& t) {
                return std::make_tuple(t.block, t.window, t.active_modes);
            };
            CHECK(key(a) < key(b));
        }
    }
}

TEST_CASE("declared tiles cover exactly the admissible cells") {
    std::mt19937 rng(313);
    for (int round = 0; round < 15; ++round) {
        const ProblemSpec spec = fixtures::random_spec(rng, 6, 4, 6, 0.0);
        const TilePlan plan = design_tiles(spec);
        const Shape shape = spec.demand_shape();
        for (Index pos = 1; pos <= shape.count(); ++pos) {
            const auto idx = multi_index(pos, shape);
            Index above_one = 0;
            for (Index l = 1; l <= spec.num_subfunctions; ++l)
                if (idx[static_cast<std::size_t>(l)] > 1) ++above_one;
            bool covered = false;
            for (const Tile& t : plan.tiles) {
                bool inside = t.users.contains(idx[0]);
                for (Index m = 1; inside && m < shape.order(); ++m)
                    inside = t.rows[static_cast<std::size_t>(m - 1)].contains(idx[static_cast<std::size_t>(m)]);
                if (inside) {
                    covered = true;
                    break;
                }
            }
            CHECK(covered == (above_one <= spec.max_subfunctions_per_server));
        }
    }
}

TEST_CASE("class cardinalities match the designed tiles on a sweep") {
    std::mt19937 rng(317);
    for (int round = 0; round < 60; ++round) {
        const ProblemSpec spec = fixtures::random_spec(rng, 12, 4, 9, 0.0);
        CHECK(class_cardinalities(spec) == design_tiles(spec).class_counts());
    }
    SUBCASE("named cases") {
        CHECK(class_cardinalities(fixtures::four_user_spec()) == std::array<Index, 4>{8, 0, 0, 0});
        CHECK(class_cardinalities(fixtures::five_user_spec()) == std::array<Index, 4>{8, 4, 0, 0});
        CHECK(class_cardinalities(uniform_spec(4, 4, 2, 1, 4, 2)) == std::array<Index, 4>{4, 0, 0, 0});
    }
}

TEST_CASE("full-support ownership gives every four-user tile its whole block") {
    ProblemSpec spec = fixtures::four_user_spec();
    const TilePlan plan = apply_ownership(design_tiles(spec), admissible_support(spec));
    for (const Tile& t : plan.tiles) {
        CHECK(t.owned_users.size() == 2);
        CHECK(t.owned_rows.size() == 4);
        CHECK(t.rank_budget == 2);
        CHECK(rank_budget(t) == 2);
    }
    CHECK(bound_constructive(plan) == 16);
}

TEST_CASE("zero support skips every tile") {
    ProblemSpec spec = fixtures::four_user_spec();
    const TilePlan plan = apply_ownership(design_tiles(spec), DenseTensor(spec.demand_shape()));
    for (const Tile& t : plan.tiles) CHECK(t.rank_budget == 0);
    CHECK(bound_constructive(plan) == 0);
}

TEST_CASE("ownership rejects demands outside every tile") {
    ProblemSpec spec = fixtures::four_user_spec();
    spec.max_subfunctions_per_server = 1;
    spec.validate();
    DenseTensor support(spec.demand_shape());
    support.at({1, 2, 2}) = 1.0;  // two active modes, limit is one
    CHECK_THROWS_AS(apply_ownership(design_tiles(spec), support), ValidationError);
}

TEST_CASE("ownership matches the first-containing-tile oracle") {
    std::mt19937 rng(331);
    for (int round = 0; round < 25; ++round) {
        ProblemSpec spec = fixtures::random_spec(rng, 6, 3, 6, 0.6);
        const DenseTensor demand = build_demand_tensor(spec);
        const DenseTensor support = tensor_support(demand);
        const TilePlan plan = apply_ownership(design_tiles(spec), support);

        const auto oracle_owner = ownership_oracle(plan, support);
        std::map<Index, Index> lib_owner;
        for (const Tile& t : plan.tiles) {
            for (Index cell : owned_cells(t, plan.demand_shape)) {
                CHECK(lib_owner.emplace(cell, t.id).second);  // disjointness
            }
        }
        CHECK(lib_owner == oracle_owner);
    }
}

TEST_CASE("single-mode demands leave nothing for later active sets on the pinned row") {
    ProblemSpec spec = uniform_spec(2, 2, 2, 1, 4, 2);
    // Only mode-1 monomials are demanded, every user.
    for (Index k = 1; k <= 2; ++k)
        for (Index p = 1; p <= 4; ++p) spec.coefficients.push_back({k, {p, 1}, 1.0});
    spec.validate();
    const DenseTensor demand = build_demand_tensor(spec);
    const TilePlan plan = apply_ownership(design_tiles(spec), tensor_support(demand));

    for (const Tile& t : plan.tiles) {
        const bool mode1 = t.active_modes == std::vector<Index>{1};
        if (mode1) {
            CHECK(t.owned_rows.size() == 2);
            CHECK(t.rank_budget == 2);
        } else {
            // The only demanded cell in these tiles sits on the shared pinned
            // row and was claimed by the mode-1 tile.
            CHECK(t.rank_budget == 0);
        }
    }
}

TEST_CASE("owned supports are disjoint and union to the demand support") {
    std::mt19937 rng(337);
    for (int round = 0; round < 20; ++round) {
        ProblemSpec spec = fixtures::random_spec(rng, 7, 3, 5, 0.5);
        const DenseTensor support = tensor_support(build_demand_tensor(spec));
        const TilePlan plan = apply_ownership(design_tiles(spec), support);
        std::set<Index> all;
        for (const Tile& t : plan.tiles) {
            for (Index cell : owned_cells(t, plan.demand_shape)) CHECK(all.insert(cell).second);
        }
        std::set<Index> expected;
        for (Index q = 0; q < support.size(); ++q)
            if (support[q] != 0.0) expected.insert(q + 1);
        CHECK(all == expected);
        // The mask is the union of the owned supports.
        for (Index q = 0; q < support.size(); ++q)
            CHECK(plan.mask[q] == (expected.contains(q + 1) ? 1.0 : 0.0));
    }
}

TEST_CASE("rank budgets follow min(owned users, owned rows)") {
    const ProblemSpec spec = fixtures::five_user_spec();
    const TilePlan plan = apply_ownership(design_tiles(spec), admissible_support(spec));
    for (const Tile& t : plan.tiles) {
        if (t.tile_class == 1) CHECK(t.rank_budget == 2);  // min(2, 4)
        if (t.tile_class == 2) CHECK(t.rank_budget == 1);  // min(1, 4)
    }
    CHECK(bound_constructive(plan) == 20);
}

TEST_CASE("simplified bound evaluates its closed form") {
    CHECK(bound_simplified(4, 2, 2, 2, 4, 2) == 16);
    CHECK(bound_simplified(2, 2, 1, 1, 1, 1) == 1);
    CHECK(bound_simplified(6, 3, 3, 2, 4, 2) == 72);
    CHECK_THROWS_AS(bound_simplified(5, 2, 2, 2, 4, 2), ValidationError);
    CHECK_THROWS_AS(bound_simplified(4, 2, 2, 2, 5, 2), ValidationError);
}

TEST_CASE("general bound equals the constructive count") {
    SUBCASE("named cases") {
        CHECK(bound_general(fixtures::four_user_spec()) == 16);
        CHECK(bound_general(fixtures::five_user_spec()) == 20);
    }
    SUBCASE("random sweep including non-divisible shapes") {
        std::mt19937 rng(347);
        for (int round = 0; round < 40; ++round) {
            const ProblemSpec spec = fixtures::random_spec(rng, 8, 3, 6, 0.0);
            const TilePlan plan = apply_ownership(design_tiles(spec), admissible_support(spec));
            CAPTURE(spec.num_users);
            CAPTURE(spec.max_users_per_server);
            CAPTURE(spec.max_subfunctions_per_server);
            CHECK(bound_general(spec) == bound_constructive(plan));
        }
    }
}

TEST_CASE("general bound equals the simplified bound in the divisible regime") {
    // Divisible parameters where every tile still owns at least a full block's
    // worth of rows: all subfunctions active, or a small enough fan-out.
    std::mt19937 rng(349);
    int checked = 0;
    while (checked < 40) {
        std::uniform_int_distribution<Index> small(1, 4);
        const Index delta = small(rng);
        const Index blocks = small(rng);
        const Index modes = small(rng);
        std::uniform_int_distribution<Index> limit_dist(1, modes);
        const Index limit = limit_dist(rng);
        const Index lambda = small(rng);
        const Index windows = small(rng);
        const Index p = lambda * windows;
        Index shrunk = 1;
        for (Index g = 0; g < limit; ++g) shrunk *= lambda - 1;
        if (limit < modes && delta > shrunk) continue;  // pinned-row overlap would bite
        const ProblemSpec spec = uniform_spec(blocks * delta, delta, modes, limit, p, lambda);
        CHECK(bound_general(spec) == bound_simplified(blocks * delta, delta, modes, limit, p, lambda));
        ++checked;
    }
}

TEST_CASE("pinned-row overlap makes the constructive count strictly tighter") {
    // Two modes, one active per server, everything divisible: the closed form
    // charges both active sets for the shared pinned cell, the construction
    // does not.
    const ProblemSpec spec = uniform_spec(2, 2, 2, 1, 2, 2);
    const TilePlan plan = apply_ownership(design_tiles(spec), admissible_support(spec));
    CHECK(bound_simplified(2, 2, 2, 1, 2, 2) == 4);
    CHECK(bound_constructive(plan) == 3);
    CHECK(bound_general(spec) == 3);
}

TEST_CASE("lemma-1 style containment check") {
    SUBCASE("zero factors cannot cover a nonzero product") {
        DenseTensor product(Shape{2, 2});
        product.at({1, 1}) = 1.0;
        CHECK_FALSE(lemma1_check(Matrix::Zero(2, 3), DenseTensor(Shape{3, 2}), product));
    }
    SUBCASE("the union itself is covered") {
        std::mt19937 rng(353);
        std::bernoulli_distribution coin(0.4);
        Matrix d = Matrix::Zero(3, 4);
        DenseTensor e(Shape{4, 2, 2});
        for (Index i = 0; i < d.size(); ++i) d.data()[i] = coin(rng) ? 1.0 : 0.0;
        for (Index q = 0; q < e.size(); ++q) e[q] = coin(rng) ? 1.0 : 0.0;
        DenseTensor uni(Shape{3, 2, 2});
        for (Index n = 1; n <= 4; ++n)
            for (Index k = 1; k <= 3; ++k)
                for (Index a = 1; a <= 2; ++a)
                    for (Index b = 1; b <= 2; ++b)
                        if (d(k - 1, n - 1) != 0.0 && e.at({n, a, b}) != 0.0) uni.at({k, a, b}) = 1.0;
        CHECK(lemma1_check(d, e, uni));
        // Anything outside the union breaks it.
        DenseTensor beyond = uni;
        bool flipped = false;
        for (Index q = 0; q < beyond.size() && !flipped; ++q) {
            if (beyond[q] == 0.0) {
                beyond[q] = 1.0;
                flipped = true;
            }
        }
        if (flipped) CHECK_FALSE(lemma1_check(d, e, beyond));
    }
}
