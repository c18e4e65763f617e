#pragma once

#include <array>
#include <vector>

#include "tenfact/demand.hpp"
#include "tenfact/tensor.hpp"

namespace tenfact {

/// Closed 1-based index interval.
struct IndexRange {
    Index lo = 1;
    Index hi = 1;
    Index size() const { return hi - lo + 1; }
    bool contains(Index i) const { return lo <= i && i <= hi; }
    bool operator==(const IndexRange&) const = default;
};

/// One tile of the demand tensor: a contiguous user block crossed with one
/// exponent-index window per active mode (inactive modes pinned to index 1).
///
/// Tile classes: 1 = full user block and all windows full, 2 = residual user
/// block, 3 = full block with at least one residual window, 4 = residual block
/// with at least one residual window.
struct Tile {
    Index id = 0;                        // 1-based position in the plan order
    int tile_class = 1;
    Index block = 0;                     // user-block index i
    std::vector<Index> window;           // per-mode window index, 1 on inactive modes
    std::vector<Index> active_modes;     // sorted 1-based modes, |active_modes| = Gamma
    IndexRange users;                    // declared user rows
    std::vector<IndexRange> rows;        // declared per-mode index ranges, pinned = [1,1]

    // Filled by apply_ownership. owned_rows are index tuples over the
    // subfunction modes, sorted by Little-Endian order; owned_row_users lists,
    // per owned row, the users whose cell this tile claimed (sparse demands
    // can leave holes in the owned block).
    std::vector<Index> owned_users;
    std::vector<std::vector<Index>> owned_rows;
    std::vector<std::vector<Index>> owned_row_users;
    Index rank_budget = 0;               // min(|owned_users|, |owned_rows|)

    bool full_block(Index delta) const { return users.size() == delta; }
};

/// All tiles in the fixed processing order: lexicographic on
/// (block, window vector, active modes).
struct TilePlan {
    std::vector<Tile> tiles;
    Shape demand_shape;
    bool ownership_applied = false;
    DenseTensor mask;  // 0/1 over the demand shape; valid after ownership

    std::array<Index, 4> class_counts() const;
};

/// All (L choose limit)-subsets of [1..num_modes] of size limit, in
/// lexicographic order.
std::vector<std::vector<Index>> enumerate_active_sets(Index num_modes, Index limit);

/// Outer placement of a binary user-column against a binary subfunction
/// slice: entry (k, p) = col(k) * slice(p).
DenseTensor rank_one_support(const DenseTensor& col, const DenseTensor& slice);

/// Step 1: enumerate and classify all tiles (no ownership yet).
TilePlan design_tiles(const ProblemSpec& spec);

/// Per-class tile counts in closed form; matches design_tiles exactly.
std::array<Index, 4> class_cardinalities(const ProblemSpec& spec);

/// Step 2: walk tiles in plan order; each tile owns the not-yet-claimed
/// support cells inside its declared block. Tiles with nothing to own are
/// skipped (rank budget 0). Support cells no tile can cover signal an
/// inadmissible demand and raise ValidationError.
TilePlan apply_ownership(TilePlan plan, const DenseTensor& support);

/// min(|owned users|, |owned rows|) — the number of servers the tile may use.
Index rank_budget(const Tile& tile);

/// The maximal admissible support: all cells whose index tuple activates at
/// most the per-server subfunction limit. Used as the worst case for bounds.
DenseTensor admissible_support(const ProblemSpec& spec);

/// 0/1 pattern of entries with magnitude above the threshold.
DenseTensor tensor_support(const DenseTensor& t, double threshold = 0.0);

/// Sum of rank budgets over the plan's tiles. Requires ownership.
Index bound_constructive(const TilePlan& plan);

/// Closed-form server bound for the uniform divisible case:
/// (K/Delta) * binom(L, Gamma) * min(Delta, Lambda^Gamma) * (P/Lambda)^Gamma.
/// Preconditions: Delta | K and Lambda | P.
Index bound_simplified(Index num_users, Index max_users_per_server, Index num_subfunctions,
                       Index max_subfunctions_per_server, Index mode_size, Index window_size);

/// Closed-form evaluation of the constructive bound for general (possibly
/// non-divisible, non-uniform) parameters, equal to bound_constructive on the
/// maximal admissible support. Counts per-tile owned rows analytically:
/// a cell pinned at index 1 on some modes belongs to every tile whose active
/// set covers its above-1 modes, and the plan order awards it to the
/// lexicographically smallest such active set.
Index bound_general(const ProblemSpec& spec);

/// Union-of-supports containment: every nonzero of the product must lie in
/// some column-against-slice outer support of the factors.
bool lemma1_check(const Matrix& d_support, const DenseTensor& e_support,
                  const DenseTensor& product_support);

}  // namespace tenfact
