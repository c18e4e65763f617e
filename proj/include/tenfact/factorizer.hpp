#pragma once

#include <string>
#include <vector>

#include "tenfact/demand.hpp"
#include "tenfact/mlsvd.hpp"
#include "tenfact/tiling.hpp"

namespace tenfact {

/// Sparse factorization of the demand tensor: demand = encoding x_1 decoding.
/// The decoding matrix is K x N; the encoding tensor is held as N order-L
/// server slices (empty when no server is needed).
struct Factorization {
    Matrix decoding;                        // K x N
    std::vector<DenseTensor> server_slices; // slice n = encoding coefficients of server n+1
    std::vector<IndexRange> tile_ranges;    // per plan tile: 1-based server columns, hi < lo = skipped
    Index num_servers = 0;
    Shape demand_shape;
    double tolerance = kDefaultRankTol;

    /// Full encoding tensor (N x P_1 x ... x P_L); requires num_servers >= 1.
    DenseTensor encoding_tensor() const;
    /// Mode-1 unfolding of the encoding tensor; valid for any server count.
    Matrix encoding_unfolded() const;
    /// decoding applied along mode 1 of the encoding tensor.
    DenseTensor reconstruct() const;
};

/// Steps 2-4: factorize every owned tile by a budgeted mode-1 SVD and place
/// the factors into disjoint column/slice ranges. The plan must carry
/// ownership computed against the support of `demand`.
Factorization factorize(const DenseTensor& demand, const TilePlan& plan,
                        double tol = kDefaultRankTol);

/// Relative reconstruction residual |Ex_1D - F| / max(|F|, 1e-300); the
/// absolute residual when the demand norm underflows that floor.
double verify_reconstruction(const Factorization& fact, const DenseTensor& demand);

/// Per-server view of the factorization.
struct ServerAssignment {
    std::vector<Index> subfunctions;            // modes used with a nonzero exponent
    std::vector<std::vector<Index>> monomials;  // supported index tuples of the server's slice
    std::vector<Index> users;                   // users the server transmits to
};

std::vector<ServerAssignment> extract_assignments(const Factorization& fact,
                                                  const ProblemSpec& spec);

enum class ConstraintKind { UserLimit, SubfunctionLimit, WindowRange, WindowAnchor };

struct ConstraintViolation {
    ConstraintKind kind;
    Index server = 0;  // 1-based
    Index mode = 0;    // 1-based, 0 when not mode-specific
    Index value = 0;   // offending cardinality or span
    std::string message;
};

struct CostReport {
    Index computation_achieved = 0;                 // max subfunctions on one server
    Index communication_achieved = 0;               // max users served by one server
    std::vector<Index> window_achieved;             // per-mode max index span
    NormalizedConstraints declared_normalized;
    double rate = 0.0;                              // K / N, 0 when N = 0
    std::vector<Index> per_server_multiplications;  // window charge summed over modes
    Index total_multiplications = 0;
};

struct ConstraintAudit {
    bool ok = false;
    CostReport costs;
    std::vector<ConstraintViolation> violations;
};

/// Audits the factorization against the declared limits: user fan-out,
/// subfunction count, and per-mode windows (both the index span and
/// containment in one anchored window).
ConstraintAudit verify_constraints(const Factorization& fact, const ProblemSpec& spec);

/// Users x monomials matrix of the demand (mode-1 unfolding).
Matrix linearize(const DenseTensor& demand);

/// Server count of the flattened single-mode scheme, for comparison only.
struct BaselineCount {
    double value = 0.0;
    bool integral = false;
};

BaselineCount baseline_server_count(Index num_users, Index max_users_per_server,
                                    Index num_flat_subfunctions, Index max_subfunctions_per_server,
                                    Index granularity = 1);

/// 0/1 support patterns of the factors.
Matrix decoding_support(const Factorization& fact);
DenseTensor encoding_support(const Factorization& fact);

}  // namespace tenfact
