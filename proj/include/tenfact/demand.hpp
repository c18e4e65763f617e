#pragma once

#include <string>
#include <vector>

#include "tenfact/tensor.hpp"

namespace tenfact {

/// One sparse demand coefficient: user k requests `value` times the monomial
/// addressed by the 1-based index tuple (one index per subfunction mode).
struct Coefficient {
    Index user = 0;
    std::vector<Index> index;
    double value = 0.0;
};

/// Problem description for one demand tensor of shape
/// num_users x mode_sizes[0] x ... x mode_sizes[L-1].
///
/// exponent_grids map tensor indices to actual integer exponents per mode; the
/// default grid for a mode of size P is [0, 1, ..., P-1], so index 1 means the
/// subfunction is absent from the monomial. Grids are strictly increasing and
/// nonnegative.
struct ProblemSpec {
    Index num_users = 0;                           // K
    Index num_subfunctions = 0;                    // L
    std::vector<Index> mode_sizes;                 // P_l, one per subfunction
    std::vector<Index> window_sizes;               // exponent-window widths, one per subfunction
    Index max_subfunctions_per_server = 0;         // computation constraint
    Index max_users_per_server = 0;                // communication constraint
    std::vector<std::vector<Index>> exponent_grids;
    std::vector<Coefficient> coefficients;

    /// Shape of the demand tensor: (K, P_1, ..., P_L).
    Shape demand_shape() const;

    /// Exponent carried by 1-based index p on 1-based mode l.
    Index exponent(Index mode, Index p) const;

    /// Throws ValidationError on the first violated invariant. Fills in
    /// default exponent grids when none are given.
    void validate();
};

/// Normalized constraint loads, each in (0, 1].
struct NormalizedConstraints {
    double computation = 0.0;                // Gamma / L
    double communication = 0.0;              // Delta / K
    std::vector<double> multiplication;      // Lambda_l / P_l
};

NormalizedConstraints normalized_constraints(const ProblemSpec& spec);

/// Dense demand tensor with the sparse coefficients placed and zeros
/// elsewhere. Throws ValidationError on duplicate (user, index) entries.
DenseTensor build_demand_tensor(const ProblemSpec& spec);

/// One inadmissible coefficient: more active subfunctions than any one server
/// may compute.
struct AdmissibilityViolation {
    Index user = 0;
    std::vector<Index> index;
    Index active_subfunctions = 0;
};

/// Per nonzero entry, the count of modes with a positive exponent must not
/// exceed the per-server subfunction limit. Violations are data, not errors.
std::vector<AdmissibilityViolation> validate_admissibility(const ProblemSpec& spec,
                                                           const DenseTensor& demand);

/// Builtin elementwise basis functions.
enum class BasisKind { Exp, Log, Sqrt, Cos, Sin, Identity, Square, Affine };

struct BasisFunction {
    BasisKind kind = BasisKind::Identity;
    double scale = 1.0;   // affine: scale * x + shift
    double shift = 0.0;
    Index arg = 0;        // 1-based input component; 0 = the current component

    double operator()(double x, Index mode) const;  // mode only names errors
};

BasisKind basis_kind_from_name(const std::string& name);
std::string basis_kind_name(BasisKind kind);

/// The L basis functions together with the fixed common input. With a vector
/// input the whole pipeline runs once per component; functions with a fixed
/// `arg` read that component instead.
struct BasisSuite {
    std::vector<BasisFunction> functions;
    std::vector<double> input;

    Index components() const { return static_cast<Index>(input.size()); }

    /// Output values W_l for one 1-based input component.
    std::vector<double> evaluate(Index component) const;
};

/// Tensor of monomial values: entry p_1..p_L holds prod_l w_l^exponent(l, p_l).
DenseTensor build_monomial_tensor(std::span<const double> w, const ProblemSpec& spec);

/// Protocol-free reference evaluation: f_k = sum_p demand(k, p) * monomials(p).
std::vector<double> evaluate_demands_direct(const DenseTensor& demand, const DenseTensor& monomials);

}  // namespace tenfact
