#pragma once

#include <vector>

#include "tenfact/factorizer.hpp"

namespace tenfact {

/// Multiplications needed for one power term w^alpha when the server holds an
/// anchored exponent window of the given width: reach the window anchor
/// q*width+1 by repeated squaring, then step up to the target.
/// alpha in {0, 1} costs nothing.
Index power_cost(Index alpha, Index width);

/// Subfunction values held by each server for one input component, plus how
/// often each subfunction is evaluated across the cluster.
struct SubfunctionComputation {
    // per server: (subfunction, value) pairs, only the assigned ones
    std::vector<std::vector<std::pair<Index, double>>> per_server;
    std::vector<Index> evaluation_counts;  // per subfunction
};

SubfunctionComputation compute_subfunctions(const BasisSuite& basis,
                                            const std::vector<ServerAssignment>& assignments,
                                            Index component);

/// Server transmissions: z = encoding contracted with the monomial tensor.
std::vector<double> encode(const DenseTensor& encoding, const DenseTensor& monomials);

/// User-side linear decoding: f' = decoding * z.
std::vector<double> decode(const Matrix& decoding, std::span<const double> z);

struct SimulationReport {
    Index num_servers = 0;
    double rate = 0.0;
    std::vector<std::vector<double>> transmissions;  // per input component
    std::vector<std::vector<double>> recovered;      // per input component
    std::vector<std::vector<double>> reference;      // per input component
    double max_rel_error = 0.0;                      // floor 1e-12 on the reference magnitude
    std::vector<Index> per_server_multiplications;
    Index total_multiplications = 0;
    std::vector<Index> subfunction_eval_counts;
};

/// Full three-phase run against the direct-evaluation oracle: compute the
/// assigned subfunction outputs, form transmissions, decode, and compare.
SimulationReport simulate(const ProblemSpec& spec, const DenseTensor& demand,
                          const Factorization& fact, const BasisSuite& basis);

}  // namespace tenfact
