#pragma once

// Shared problem builders for the test suites.

#include <random>

#include "tenfact/demand.hpp"

namespace fixtures {

using namespace tenfact;

/// K=4 users, two subfunctions with degree grids of size 4, windows of 2,
/// two-user fan-out, both subfunctions allowed per server.
inline ProblemSpec four_user_spec() {
    ProblemSpec spec;
    spec.num_users = 4;
    spec.num_subfunctions = 2;
    spec.mode_sizes = {4, 4};
    spec.window_sizes = {2, 2};
    spec.max_subfunctions_per_server = 2;
    spec.max_users_per_server = 2;
    spec.validate();
    return spec;
}

/// Same geometry with a fifth user so the last block is a residual.
inline ProblemSpec five_user_spec() {
    ProblemSpec spec = four_user_spec();
    spec.num_users = 5;
    spec.validate();
    return spec;
}

/// Fills every admissible cell with a random coefficient. Positive values
/// keep downstream reference sums free of cancellation.
inline void fill_admissible(ProblemSpec& spec, std::mt19937& rng, double density = 1.0,
                            double lo = 0.1, double hi = 1.0) {
    std::uniform_real_distribution<double> value(lo, hi);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const Shape shape = spec.demand_shape();
    spec.coefficients.clear();
    for (Index pos = 1; pos <= shape.count(); ++pos) {
        const auto idx = multi_index(pos, shape);
        Index active = 0;
        for (Index l = 1; l <= spec.num_subfunctions; ++l) {
            if (spec.exponent(l, idx[static_cast<std::size_t>(l)]) > 0) ++active;
        }
        if (active > spec.max_subfunctions_per_server) continue;
        if (coin(rng) > density) continue;
        spec.coefficients.push_back(
            {idx[0], std::vector<Index>(idx.begin() + 1, idx.end()), value(rng)});
    }
    spec.validate();
}

/// Random small system with an admissible random demand.
inline ProblemSpec random_spec(std::mt19937& rng, Index max_users = 8, Index max_modes = 3,
                               Index max_mode_size = 6, double density = 0.7) {
    std::uniform_int_distribution<Index> users_dist(1, max_users);
    std::uniform_int_distribution<Index> modes_dist(1, max_modes);
    ProblemSpec spec;
    spec.num_users = users_dist(rng);
    spec.num_subfunctions = modes_dist(rng);
    std::uniform_int_distribution<Index> size_dist(1, max_mode_size);
    for (Index l = 0; l < spec.num_subfunctions; ++l) {
        const Index p = size_dist(rng);
        spec.mode_sizes.push_back(p);
        spec.window_sizes.push_back(std::uniform_int_distribution<Index>(1, p)(rng));
    }
    spec.max_subfunctions_per_server =
        std::uniform_int_distribution<Index>(1, spec.num_subfunctions)(rng);
    spec.max_users_per_server = std::uniform_int_distribution<Index>(1, spec.num_users)(rng);
    spec.validate();
    fill_admissible(spec, rng, density);
    return spec;
}

/// Random suite of builtin basis functions on inputs where every builtin is
/// defined and positive.
inline BasisSuite random_basis(const ProblemSpec& spec, std::mt19937& rng, Index components = 1) {
    static const BasisKind kinds[] = {BasisKind::Exp,      BasisKind::Log,  BasisKind::Sqrt,
                                      BasisKind::Cos,      BasisKind::Sin,  BasisKind::Identity,
                                      BasisKind::Square,   BasisKind::Affine};
    std::uniform_int_distribution<std::size_t> kind_dist(0, std::size(kinds) - 1);
    std::uniform_real_distribution<double> input_dist(1.1, 1.5);
    std::uniform_real_distribution<double> param_dist(0.2, 1.5);
    BasisSuite basis;
    for (Index l = 0; l < spec.num_subfunctions; ++l) {
        BasisFunction f;
        f.kind = kinds[kind_dist(rng)];
        if (f.kind == BasisKind::Affine) {
            f.scale = param_dist(rng);
            f.shift = param_dist(rng);
        }
        basis.functions.push_back(f);
    }
    for (Index b = 0; b < components; ++b) basis.input.push_back(input_dist(rng));
    return basis;
}

}  // namespace fixtures
