#include "tenfact/demand.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace tenfact {

namespace {

std::string tuple_str(Index user, std::span<const Index> index) {
    std::string s = "(user " + std::to_string(user) + ", index [";
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(index[i]);
    }
    return s + "])";
}

}  // namespace

Shape ProblemSpec::demand_shape() const {
    std::vector<Index> dims;
    dims.reserve(static_cast<std::size_t>(num_subfunctions) + 1);
    dims.push_back(num_users);
    dims.insert(dims.end(), mode_sizes.begin(), mode_sizes.end());
    return Shape(dims);
}

Index ProblemSpec::exponent(Index mode, Index p) const {
    const auto& grid = exponent_grids.at(static_cast<std::size_t>(mode - 1));
    return grid.at(static_cast<std::size_t>(p - 1));
}

void ProblemSpec::validate() {
    if (num_users < 1) throw ValidationError("K must be >= 1");
    if (num_subfunctions < 1) throw ValidationError("L must be >= 1");
    if (static_cast<Index>(mode_sizes.size()) != num_subfunctions)
        throw ValidationError("P must list one size per subfunction");
    if (static_cast<Index>(window_sizes.size()) != num_subfunctions)
        throw ValidationError("Lambda must list one window per subfunction");
    for (Index l = 0; l < num_subfunctions; ++l) {
        const Index p = mode_sizes[static_cast<std::size_t>(l)];
        const Index w = window_sizes[static_cast<std::size_t>(l)];
        if (p < 1) throw ValidationError("P[" + std::to_string(l + 1) + "] must be >= 1");
        if (w < 1 || w > p)
            throw ValidationError("Lambda[" + std::to_string(l + 1) + "] must lie in [1, P[" +
                                  std::to_string(l + 1) + "]]");
    }
    if (max_subfunctions_per_server < 1 || max_subfunctions_per_server > num_subfunctions)
        throw ValidationError("Gamma must lie in [1, L]");
    if (max_users_per_server < 1 || max_users_per_server > num_users)
        throw ValidationError("Delta must lie in [1, K]");

    if (exponent_grids.empty()) {
        exponent_grids.resize(static_cast<std::size_t>(num_subfunctions));
        for (Index l = 0; l < num_subfunctions; ++l) {
            auto& grid = exponent_grids[static_cast<std::size_t>(l)];
            grid.resize(static_cast<std::size_t>(mode_sizes[static_cast<std::size_t>(l)]));
            std::iota(grid.begin(), grid.end(), Index{0});
        }
    }
    if (static_cast<Index>(exponent_grids.size()) != num_subfunctions)
        throw ValidationError("exponent_grids must list one grid per subfunction");
    for (Index l = 0; l < num_subfunctions; ++l) {
        const auto& grid = exponent_grids[static_cast<std::size_t>(l)];
        if (static_cast<Index>(grid.size()) != mode_sizes[static_cast<std::size_t>(l)])
            throw ValidationError("exponent_grids[" + std::to_string(l + 1) + "] must have P[" +
                                  std::to_string(l + 1) + "] entries");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] < 0) throw ValidationError("exponent grids must be nonnegative");
            if (i > 0 && grid[i] <= grid[i - 1])
                throw ValidationError("exponent_grids[" + std::to_string(l + 1) +
                                      "] must be strictly increasing");
        }
    }

    const Shape shape = demand_shape();
    std::map<std::pair<Index, std::vector<Index>>, bool> seen;
    for (const Coefficient& c : coefficients) {
        if (c.user < 1 || c.user > num_users)
            throw ValidationError("coefficient user out of range " + tuple_str(c.user, c.index));
        if (static_cast<Index>(c.index.size()) != num_subfunctions)
            throw ValidationError("coefficient index has wrong length " + tuple_str(c.user, c.index));
        for (Index l = 1; l <= num_subfunctions; ++l) {
            const Index p = c.index[static_cast<std::size_t>(l - 1)];
            if (p < 1 || p > shape.dim(l + 1))
                throw ValidationError("coefficient index out of range " + tuple_str(c.user, c.index));
        }
        if (!seen.emplace(std::make_pair(c.user, c.index), true).second)
            throw ValidationError("duplicate coefficient " + tuple_str(c.user, c.index));
    }
}

NormalizedConstraints normalized_constraints(const ProblemSpec& spec) {
    NormalizedConstraints out;
    out.computation = static_cast<double>(spec.max_subfunctions_per_server) /
                      static_cast<double>(spec.num_subfunctions);
    out.communication = static_cast<double>(spec.max_users_per_server) /
                        static_cast<double>(spec.num_users);
    out.multiplication.reserve(static_cast<std::size_t>(spec.num_subfunctions));
    for (Index l = 0; l < spec.num_subfunctions; ++l) {
        out.multiplication.push_back(static_cast<double>(spec.window_sizes[static_cast<std::size_t>(l)]) /
                                     static_cast<double>(spec.mode_sizes[static_cast<std::size_t>(l)]));
    }
    return out;
}

DenseTensor build_demand_tensor(const ProblemSpec& spec) {
    DenseTensor t(spec.demand_shape());
    std::vector<Index> full(static_cast<std::size_t>(spec.num_subfunctions) + 1);
    std::map<Index, bool> taken;  // linear position -> seen
    for (const Coefficient& c : spec.coefficients) {
        full[0] = c.user;
        std::copy(c.index.begin(), c.index.end(), full.begin() + 1);
        const Index pos = linear_index(full, t.shape());
        if (!taken.emplace(pos, true).second)
            throw ValidationError("duplicate coefficient " + tuple_str(c.user, c.index));
        t[pos - 1] = c.value;
    }
    return t;
}

std::vector<AdmissibilityViolation> validate_admissibility(const ProblemSpec& spec,
                                                           const DenseTensor& demand) {
    if (demand.shape() != spec.demand_shape())
        throw ShapeError("validate_admissibility: demand tensor shape does not match the problem");
    std::vector<AdmissibilityViolation> out;
    for (Index q = 0; q < demand.size(); ++q) {
        if (demand[q] == 0.0) continue;
        const std::vector<Index> idx = multi_index(q + 1, demand.shape());
        Index active = 0;
        for (Index l = 1; l <= spec.num_subfunctions; ++l) {
            if (spec.exponent(l, idx[static_cast<std::size_t>(l)]) > 0) ++active;
        }
        if (active > spec.max_subfunctions_per_server) {
            out.push_back({idx[0], std::vector<Index>(idx.begin() + 1, idx.end()), active});
        }
    }
    return out;
}

double BasisFunction::operator()(double x, Index mode) const {
    switch (kind) {
        case BasisKind::Exp:
            return std::exp(x);
        case BasisKind::Log:
            if (x <= 0.0)
                throw EvaluationError("basis " + std::to_string(mode) + " (log) needs positive input, got " +
                                      std::to_string(x));
            return std::log(x);
        case BasisKind::Sqrt:
            if (x < 0.0)
                throw EvaluationError("basis " + std::to_string(mode) + " (sqrt) needs nonnegative input, got " +
                                      std::to_string(x));
            return std::sqrt(x);
        case BasisKind::Cos:
            return std::cos(x);
        case BasisKind::Sin:
            return std::sin(x);
        case BasisKind::Identity:
            return x;
        case BasisKind::Square:
            return x * x;
        case BasisKind::Affine:
            return scale * x + shift;
    }
    throw EvaluationError("basis " + std::to_string(mode) + ": unknown kind");
}

BasisKind basis_kind_from_name(const std::string& name) {
    if (name == "exp") return BasisKind::Exp;
    if (name == "log") return BasisKind::Log;
    if (name == "sqrt") return BasisKind::Sqrt;
    if (name == "cos") return BasisKind::Cos;
    if (name == "sin") return BasisKind::Sin;
    if (name == "identity") return BasisKind::Identity;
    if (name == "square") return BasisKind::Square;
    if (name == "affine") return BasisKind::Affine;
    throw ValidationError("unknown basis function \"" + name + "\"");
}

std::string basis_kind_name(BasisKind kind) {
    switch (kind) {
        case BasisKind::Exp: return "exp";
        case BasisKind::Log: return "log";
        case BasisKind::Sqrt: return "sqrt";
        case BasisKind::Cos: return "cos";
        case BasisKind::Sin: return "sin";
        case BasisKind::Identity: return "identity";
        case BasisKind::Square: return "square";
        case BasisKind::Affine: return "affine";
    }
    return "?";
}

std::vector<double> BasisSuite::evaluate(Index component) const {
    if (component < 1 || component > components())
        throw std::out_of_range("BasisSuite::evaluate: component " + std::to_string(component) +
                                " outside [1, " + std::to_string(components()) + "]");
    std::vector<double> w;
    w.reserve(functions.size());
    for (std::size_t l = 0; l < functions.size(); ++l) {
        const BasisFunction& f = functions[l];
        Index src = f.arg == 0 ? component : f.arg;
        if (src < 1 || src > components())
            throw EvaluationError("basis " + std::to_string(l + 1) + " reads input component " +
                                  std::to_string(src) + " of " + std::to_string(components()));
        w.push_back(f(input[static_cast<std::size_t>(src - 1)], static_cast<Index>(l + 1)));
    }
    return w;
}

DenseTensor build_monomial_tensor(std::span<const double> w, const ProblemSpec& spec) {
    if (static_cast<Index>(w.size()) != spec.num_subfunctions)
        throw ShapeError("build_monomial_tensor: expected one value per subfunction");
    DenseTensor t((Shape(spec.mode_sizes)));
    for (Index q = 0; q < t.size(); ++q) {
        const std::vector<Index> idx = multi_index(q + 1, t.shape());
        double prod = 1.0;
        for (Index l = 1; l <= spec.num_subfunctions; ++l) {
            const Index e = spec.exponent(l, idx[static_cast<std::size_t>(l - 1)]);
            prod *= std::pow(w[static_cast<std::size_t>(l - 1)], static_cast<double>(e));
        }
        t[q] = prod;
    }
    return t;
}

std::vector<double> evaluate_demands_direct(const DenseTensor& demand, const DenseTensor& monomials) {
    const DenseTensor f = contract_block(demand, 2, monomials, 1);
    return std::vector<double>(f.data().begin(), f.data().end());
}

}  // namespace tenfact
