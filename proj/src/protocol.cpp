#include "tenfact/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace tenfact {

Index power_cost(Index alpha, Index width) {
    if (alpha < 0) throw std::invalid_argument("power_cost: exponent must be nonnegative");
    if (width < 1) throw std::invalid_argument("power_cost: window width must be >= 1");
    if (alpha <= 1) return 0;
    Index q = alpha / width;
    Index r = alpha % width;
    if (r == 0) {  // top of a window: anchor at the previous window boundary
        q -= 1;
        r = width;
    }
    Index anchor = q * width + 1;
    Index log2_floor = 0;
    while (anchor > 1) {
        anchor >>= 1;
        ++log2_floor;
    }
    return log2_floor + (r - 1);
}

SubfunctionComputation compute_subfunctions(const BasisSuite& basis,
                                            const std::vector<ServerAssignment>& assignments,
                                            Index component) {
    SubfunctionComputation out;
    out.per_server.resize(assignments.size());
    out.evaluation_counts.assign(basis.functions.size(), 0);
    const std::vector<double> w = basis.evaluate(component);
    for (std::size_t n = 0; n < assignments.size(); ++n) {
        for (Index l : assignments[n].subfunctions) {
            if (l < 1 || l > static_cast<Index>(w.size()))
                throw EvaluationError("server " + std::to_string(n + 1) + " is assigned subfunction " +
                                      std::to_string(l) + " but only " + std::to_string(w.size()) +
                                      " are defined");
            out.per_server[n].emplace_back(l, w[static_cast<std::size_t>(l - 1)]);
            ++out.evaluation_counts[static_cast<std::size_t>(l - 1)];
        }
    }
    return out;
}

std::vector<double> encode(const DenseTensor& encoding, const DenseTensor& monomials) {
    const DenseTensor z = contract_block(encoding, 2, monomials, 1);
    return std::vector<double>(z.data().begin(), z.data().end());
}

std::vector<double> decode(const Matrix& decoding, std::span<const double> z) {
    if (decoding.cols() != static_cast<Index>(z.size()))
        throw ShapeError("decode: decoding matrix has " + std::to_string(decoding.cols()) +
                         " columns for " + std::to_string(z.size()) + " transmissions");
    Eigen::Map<const Vector> zv(z.data(), static_cast<Index>(z.size()));
    const Vector f = decoding * zv;
    return std::vector<double>(f.data(), f.data() + f.size());
}

SimulationReport simulate(const ProblemSpec& spec, const DenseTensor& demand,
                          const Factorization& fact, const BasisSuite& basis) {
    if (demand.shape() != spec.demand_shape())
        throw ShapeError("simulate: demand tensor does not match the problem");
    if (static_cast<Index>(basis.functions.size()) != spec.num_subfunctions)
        throw ValidationError("simulate: need one basis function per subfunction");
    if (basis.input.empty()) throw ValidationError("simulate: empty input vector");

    SimulationReport report;
    report.num_servers = fact.num_servers;
    report.rate = fact.num_servers > 0
                      ? static_cast<double>(spec.num_users) / static_cast<double>(fact.num_servers)
                      : 0.0;

    const auto assignments = extract_assignments(fact, spec);
    const auto audit = verify_constraints(fact, spec);
    report.per_server_multiplications = audit.costs.per_server_multiplications;
    report.total_multiplications = audit.costs.total_multiplications;

    report.subfunction_eval_counts.assign(static_cast<std::size_t>(spec.num_subfunctions), 0);

    const bool have_servers = fact.num_servers > 0;
    const DenseTensor encoding = have_servers ? fact.encoding_tensor() : DenseTensor();
    for (Index b = 1; b <= basis.components(); ++b) {
        const auto held = compute_subfunctions(basis, assignments, b);
        if (b == 1) {
            for (std::size_t l = 0; l < held.evaluation_counts.size(); ++l)
                report.subfunction_eval_counts[l] = held.evaluation_counts[l];
        }
        const std::vector<double> w = basis.evaluate(b);
        const DenseTensor monomials = build_monomial_tensor(w, spec);
        std::vector<double> z;
        if (have_servers) z = encode(encoding, monomials);
        report.transmissions.push_back(z);
        report.recovered.push_back(decode(fact.decoding, z));
        report.reference.push_back(evaluate_demands_direct(demand, monomials));
    }

    double worst = 0.0;
    for (std::size_t b = 0; b < report.recovered.size(); ++b) {
        for (std::size_t k = 0; k < report.recovered[b].size(); ++k) {
            const double ref = report.reference[b][k];
            const double err = std::abs(report.recovered[b][k] - ref);
            worst = std::max(worst, err / std::max(std::abs(ref), 1e-12));
        }
    }
    report.max_rel_error = worst;
    return report;
}

}  // namespace tenfact
