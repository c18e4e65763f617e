#include "tenfact/io.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace tenfact {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.contains(key)) throw ValidationError(where + ": unknown member \"" + key + "\"");
    }
}

Index as_index(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ValidationError(field + " must be an integer");
    return j.get<Index>();
}

std::vector<Index> as_index_array(const json& j, const std::string& field) {
    if (!j.is_array()) throw ValidationError(field + " must be an array of integers");
    std::vector<Index> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(as_index(v, field));
    return out;
}

double as_real(const json& j, const std::string& field) {
    if (!j.is_number()) throw ValidationError(field + " must be a number");
    return j.get<double>();
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("problem: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("problem: top level must be an object");
    reject_unknown(root,
                   {"K", "L", "P", "Lambda", "Gamma", "Delta", "exponent_grids", "coefficients",
                    "basis", "input"},
                   "problem");
    for (const char* required : {"K", "L", "P", "Lambda", "Gamma", "Delta", "coefficients"}) {
        if (!root.contains(required)) throw ValidationError("problem: missing member \"" + std::string(required) + "\"");
    }

    ProblemFile out;
    ProblemSpec& spec = out.spec;
    spec.num_users = as_index(root["K"], "K");
    spec.num_subfunctions = as_index(root["L"], "L");
    spec.mode_sizes = as_index_array(root["P"], "P");
    spec.window_sizes = as_index_array(root["Lambda"], "Lambda");
    spec.max_subfunctions_per_server = as_index(root["Gamma"], "Gamma");
    spec.max_users_per_server = as_index(root["Delta"], "Delta");
    if (root.contains("exponent_grids")) {
        if (!root["exponent_grids"].is_array()) throw ValidationError("exponent_grids must be an array of arrays");
        for (const auto& g : root["exponent_grids"]) spec.exponent_grids.push_back(as_index_array(g, "exponent_grids"));
    }
    if (!root["coefficients"].is_array()) throw ValidationError("coefficients must be an array");
    for (const auto& c : root["coefficients"]) {
        if (!c.is_object()) throw ValidationError("coefficients entries must be objects");
        reject_unknown(c, {"user", "index", "value"}, "coefficients");
        for (const char* required : {"user", "index", "value"}) {
            if (!c.contains(required)) throw ValidationError("coefficients: missing member \"" + std::string(required) + "\"");
        }
        Coefficient coeff;
        coeff.user = as_index(c["user"], "coefficients.user");
        coeff.index = as_index_array(c["index"], "coefficients.index");
        coeff.value = as_real(c["value"], "coefficients.value");
        spec.coefficients.push_back(std::move(coeff));
    }
    spec.validate();

    if (root.contains("basis") != root.contains("input")) {
        throw ValidationError("problem: \"basis\" and \"input\" must be given together");
    }
    if (root.contains("basis")) {
        BasisSuite suite;
        if (!root["basis"].is_array() ||
            static_cast<Index>(root["basis"].size()) != spec.num_subfunctions) {
            throw ValidationError("basis must list one function per subfunction");
        }
        for (const auto& b : root["basis"]) {
            if (!b.is_object()) throw ValidationError("basis entries must be objects");
            reject_unknown(b, {"name", "params"}, "basis");
            if (!b.contains("name") || !b["name"].is_string())
                throw ValidationError("basis: missing or non-string \"name\"");
            BasisFunction f;
            f.kind = basis_kind_from_name(b["name"].get<std::string>());
            std::vector<double> params;
            if (b.contains("params")) {
                if (!b["params"].is_array()) throw ValidationError("basis params must be an array");
                for (const auto& p : b["params"]) params.push_back(as_real(p, "basis.params"));
            }
            if (f.kind == BasisKind::Affine) {
                if (params.size() != 2) throw ValidationError("affine basis needs params [scale, shift]");
                f.scale = params[0];
                f.shift = params[1];
            } else if (!params.empty()) {
                throw ValidationError("basis \"" + b["name"].get<std::string>() + "\" takes no params");
            }
            suite.functions.push_back(f);
        }
        if (!root["input"].is_array() || root["input"].empty())
            throw ValidationError("input must be a non-empty array of numbers");
        for (const auto& x : root["input"]) suite.input.push_back(as_real(x, "input"));
        out.basis = std::move(suite);
    }
    return out;
}

ProblemFile load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_problem(text);
    } catch (ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string factorization_to_string(const Factorization& fact, const TilePlan& plan) {
    json root;
    root["format_version"] = "1";
    root["N"] = fact.num_servers;
    root["tolerance"] = fact.tolerance;

    json d = json::array();
    for (Index k = 0; k < fact.decoding.rows(); ++k)
        for (Index n = 0; n < fact.num_servers; ++n) d.push_back(fact.decoding(k, n));
    root["D"] = std::move(d);

    json e = json::array();
    for (Index n = 0; n < fact.num_servers; ++n) {
        const auto& slice = fact.server_slices[static_cast<std::size_t>(n)];
        for (Index q = 0; q < slice.size(); ++q) {
            if (slice[q] == 0.0) continue;
            json entry;
            entry["server"] = n + 1;
            entry["index"] = multi_index(q + 1, slice.shape());
            entry["value"] = slice[q];
            e.push_back(std::move(entry));
        }
    }
    root["E"] = std::move(e);

    json tiles = json::array();
    for (std::size_t t = 0; t < plan.tiles.size(); ++t) {
        const Tile& tile = plan.tiles[t];
        json entry;
        entry["class"] = tile.tile_class;
        entry["i"] = tile.block;
        entry["j"] = tile.window;
        entry["Q"] = tile.active_modes;
        const IndexRange range = fact.tile_ranges[t];
        entry["cols"] = json::array({range.lo, range.hi});
        entry["rank"] = range.hi - range.lo + 1;
        tiles.push_back(std::move(entry));
    }
    root["tiles"] = std::move(tiles);
    return root.dump(2) + "\n";
}

void save_factorization(const Factorization& fact, const TilePlan& plan,
                        const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << factorization_to_string(fact, plan);
}

Factorization parse_factorization(const std::string& text, const ProblemSpec& spec) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("factorization: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("factorization: top level must be an object");
    reject_unknown(root, {"format_version", "N", "D", "E", "tiles", "tolerance"}, "factorization");
    if (!root.contains("format_version") || root["format_version"] != "1")
        throw ValidationError("factorization: unsupported format_version");
    for (const char* required : {"N", "D", "E", "tolerance"}) {
        if (!root.contains(required))
            throw ValidationError("factorization: missing member \"" + std::string(required) + "\"");
    }

    Factorization fact;
    fact.demand_shape = spec.demand_shape();
    fact.num_servers = as_index(root["N"], "N");
    if (fact.num_servers < 0) throw ValidationError("factorization: N must be nonnegative");
    fact.tolerance = as_real(root["tolerance"], "tolerance");

    const auto& d = root["D"];
    if (!d.is_array() || static_cast<Index>(d.size()) != spec.num_users * fact.num_servers)
        throw ValidationError("factorization: D must hold K*N numbers (row-major)");
    fact.decoding = Matrix::Zero(spec.num_users, fact.num_servers);
    Index pos = 0;
    for (Index k = 0; k < spec.num_users; ++k)
        for (Index n = 0; n < fact.num_servers; ++n)
            fact.decoding(k, n) = as_real(d[static_cast<std::size_t>(pos++)], "D");

    const Shape row_shape(std::vector<Index>(fact.demand_shape.dims().begin() + 1,
                                             fact.demand_shape.dims().end()));
    fact.server_slices.assign(static_cast<std::size_t>(fact.num_servers), DenseTensor(row_shape));
    if (!root["E"].is_array()) throw ValidationError("factorization: E must be an array");
    for (const auto& entry : root["E"]) {
        if (!entry.is_object()) throw ValidationError("factorization: E entries must be objects");
        reject_unknown(entry, {"server", "index", "value"}, "factorization.E");
        const Index n = as_index(entry.at("server"), "E.server");
        if (n < 1 || n > fact.num_servers) throw ValidationError("factorization: E.server out of range");
        const auto idx = as_index_array(entry.at("index"), "E.index");
        const double value = as_real(entry.at("value"), "E.value");
        fact.server_slices[static_cast<std::size_t>(n - 1)].at(
            std::span<const Index>(idx.data(), idx.size())) = value;
    }
    return fact;
}

Factorization load_factorization(const std::filesystem::path& path, const ProblemSpec& spec) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_factorization(text, spec);
    } catch (ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string report_to_string(const RunReport& report) {
    json root;
    root["format_version"] = "1";
    root["K"] = report.num_users;
    root["N"] = report.num_servers;
    root["rate"] = report.rate;
    json normalized;
    normalized["gamma"] = report.declared_normalized.computation;
    normalized["delta"] = report.declared_normalized.communication;
    normalized["lambda"] = report.declared_normalized.multiplication;
    root["normalized_constraints"] = std::move(normalized);

    json bounds;
    if (report.bound_constructive) bounds["constructive"] = *report.bound_constructive;
    if (report.bound_general) bounds["general"] = *report.bound_general;
    if (report.bound_simplified) bounds["simplified"] = *report.bound_simplified;
    bounds["class_counts"] = report.class_counts;
    root["bounds"] = std::move(bounds);

    if (report.baseline) {
        json baseline;
        baseline["servers"] = report.baseline->value;
        baseline["integral"] = report.baseline->integral;
        baseline["T"] = report.baseline_granularity;
        if (report.num_servers > 0)
            baseline["ratio_vs_tensor"] = report.baseline->value / static_cast<double>(report.num_servers);
        root["baseline"] = std::move(baseline);
    }
    if (report.residual) root["residual"] = *report.residual;
    if (report.costs) {
        json achieved;
        achieved["Gamma"] = report.costs->computation_achieved;
        achieved["Delta"] = report.costs->communication_achieved;
        achieved["Lambda"] = report.costs->window_achieved;
        root["achieved"] = std::move(achieved);
        root["per_server_multiplications"] = report.costs->per_server_multiplications;
        root["total_multiplications"] = report.costs->total_multiplications;
    }
    if (report.max_rel_error) root["max_rel_error"] = *report.max_rel_error;
    return root.dump(2) + "\n";
}

void save_report(const RunReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << report_to_string(report);
}

}  // namespace tenfact
