#include "mcx/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mcx {

using nlohmann::json;

std::string format_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SpecError(path, what);
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

cd entry_at(const json& j, const std::string& path) {
    if (j.is_number()) return cd{j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) fail(path, "matrix entry must be [re, im] or a number");
    return cd{number_at(j[0], path + "/0"), number_at(j[1], path + "/1")};
}

Matrix matrix_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "matrix must be a nonempty array of rows");
    int rows = static_cast<int>(j.size());
    if (!j[0].is_array() || j[0].empty()) fail(path + "/0", "matrix row must be a nonempty array");
    int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        std::string row_path = path + "/" + std::to_string(i);
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
            fail(row_path, "ragged matrix row");
        for (int k = 0; k < cols; ++k)
            m(i, k) = entry_at(j[i][k], row_path + "/" + std::to_string(k));
    }
    return m;
}

HermitianMatrix hermitian_at(const json& j, const std::string& path) {
    Matrix m = matrix_at(j, path);
    try {
        return HermitianMatrix::from_matrix(m);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) fail(path + "/" + key, "missing required field");
    return j.at(key);
}

std::vector<HermitianMatrix> hermitian_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of matrices");
    std::vector<HermitianMatrix> out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(hermitian_at(j[i], path + "/" + std::to_string(i)));
    return out;
}

std::vector<std::vector<HermitianMatrix>> hermitian_grid(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
    std::vector<std::vector<HermitianMatrix>> out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(hermitian_list(j[i], path + "/" + std::to_string(i)));
    return out;
}

}  // namespace

EnsembleSpec parse_spec_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail("", "top level must be an object");
    const json& fam = field(j, "family", "");
    if (!fam.is_string()) fail("/family", "expected a string");
    std::string name = fam.get<std::string>();

    if (name == "independent_sum") {
        const json& sup = field(j, "supports", "");
        if (!sup.is_array() || sup.empty()) fail("/supports", "expected a nonempty array");
        IndependentSumPayload p;
        for (size_t k = 0; k < sup.size(); ++k) {
            std::string base = "/supports/" + std::to_string(k);
            if (!sup[k].is_array() || sup[k].empty()) fail(base, "expected a nonempty array");
            std::vector<WeightedMatrix> outcomes;
            for (size_t i = 0; i < sup[k].size(); ++i) {
                std::string path = base + "/" + std::to_string(i);
                const json& o = sup[k][i];
                if (!o.is_object()) fail(path, "expected {\"weight\", \"matrix\"}");
                double w = number_at(field(o, "weight", path), path + "/weight");
                outcomes.push_back({w, hermitian_at(field(o, "matrix", path), path + "/matrix")});
            }
            p.supports.push_back(std::move(outcomes));
        }
        return EnsembleSpec(Family::independent_sum, std::move(p));
    }
    if (name == "rademacher_series") {
        RademacherSeriesPayload p;
        p.coefficients = hermitian_list(field(j, "coefficients", ""), "/coefficients");
        return EnsembleSpec(Family::rademacher_series, std::move(p));
    }
    if (name == "combinatorial_sum") {
        CombinatorialSumPayload p;
        p.array = hermitian_grid(field(j, "array", ""), "/array");
        return EnsembleSpec(Family::combinatorial_sum, std::move(p));
    }
    if (name == "rademacher_chaos") {
        RademacherChaosPayload p;
        p.array = hermitian_grid(field(j, "array", ""), "/array");
        return EnsembleSpec(Family::rademacher_chaos, std::move(p));
    }
    if (name == "sampling_without_replacement") {
        SamplingWithoutReplacementPayload p;
        p.pool = hermitian_list(field(j, "pool", ""), "/pool");
        const json& s = field(j, "sample_count", "");
        if (!s.is_number_integer()) fail("/sample_count", "expected an integer");
        p.sample_count = s.get<int>();
        return EnsembleSpec(Family::sampling_without_replacement, std::move(p));
    }
    if (name == "permuted_inner_product") {
        PermutedInnerProductPayload p;
        const json& left = field(j, "left", "");
        const json& right = field(j, "right", "");
        if (!left.is_array() || left.empty()) fail("/left", "expected a nonempty array");
        if (!right.is_array()) fail("/right", "expected an array");
        for (size_t i = 0; i < left.size(); ++i)
            p.left.push_back(matrix_at(left[i], "/left/" + std::to_string(i)));
        for (size_t i = 0; i < right.size(); ++i)
            p.right.push_back(matrix_at(right[i], "/right/" + std::to_string(i)));
        return EnsembleSpec(Family::permuted_inner_product, std::move(p));
    }
    fail("/family", "unknown family '" + name + "'");
}

EnsembleSpec load_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_json(buf.str());
}

std::string bound_set_json(const BoundSet& b, const std::vector<double>& t_grid, int indent) {
    std::string pad(indent, ' ');
    std::string inner(indent + 2, ' ');
    std::ostringstream out;
    out << "{\n";
    out << inner << "\"provenance\": " << json_quote(b.provenance) << ",\n";
    out << inner << "\"d\": " << b.dimension << ",\n";
    out << inner << "\"mean_upper\": " << format_g(b.mean_upper) << ",\n";
    out << inner << "\"mean_lower\": "
        << (b.mean_lower ? format_g(*b.mean_lower) : std::string("null")) << ",\n";
    out << inner << "\"tail\": [";
    for (size_t i = 0; i < t_grid.size(); ++i) {
        if (i) out << ", ";
        out << "[" << format_g(t_grid[i]) << ", " << format_g(b.tail_upper(t_grid[i])) << "]";
    }
    out << "]\n" << pad << "}";
    return out.str();
}

}  // namespace mcx
