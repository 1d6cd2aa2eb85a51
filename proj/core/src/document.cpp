#include "rcc/document.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rcc/errors.hpp"
#include "rcc/models.hpp"

namespace rcc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw DocumentError(where + ": " + what);
}

Complex complex_from_json(const json& j, const std::string& where) {
    if (j.is_number()) return Complex{j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Complex{j[0].get<double>(), j[1].get<double>()};
    fail(where, "expected a number or [re, im]");
}

json complex_to_json(Complex z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

std::vector<Complex> complex_list(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    std::vector<Complex> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(complex_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

DenseMatrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols,
                             const std::string& where) {
    std::vector<Complex> entries = complex_list(j, where);
    if (entries.size() != rows * cols) fail(where, "expected rows*cols entries");
    return DenseMatrix(rows, cols, std::move(entries));
}

SparseVector sparse_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of [index, value] pairs");
    std::vector<std::pair<std::size_t, Complex>> support;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& e = j[i];
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned())
            fail(at, "expected [index, value]");
        support.emplace_back(e[0].get<std::size_t>(), complex_from_json(e[1], at));
    }
    return SparseVector(std::move(support));
}

json sparse_to_json(const SparseVector& v) {
    json out = json::array();
    for (const auto& [idx, val] : v.support)
        out.push_back(json::array({idx, complex_to_json(val)}));
    return out;
}

OperatorRep operator_from_json(const json& j, const std::string& where);

std::optional<GeometricDecay> decay_from_json(const json& j, const std::string& where) {
    if (!j.contains("decay") || j["decay"].is_null()) return std::nullopt;
    const json& d = j["decay"];
    if (!d.is_object() || !d.contains("coeffs") || !d.contains("ratio"))
        fail(where + ".decay", "expected {coeffs, ratio}");
    GeometricDecay g;
    g.coeffs = complex_list(d["coeffs"], where + ".decay.coeffs");
    if (!d["ratio"].is_number()) fail(where + ".decay.ratio", "expected a number");
    g.ratio = d["ratio"].get<double>();
    return g;
}

OperatorRep operator_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        fail(where, "expected an operator object with a \"type\"");
    const std::string type = j["type"].get<std::string>();
    try {
        if (type == "dense") {
            if (!j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
                fail(where, "dense operator needs rows, cols, entries");
            return Dense{matrix_from_json(j["entries"], j["rows"].get<std::size_t>(),
                                          j["cols"].get<std::size_t>(), where + ".entries")};
        }
        if (type == "ep_diag") {
            EPDiag d;
            if (j.contains("head")) d.head = complex_list(j["head"], where + ".head");
            if (!j.contains("tail_period")) fail(where, "ep_diag needs tail_period");
            d.tail_period = complex_list(j["tail_period"], where + ".tail_period");
            d.decay = decay_from_json(j, where);
            return OperatorRep(std::move(d));
        }
        if (type == "ep_block") {
            EPBlock b;
            if (!j.contains("d") || !j["d"].is_number_unsigned())
                fail(where, "ep_block needs a block size d");
            b.d = j["d"].get<std::size_t>();
            if (j.contains("head"))
                for (std::size_t i = 0; i < j["head"].size(); ++i)
                    b.head.push_back(matrix_from_json(
                        j["head"][i], b.d, b.d, where + ".head[" + std::to_string(i) + "]"));
            if (!j.contains("tail_period")) fail(where, "ep_block needs tail_period");
            for (std::size_t i = 0; i < j["tail_period"].size(); ++i)
                b.tail_period.push_back(
                    matrix_from_json(j["tail_period"][i], b.d, b.d,
                                     where + ".tail_period[" + std::to_string(i) + "]"));
            return OperatorRep(std::move(b));
        }
        if (type == "finite_rank_perturb") {
            if (!j.contains("base")) fail(where, "finite_rank_perturb needs a base");
            FiniteRankPerturb f;
            f.base = std::make_shared<const OperatorRep>(
                operator_from_json(j["base"], where + ".base"));
            if (j.contains("left"))
                for (std::size_t i = 0; i < j["left"].size(); ++i)
                    f.left.push_back(sparse_from_json(
                        j["left"][i], where + ".left[" + std::to_string(i) + "]"));
            if (j.contains("right"))
                for (std::size_t i = 0; i < j["right"].size(); ++i)
                    f.right.push_back(sparse_from_json(
                        j["right"][i], where + ".right[" + std::to_string(i) + "]"));
            return OperatorRep(std::move(f));
        }
        if (type == "direct_sum") {
            DirectSum s;
            if (!j.contains("parts") || !j["parts"].is_array())
                fail(where, "direct_sum needs parts");
            for (std::size_t i = 0; i < j["parts"].size(); ++i)
                s.parts.push_back(operator_from_json(
                    j["parts"][i], where + ".parts[" + std::to_string(i) + "]"));
            if (j.contains("allocation"))
                s.allocation = j["allocation"].get<std::vector<std::size_t>>();
            return OperatorRep(std::move(s));
        }
    } catch (const DocumentError&) {
        throw;
    } catch (const Error& e) {
        fail(where, e.what());
    }
    fail(where, "unknown operator type \"" + type + "\"");
}

json operator_to_json(const OperatorRep& rep) {
    return std::visit(
        [](const auto& node) -> json {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Dense>) {
                json entries = json::array();
                for (Complex z : node.m.entries()) entries.push_back(complex_to_json(z));
                return {{"type", "dense"},
                        {"rows", node.m.rows()},
                        {"cols", node.m.cols()},
                        {"entries", entries}};
            } else if constexpr (std::is_same_v<T, EPDiag>) {
                json out{{"type", "ep_diag"}};
                json head = json::array();
                for (Complex z : node.head) head.push_back(complex_to_json(z));
                out["head"] = head;
                json tail = json::array();
                for (Complex z : node.tail_period) tail.push_back(complex_to_json(z));
                out["tail_period"] = tail;
                if (node.decay) {
                    json coeffs = json::array();
                    for (Complex z : node.decay->coeffs) coeffs.push_back(complex_to_json(z));
                    out["decay"] = {{"coeffs", coeffs}, {"ratio", node.decay->ratio}};
                }
                return out;
            } else if constexpr (std::is_same_v<T, EPBlock>) {
                auto block_json = [](const DenseMatrix& b) {
                    json entries = json::array();
                    for (Complex z : b.entries()) entries.push_back(complex_to_json(z));
                    return entries;
                };
                json head = json::array(), tail = json::array();
                for (const auto& b : node.head) head.push_back(block_json(b));
                for (const auto& b : node.tail_period) tail.push_back(block_json(b));
                return {{"type", "ep_block"}, {"d", node.d}, {"head", head},
                        {"tail_period", tail}};
            } else if constexpr (std::is_same_v<T, FiniteRankPerturb>) {
                json left = json::array(), right = json::array();
                for (const auto& v : node.left) left.push_back(sparse_to_json(v));
                for (const auto& v : node.right) right.push_back(sparse_to_json(v));
                return {{"type", "finite_rank_perturb"},
                        {"base", operator_to_json(*node.base)},
                        {"left", left},
                        {"right", right}};
            } else {
                json parts = json::array();
                for (const auto& p : node.parts) parts.push_back(operator_to_json(p));
                return {{"type", "direct_sum"}, {"parts", parts},
                        {"allocation", node.allocation}};
            }
        },
        rep.node());
}

std::vector<double> double_list(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(where + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

SystemSpec system_from_model(const json& m, std::optional<std::string>& model_name) {
    if (!m.contains("name") || !m["name"].is_string())
        fail("system.model", "model stanza needs a name");
    const std::string name = m["name"].get<std::string>();
    model_name = name;
    if (name == "two_subspace") {
        AngleModel model;
        if (m.contains("head_cos")) model.head_cos = double_list(m["head_cos"], "model.head_cos");
        if (!m.contains("tail_cos_period")) fail("system.model", "two_subspace needs tail_cos_period");
        model.tail_cos_period = double_list(m["tail_cos_period"], "model.tail_cos_period");
        if (m.contains("decay") && !m["decay"].is_null()) {
            AngleModel::Decay d;
            d.coeffs = double_list(m["decay"]["coeffs"], "model.decay.coeffs");
            d.ratio = m["decay"]["ratio"].get<double>();
            model.decay = std::move(d);
        }
        return two_subspace_system(model).system;
    }
    if (name == "graph_example") {
        if (!m.contains("a_diag")) fail("system.model", "graph_example needs a_diag");
        json a = m["a_diag"];
        if (!a.contains("type")) a["type"] = "ep_diag";
        return graph_example(operator_from_json(a, "model.a_diag"));
    }
    if (name == "coordinate_projections") {
        if (!m.contains("patterns") || !m["patterns"].is_array())
            fail("system.model", "coordinate_projections needs patterns");
        std::vector<CoordinatePattern> patterns;
        for (const auto& p : m["patterns"]) {
            CoordinatePattern pat;
            if (p.contains("head")) pat.head = p["head"].get<std::vector<int>>();
            pat.period = p["period"].get<std::vector<int>>();
            patterns.push_back(std::move(pat));
        }
        return coordinate_projection_system(patterns).system;
    }
    fail("system.model", "unknown model \"" + name + "\"");
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace

SystemDocument parse_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DocumentError("line " + std::to_string(line_of_byte(text, e.byte)) + ": " +
                            e.what());
    }
    if (!j.is_object()) throw DocumentError("document: top level must be an object");
    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != 1)
        throw DocumentError("document: version must be the integer 1");
    if (!j.contains("system") || !j["system"].is_object())
        throw DocumentError("document: missing system object");

    SystemDocument doc;
    const json& sys = j["system"];
    const bool has_ops = sys.contains("operators");
    const bool has_model = sys.contains("model");
    if (has_ops == has_model)
        throw DocumentError("system: exactly one of operators/model must be present");

    std::vector<std::string> labels;
    if (sys.contains("labels")) labels = sys["labels"].get<std::vector<std::string>>();
    std::vector<std::size_t> allocation;
    if (sys.contains("truncation_allocation"))
        allocation = sys["truncation_allocation"].get<std::vector<std::size_t>>();

    try {
        if (has_ops) {
            if (!sys["operators"].is_array() || sys["operators"].empty())
                throw DocumentError("system.operators: expected a nonempty array");
            std::vector<OperatorRep> ops;
            for (std::size_t i = 0; i < sys["operators"].size(); ++i)
                ops.push_back(operator_from_json(sys["operators"][i],
                                                 "system.operators[" + std::to_string(i) + "]"));
            doc.system = make_system(std::move(ops), std::move(labels), std::move(allocation));
        } else {
            doc.system = system_from_model(sys["model"], doc.model_name);
            if (!labels.empty()) {
                if (labels.size() != doc.system.operators.size())
                    throw DocumentError("system.labels: count mismatch");
                doc.system.labels = std::move(labels);
            }
            if (!allocation.empty()) {
                if (allocation.size() != doc.system.operators.size())
                    throw DocumentError("system.truncation_allocation: count mismatch");
                doc.system.truncation_allocation = std::move(allocation);
            }
        }
    } catch (const DocumentError&) {
        throw;
    } catch (const Error& e) {
        throw DocumentError(std::string("system: ") + e.what());
    }

    const std::size_t n = doc.system.operators.size();
    if (j.contains("overrides") && !j["overrides"].is_null()) {
        const json& ov = j["overrides"];
        if (ov.contains("gamma")) {
            if (!ov["gamma"].is_array() || ov["gamma"].size() != n)
                throw DocumentError("overrides.gamma: expected one entry per operator");
            for (const auto& g : ov["gamma"]) {
                if (g.is_null())
                    doc.overrides.gamma.push_back(std::nullopt);
                else if (g.is_string() && g.get<std::string>() == "inf")
                    doc.overrides.gamma.push_back(ExtendedReal::infinity());
                else if (g.is_number())
                    doc.overrides.gamma.push_back(ExtendedReal(g.get<double>()));
                else
                    throw DocumentError("overrides.gamma: entries are numbers, \"inf\" or null");
            }
        }
        if (ov.contains("eps")) {
            if (!ov["eps"].is_array()) throw DocumentError("overrides.eps: expected an array");
            for (const auto& e : ov["eps"]) {
                if (!e.is_object() || !e.contains("i") || !e.contains("j") ||
                    !e.contains("value"))
                    throw DocumentError("overrides.eps: entries are {i, j, value}");
                Overrides::EpsEntry entry{e["i"].get<std::size_t>(), e["j"].get<std::size_t>(),
                                          e["value"].get<double>()};
                if (entry.i >= n || entry.j >= n || entry.i == entry.j)
                    throw DocumentError("overrides.eps: indices out of range");
                doc.overrides.eps.push_back(entry);
            }
        }
    }

    if (j.contains("analysis") && !j["analysis"].is_null()) {
        const json& an = j["analysis"];
        if (an.contains("truncate")) {
            doc.analysis.truncate = an["truncate"].get<std::vector<std::size_t>>();
            for (std::size_t i = 0; i < doc.analysis.truncate.size(); ++i) {
                if (doc.analysis.truncate[i] == 0)
                    throw DocumentError("analysis.truncate: sizes must be >= 1");
                if (i > 0 && doc.analysis.truncate[i] <= doc.analysis.truncate[i - 1])
                    throw DocumentError("analysis.truncate: sizes must be strictly increasing");
            }
        }
        if (an.contains("gap_eps") && !an["gap_eps"].is_null()) {
            doc.analysis.gap_eps = an["gap_eps"].get<double>();
            if (!(*doc.analysis.gap_eps > 0.0))
                throw DocumentError("analysis.gap_eps: must be positive");
        }
        if (an.contains("zero_tol") && !an["zero_tol"].is_null()) {
            doc.analysis.zero_tol = an["zero_tol"].get<double>();
            if (*doc.analysis.zero_tol < 0.0)
                throw DocumentError("analysis.zero_tol: must be >= 0");
        }
        if (an.contains("tolerance_scale") && !an["tolerance_scale"].is_null()) {
            doc.analysis.tolerance_scale = an["tolerance_scale"].get<double>();
            if (!(*doc.analysis.tolerance_scale > 0.0))
                throw DocumentError("analysis.tolerance_scale: must be positive");
        }
    }
    return doc;
}

SystemDocument load_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DocumentError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str());
}

std::string operator_to_json_string(const OperatorRep& rep) {
    return operator_to_json(rep).dump();
}

OperatorRep operator_from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DocumentError(std::string("operator: ") + e.what());
    }
    return operator_from_json(j, "operator");
}

}  // namespace rcc
