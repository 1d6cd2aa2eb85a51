#include "rcc/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace rcc {

using nlohmann::json;

namespace {

json extended_to_json(const ExtendedReal& v) {
    if (v.is_infinite()) return "inf";
    return v.value();
}

json number_or_inf(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

json provenance_list(const std::vector<Provenance>& ps) {
    json out = json::array();
    for (Provenance p : ps) out.push_back(to_string(p));
    return out;
}

json gap_to_json(const Lemma1Result& g) {
    return {{"gap_empty", g.gap_empty},
            {"smallest_above_tol", number_or_inf(g.smallest_above_tol)},
            {"zero_tol", g.zero_tol},
            {"count_below_tol", g.count_below_tol}};
}

// shortest round-trip decimal text, locale independent
std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

std::string report_to_json_string(const Report& report, int indent) {
    json ops = json::array();
    for (std::size_t k = 0; k < report.moduli.size(); ++k) {
        const ModuliReport& m = report.moduli[k];
        ops.push_back({{"label", k < report.labels.size() ? report.labels[k] : ""},
                       {"gamma", extended_to_json(m.gamma)},
                       {"gamma_e", extended_to_json(m.gamma_e)},
                       {"ess_norm", m.ess_norm},
                       {"range_closed", m.range_closed},
                       {"cokernel_finite", m.cokernel_finite},
                       {"exact",
                        {{"gamma", m.gamma_exact},
                         {"gamma_e", m.gamma_e_exact},
                         {"ess_norm", m.ess_norm_exact}}}});
    }

    json gammas = json::array();
    for (const auto& g : report.inputs.gamma_lb) gammas.push_back(extended_to_json(g));
    json eps = json::array();
    json eps_prov = json::array();
    for (std::size_t i = 0; i < report.inputs.eps_ub.size(); ++i) {
        eps.push_back(report.inputs.eps_ub[i]);
        eps_prov.push_back(provenance_list(report.inputs.eps_provenance[i]));
    }

    json matrix = json::array();
    for (std::size_t i = 0; i < report.certificate.m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < report.certificate.m.cols(); ++j)
            row.push_back(report.certificate.m(i, j).real());
        matrix.push_back(row);
    }

    json verdict = {
        {"certified", report.verdict.certified},
        {"lambda_min_m", report.verdict.lambda_min_m},
        {"fast_path",
         report.verdict.fast_path == FastPath::diag_dominance ? "diag_dominance" : "none"},
        {"claims",
         {{"sum_closed_guaranteed", report.verdict.sum_closed_guaranteed},
          {"essentially_linearly_independent_guaranteed",
           report.verdict.essentially_linearly_independent_guaranteed}}}};
    if (report.verdict.gamma_cap) {
        verdict["gamma_cap"] = *report.verdict.gamma_cap;
        verdict["capped"] = report.verdict.capped;
    }

    json doc = {{"version", 1},
                {"operators", ops},
                {"inputs",
                 {{"gamma", gammas},
                  {"gamma_provenance", provenance_list(report.inputs.gamma_provenance)},
                  {"eps", eps},
                  {"eps_provenance", eps_prov}}},
                {"certificate",
                 {{"m", matrix},
                  {"lambda_min", report.certificate.lambda_min},
                  {"diag_dominant", report.certificate.diag_dominant}}},
                {"verdict", verdict},
                {"timings", {{"total_ms", report.total_ms}}}};
    if (report.certificate.gamma_cap) {
        doc["certificate"]["gamma_cap"] = *report.certificate.gamma_cap;
        doc["certificate"]["capped"] = report.certificate.capped;
    }

    if (!report.diagnostics.empty()) {
        json per_n = json::array();
        for (const auto& d : report.diagnostics) {
            json entry = {{"n", d.n},
                          {"gram_dim", d.gram_dim},
                          {"kernel_count", d.kernel_count},
                          {"zero_tol", d.zero_tol},
                          {"smallest_nonzero", number_or_inf(d.smallest_nonzero)}};
            entry["gap"] = d.gap ? gap_to_json(*d.gap) : json(nullptr);
            per_n.push_back(entry);
        }
        json diag = {{"per_n", per_n}};
        if (report.kernel_trace) {
            diag["kernel_trace"] = {{"n", report.kernel_trace->n_values},
                                    {"counts", report.kernel_trace->counts},
                                    {"stabilized", report.kernel_trace->stabilized},
                                    {"stable_value", report.kernel_trace->stable_value}};
        }
        doc["diagnostics"] = diag;
    }

    return doc.dump(indent);
}

std::string report_spectra_csv(const Report& report) {
    std::string out = "N,index,eigenvalue\n";
    for (const auto& d : report.diagnostics) {
        for (std::size_t i = 0; i < d.gram_eigs.size(); ++i) {
            out += std::to_string(d.n);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += format_double(d.gram_eigs[i]);
            out += '\n';
        }
    }
    return out;
}

}  // namespace rcc
