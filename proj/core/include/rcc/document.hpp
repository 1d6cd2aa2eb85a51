// document.hpp — the JSON input document (schema version 1).
//
// {
//   "version": 1,
//   "system": {
//     "operators": [ <operator>, ... ]      // exactly one of operators/model
//     "model": { "name": ..., ... },
//     "labels": [...],                      // optional
//     "truncation_allocation": [...]        // optional
//   },
//   "overrides": { "gamma": [...], "eps": [{"i":0,"j":1,"value":0.5}] },
//   "analysis": { "truncate": [...], "gap_eps": r, "zero_tol": r }
// }
//
// Complex scalars are numbers or [re, im] pairs; +inf is the string "inf".
// Parse failures throw DocumentError with a line reference.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcc/certify.hpp"
#include "rcc/operator_rep.hpp"

namespace rcc {

struct AnalysisOptions {
    std::vector<std::size_t> truncate;  // strictly increasing when present
    std::optional<double> gap_eps;
    std::optional<double> zero_tol;
    std::optional<double> tolerance_scale;  // multiplies every tolerance for this run
};

struct SystemDocument {
    int version = 1;
    SystemSpec system;
    Overrides overrides;
    AnalysisOptions analysis;
    std::optional<std::string> model_name;  // set when built from a model stanza
};

SystemDocument parse_document(const std::string& text);
SystemDocument load_document(const std::string& path);

// OperatorRep <-> JSON text (the same encoding used inside documents)
std::string operator_to_json_string(const OperatorRep& rep);
OperatorRep operator_from_json_string(const std::string& text);

}  // namespace rcc
