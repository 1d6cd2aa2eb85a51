#include <cstdio>
#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "rcc/commands.hpp"
#include "rcc/document.hpp"
#include "rcc/errors.hpp"
#include "rcc/models.hpp"

using namespace rcc;
using nlohmann::json;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
};

const char* kTwoProjectionDoc = R"({
  "version": 1,
  "system": {
    "model": {"name": "two_subspace", "tail_cos_period": [0.5]}
  },
  "analysis": {"truncate": [10, 20]}
})";

const char* kGraphDoc = R"({
  "version": 1,
  "system": {
    "model": {"name": "graph_example",
              "a_diag": {"tail_period": [0], "decay": {"coeffs": [1], "ratio": 0.5}}}
  }
})";

}  // namespace

TEST_CASE("document: operator round trip through JSON") {
    EPDiag d;
    d.head = {Complex{1.0, -2.0}};
    d.tail_period = {0.25, 0.5};
    d.decay = GeometricDecay{{Complex{0.0, 1.0}, 0.0}, -0.5};
    OperatorRep rep(std::move(d));
    OperatorRep back = operator_from_json_string(operator_to_json_string(rep));
    const EPDiag* r = back.get_if<EPDiag>();
    REQUIRE(r);
    CHECK(r->head[0] == Complex{1.0, -2.0});
    CHECK(r->tail_period[1] == Complex{0.5});
    REQUIRE(r->decay.has_value());
    CHECK(r->decay->ratio == -0.5);
    CHECK(r->decay->coeffs[0] == Complex{0.0, 1.0});

    FiniteRankPerturb f;
    f.base = std::make_shared<const OperatorRep>(rep);
    f.left = {SparseVector({{3, Complex{2.0, 1.0}}})};
    f.right = {SparseVector({{0, 1.0}})};
    OperatorRep frp_back =
        operator_from_json_string(operator_to_json_string(OperatorRep(std::move(f))));
    CHECK(frp_back.get_if<FiniteRankPerturb>());
}

TEST_CASE("document: schema violations carry a line reference or path") {
    CHECK_THROWS_AS(parse_document("{"), DocumentError);
    try {
        parse_document("{\n  \"version\": 1,\n  \"bad\"\n}");
        FAIL("expected DocumentError");
    } catch (const DocumentError& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_document(R"({"version": 2, "system": {}})"), DocumentError);
    CHECK_THROWS_AS(parse_document(R"({"version": 1})"), DocumentError);
    // both or neither of operators/model
    CHECK_THROWS_AS(parse_document(R"({"version": 1, "system": {}})"), DocumentError);
    // non-increasing truncation sizes
    CHECK_THROWS_AS(parse_document(R"({
      "version": 1,
      "system": {"model": {"name": "two_subspace", "tail_cos_period": [0.5]}},
      "analysis": {"truncate": [20, 20]}
    })"),
                    DocumentError);
}

TEST_CASE("document: explicit operators, overrides, allocation") {
    SystemDocument doc = parse_document(R"({
      "version": 1,
      "system": {
        "operators": [
          {"type": "ep_diag", "tail_period": [1, 0]},
          {"type": "ep_diag", "tail_period": [0, 1]}
        ],
        "labels": ["P_even", "P_odd"],
        "truncation_allocation": [1, 1]
      },
      "overrides": {"gamma": [null, "inf"], "eps": [{"i": 0, "j": 1, "value": 0.25}]},
      "analysis": {"truncate": [8, 16], "gap_eps": 0.5}
    })");
    CHECK(doc.system.labels[0] == "P_even");
    REQUIRE(doc.overrides.gamma.size() == 2);
    CHECK_FALSE(doc.overrides.gamma[0].has_value());
    CHECK(doc.overrides.gamma[1]->is_infinite());
    REQUIRE(doc.overrides.eps.size() == 1);
    CHECK(doc.overrides.eps[0].value == 0.25);
    CHECK(doc.analysis.gap_eps == 0.5);

    CertificateInputs in = compute_inputs(doc.system, doc.overrides);
    CHECK(in.eps_ub[0][1] == 0.25);
    CHECK(in.eps_provenance[0][1] == Provenance::user_supplied);
    CHECK(in.gamma_lb[1].is_infinite());
}

TEST_CASE("cmd_certify: exit codes 0, 1, 2") {
    TempFile good("rcc_good.json", kTwoProjectionDoc);
    CommandResult ok = cmd_certify(good.path.string(), std::nullopt);
    CHECK(ok.exit_code == 0);
    json rep = json::parse(ok.out);
    CHECK(rep["verdict"]["certified"] == true);
    CHECK(rep["certificate"]["lambda_min"].get<double>() == doctest::Approx(0.5));

    TempFile bad("rcc_bad.json", kGraphDoc);
    CommandResult not_cert = cmd_certify(bad.path.string(), std::nullopt);
    CHECK(not_cert.exit_code == 1);
    json rep2 = json::parse(not_cert.out);
    CHECK(rep2["verdict"]["certified"] == false);
    CHECK(rep2["inputs"]["eps"][0][1].get<double>() == 1.0);

    TempFile malformed("rcc_malformed.json", "{ not json");
    CHECK(cmd_certify(malformed.path.string(), std::nullopt).exit_code == 2);
    CHECK(cmd_certify("/nonexistent/rcc.json", std::nullopt).exit_code == 2);
}

TEST_CASE("cmd_certify: report JSON round-trips structurally") {
    TempFile good("rcc_roundtrip.json", kTwoProjectionDoc);
    CommandResult r = cmd_certify(good.path.string(), std::nullopt);
    json parsed = json::parse(r.out);
    json reparsed = json::parse(parsed.dump());
    CHECK(parsed == reparsed);
    // infinities serialize as the string "inf"
    CHECK(parsed["operators"][0]["gamma_e"].is_number());
    TempFile fin("rcc_inf.json", R"({
      "version": 1,
      "system": {"operators": [
        {"type": "dense", "rows": 2, "cols": 2, "entries": [1, 0, 0, 1]}
      ]}
    })");
    CommandResult rf = cmd_certify(fin.path.string(), std::nullopt);
    json jf = json::parse(rf.out);
    CHECK(jf["operators"][0]["gamma_e"] == "inf");
    CHECK(jf["verdict"]["gamma_cap"].is_number());
}

TEST_CASE("cmd_analyze: diagnostics, CSV sidecar, kernel trajectory") {
    TempFile good("rcc_analyze.json", kTwoProjectionDoc);
    auto out_path = (std::filesystem::temp_directory_path() / "rcc_report.json").string();
    CommandResult r = cmd_analyze(good.path.string(), {10, 20, 30}, std::nullopt, out_path);
    CHECK(r.exit_code == 0);
    std::ifstream in(out_path);
    REQUIRE(in.good());
    json rep = json::parse(in);
    REQUIRE(rep.contains("diagnostics"));
    CHECK(rep["diagnostics"]["per_n"].size() == 3);
    CHECK(rep["diagnostics"]["per_n"][0]["kernel_count"] == 0);
    CHECK(rep["diagnostics"]["per_n"][0]["gap"]["gap_empty"] == true);
    CHECK(rep["diagnostics"]["kernel_trace"]["stabilized"] == true);

    std::ifstream csv(out_path + ".spectra.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "N,index,eigenvalue");
    std::size_t rows = 0;
    std::string line;
    bool lf_only = true;
    while (std::getline(csv, line)) {
        if (!line.empty() && line.back() == '\r') lf_only = false;
        CHECK(line.find(',') != std::string::npos);
        CHECK(line.find(';') == std::string::npos);
        ++rows;
    }
    CHECK(lf_only);
    CHECK(rows == 2 * (10 + 20 + 30));  // Gram dimension 2N per truncation
    std::filesystem::remove(out_path);
    std::filesystem::remove(out_path + ".spectra.csv");

    // growing kernel counts in the degenerating example
    TempFile graph("rcc_graph.json", kGraphDoc);
    CommandResult rg = cmd_analyze(graph.path.string(), {50, 100, 150}, std::nullopt,
                                   std::nullopt);
    CHECK(rg.exit_code == 1);
    json jg = json::parse(rg.out);
    auto counts = jg["diagnostics"]["kernel_trace"]["counts"];
    CHECK(counts[0].get<std::size_t>() < counts[1].get<std::size_t>());
    CHECK(counts[1].get<std::size_t>() < counts[2].get<std::size_t>());
    CHECK(jg["diagnostics"]["kernel_trace"]["stabilized"] == false);

    // analyze falls back to the document's truncate list, and errors out
    // when neither the flag nor the document provides one
    CommandResult rfall = cmd_analyze(good.path.string(), {}, std::nullopt, std::nullopt);
    CHECK(rfall.exit_code == 0);
    CommandResult re = cmd_analyze(graph.path.string(), {}, std::nullopt, std::nullopt);
    CHECK(re.exit_code == 2);
}

TEST_CASE("cmd_fuzz_lemma2: determinism and parameter validation") {
    CommandResult r1 = cmd_fuzz_lemma2(50, 99, 4, 10);
    CommandResult r2 = cmd_fuzz_lemma2(50, 99, 4, 10);
    CHECK(r1.exit_code == 0);
    CHECK(r1.out == r2.out);
    CHECK(r1.out.find("violations=0") != std::string::npos);
    CHECK(cmd_fuzz_lemma2(0, 1, 4, 10).exit_code == 2);
    CHECK(cmd_fuzz_lemma2(10, 1, 1, 10).exit_code == 2);
}

TEST_CASE("document tolerance_scale moves the certification boundary") {
    // lambda_min = 5e-11: above the default 1e-12 boundary, below a 1e-9 one
    const char* doc_tpl = R"({
      "version": 1,
      "system": {"operators": [
        {"type": "ep_diag", "tail_period": [1, 0]},
        {"type": "ep_diag", "tail_period": [0, 1]}
      ]},
      "overrides": {"eps": [{"i": 0, "j": 1, "value": 0.99999999995}]}%s
    })";
    char with_scale[1024], without_scale[1024];
    std::snprintf(without_scale, sizeof(without_scale), doc_tpl, "");
    std::snprintf(with_scale, sizeof(with_scale), doc_tpl,
                  ",\n      \"analysis\": {\"tolerance_scale\": 1000.0}");

    TempFile f1("rcc_boundary1.json", without_scale);
    CHECK(cmd_certify(f1.path.string(), std::nullopt).exit_code == 0);
    TempFile f2("rcc_boundary2.json", with_scale);
    CHECK(cmd_certify(f2.path.string(), std::nullopt).exit_code == 1);
}

TEST_CASE("document: model stanzas for graph and coordinate systems") {
    SystemDocument g = parse_document(R"({
      "version": 1,
      "system": {"model": {"name": "graph_example", "a_diag": {"tail_period": [1]}}}
    })");
    CHECK(g.system.operators.size() == 2);
    CHECK(g.model_name == "graph_example");

    SystemDocument c = parse_document(R"({
      "version": 1,
      "system": {"model": {"name": "coordinate_projections",
                           "patterns": [{"period": [1, 0]}, {"period": [0, 1]}]}}
    })");
    CHECK(c.system.operators.size() == 2);
    CertificateInputs in = compute_inputs(c.system);
    CHECK(in.eps_ub[0][1] == 0.0);

    CHECK_THROWS_AS(parse_document(R"({
      "version": 1, "system": {"model": {"name": "unknown_model"}}
    })"),
                    DocumentError);
}

TEST_CASE("cmd_analyze: constant-angle smallest nonzero eigenvalue is stable in N") {
    TempFile good("rcc_smallest.json", kTwoProjectionDoc);
    CommandResult r = cmd_analyze(good.path.string(), {50, 100}, std::nullopt, std::nullopt);
    CHECK(r.exit_code == 0);
    json rep = json::parse(r.out);
    for (const auto& d : rep["diagnostics"]["per_n"])
        CHECK(d["smallest_nonzero"].get<double>() == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("cmd_analyze: CSV sidecar is byte-stable across runs") {
    TempFile good("rcc_stable.json", kTwoProjectionDoc);
    auto out1 = (std::filesystem::temp_directory_path() / "rcc_s1.json").string();
    auto out2 = (std::filesystem::temp_directory_path() / "rcc_s2.json").string();
    REQUIRE(cmd_analyze(good.path.string(), {15, 30}, std::nullopt, out1).exit_code == 0);
    REQUIRE(cmd_analyze(good.path.string(), {15, 30}, std::nullopt, out2).exit_code == 0);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(out1 + ".spectra.csv") == slurp(out2 + ".spectra.csv"));
    for (const auto& p : {out1, out2, out1 + ".spectra.csv", out2 + ".spectra.csv"})
        std::filesystem::remove(p);
}

TEST_CASE("cmd_selftest enumerates every acceptance item id") {
    CommandResult r = cmd_selftest();
    CHECK(r.exit_code == 0);
    for (int i = 1; i <= 10; ++i) {
        const std::string id = "AC" + std::to_string(i) + " ";
        CHECK(r.out.find(id) != std::string::npos);
    }
}
