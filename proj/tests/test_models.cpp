#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "rcc/certify.hpp"
#include "rcc/models.hpp"
#include "rcc/moduli.hpp"
#include "rcc/spectral.hpp"

using namespace rcc;

TEST_CASE("two_subspace_system: orthogonal lines certify with Gram spectrum {1}") {
    TwoSubspaceSystem sys = two_subspace_system(AngleModel{{}, {0.0}, {}});
    CHECK(sys.ess_cos == 0.0);
    CertificateInputs in = compute_inputs(sys.system);
    CHECK(in.eps_ub[0][1] == 0.0);
    CHECK(certify(sys.system, in).certified);
    GramAssembly g = assemble_gram(sys.system, 16);
    for (double ev : eigh_values(g.gram)) CHECK(ev == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two_subspace_system: constant cos 0.5 matches its analytic oracle") {
    TwoSubspaceSystem sys = two_subspace_system(AngleModel{{}, {0.5}, {}});
    CHECK(sys.ess_cos == 0.5);
    OperatorRep product =
        compose(adjoint(sys.system.operators[0]), sys.system.operators[1]);
    CHECK(essential_norm(product).value == doctest::Approx(0.5).epsilon(1e-14));
    std::vector<double> eigs = sys.gram_eigs(3);
    REQUIRE(eigs.size() == 6);
    CHECK(eigs.front() == 0.5);
    CHECK(eigs.back() == 1.5);
}

TEST_CASE("two_subspace_system: oracle agreement without and with decay") {
    // without decay the computed eps equals the oracle exactly
    SplitMix64 rng(777);
    for (int t = 0; t < 20; ++t) {
        AngleModel model;
        const std::size_t p = 1 + rng.next_below(3);
        for (std::size_t i = 0; i < p; ++i)
            model.tail_cos_period.push_back(rng.next_double());
        const std::size_t h = rng.next_below(3);
        for (std::size_t i = 0; i < h; ++i) model.head_cos.push_back(rng.next_double());
        TwoSubspaceSystem sys = two_subspace_system(model);
        OperatorRep product =
            compose(adjoint(sys.system.operators[0]), sys.system.operators[1]);
        CHECK(essential_norm(product).value ==
              doctest::Approx(sys.ess_cos).epsilon(1e-12));
    }
    // with decay: within 1e-12
    AngleModel dec;
    dec.tail_cos_period = {0.6, 0.3};
    dec.decay = AngleModel::Decay{{0.2, -0.1}, 0.75};
    TwoSubspaceSystem sys = two_subspace_system(dec);
    OperatorRep product = compose(adjoint(sys.system.operators[0]), sys.system.operators[1]);
    CHECK(std::abs(essential_norm(product).value - 0.6) < 1e-12);
}

TEST_CASE("two_subspace_system: truncated Gram equals the 1 +- cos multiset") {
    AngleModel model;
    model.head_cos = {0.9, 0.1};
    model.tail_cos_period = {0.5, 0.25};
    model.decay = AngleModel::Decay{{0.3, 0.0}, 0.5};
    TwoSubspaceSystem sys = two_subspace_system(model);
    GramAssembly g = assemble_gram(sys.system, 64);
    std::vector<double> ev = eigh_values(g.gram);
    std::vector<double> expected = sys.gram_eigs(64);
    REQUIRE(ev.size() == expected.size());
    for (std::size_t i = 0; i < ev.size(); ++i)
        CHECK(std::abs(ev[i] - expected[i]) < 1e-10);
}

TEST_CASE("graph_example: zero, constant, and vanishing diagonals") {
    // A = 0: both subspaces coincide, every angle cosine is 1
    EPDiag zero;
    zero.tail_period = {0.0};
    SystemSpec coincident = graph_example(OperatorRep(std::move(zero)));
    OperatorRep prod =
        compose(adjoint(coincident.operators[0]), coincident.operators[1]);
    CHECK(essential_norm(prod).value == 1.0);

    // identity tail: cos = 1/sqrt(2), certified
    EPDiag ones;
    ones.tail_period = {1.0};
    SystemSpec sys = graph_example(OperatorRep(std::move(ones)));
    CertificateInputs in = compute_inputs(sys);
    CHECK(in.eps_ub[0][1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(certify(sys, in).certified);

    // entries 2^-j: not certified
    EPDiag dec;
    dec.tail_period = {0.0};
    dec.decay = GeometricDecay{{1.0}, 0.5};
    SystemSpec bad = graph_example(OperatorRep(std::move(dec)));
    CertificateInputs in_bad = compute_inputs(bad);
    CHECK(in_bad.eps_ub[0][1] == 1.0);
    CHECK_FALSE(certify(bad, in_bad).certified);
}

TEST_CASE("graph_example: per-block cosine formula 1/sqrt(1+|a|^2)") {
    EPDiag d;
    d.head = {2.0, 0.5};
    d.tail_period = {1.0, 3.0};
    SystemSpec sys = graph_example(OperatorRep(std::move(d)));
    OperatorRep prod = compose(adjoint(sys.operators[0]), sys.operators[1]);
    const EPBlock* blocks = prod.get_if<EPBlock>();
    REQUIRE(blocks);
    auto expect_cos = [](double a) { return 1.0 / std::sqrt(1.0 + a * a); };
    CHECK(spectral_norm(ep_block_at(*blocks, 0)) ==
          doctest::Approx(expect_cos(2.0)).epsilon(1e-14));
    CHECK(spectral_norm(ep_block_at(*blocks, 1)) ==
          doctest::Approx(expect_cos(0.5)).epsilon(1e-14));
    CHECK(essential_norm(prod).value == doctest::Approx(expect_cos(1.0)).epsilon(1e-14));
}

TEST_CASE("graph_example: invertible tails certify, vanishing tails never do") {
    SplitMix64 rng(888);
    for (int t = 0; t < 10; ++t) {
        EPDiag d;
        const std::size_t p = 1 + rng.next_below(3);
        for (std::size_t i = 0; i < p; ++i)
            d.tail_period.push_back(0.5 + 2.0 * rng.next_double());  // bounded away from 0
        SystemSpec sys = graph_example(OperatorRep(std::move(d)));
        CertificateInputs in = compute_inputs(sys);
        CHECK(certify(sys, in).certified);
    }
    for (double ratio : {0.5, 0.75, 0.9}) {
        EPDiag d;
        d.tail_period = {0.0};
        d.decay = GeometricDecay{{1.0}, ratio};
        SystemSpec sys = graph_example(OperatorRep(std::move(d)));
        CertificateInputs in = compute_inputs(sys);
        CHECK_FALSE(certify(sys, in).certified);
    }
}

TEST_CASE("coordinate_projection_system: oracle matches the computed eps") {
    // disjoint tails
    CoordinateSystem disjoint = coordinate_projection_system(
        {{{}, {1, 0}}, {{}, {0, 1}}});
    CHECK(disjoint.eps_oracle[0][1] == 0.0);
    CertificateInputs in = compute_inputs(disjoint.system);
    CHECK(in.eps_ub[0][1] == 0.0);
    CHECK(certify(disjoint.system, in).certified);

    // overlapping tails on two of three patterns
    CoordinateSystem overlap = coordinate_projection_system(
        {{{}, {1, 0, 0}}, {{}, {1, 1, 0}}, {{}, {0, 0, 1}}});
    CHECK(overlap.eps_oracle[0][1] == 1.0);
    CHECK(overlap.eps_oracle[0][2] == 0.0);
    CertificateInputs in2 = compute_inputs(overlap.system);
    CHECK(in2.eps_ub[0][1] == 1.0);
    CHECK_FALSE(certify(overlap.system, in2).certified);

    // finite head overlap only: compact products, certified
    CoordinateSystem heads = coordinate_projection_system(
        {{{1, 1}, {1, 0}}, {{1, 1}, {0, 1}}});
    CHECK(heads.eps_oracle[0][1] == 0.0);
    CertificateInputs in3 = compute_inputs(heads.system);
    CHECK(in3.eps_ub[0][1] == 0.0);
    CHECK(certify(heads.system, in3).certified);
}

TEST_CASE("random_block_hermitian: deterministic, Hermitian, in range") {
    BlockHermitian a = random_block_hermitian(1234, 3, 5);
    BlockHermitian b = random_block_hermitian(1234, 3, 5);
    REQUIRE(a.partition == b.partition);
    CHECK((a.h - b.h).max_abs() == 0.0);
    CHECK(a.h.is_hermitian(0.0));
    std::size_t total = 0;
    for (std::size_t p : a.partition) {
        CHECK(p >= 1);
        CHECK(p <= 5);
        total += p;
    }
    CHECK(total == a.h.rows());
    BlockHermitian c = random_block_hermitian(1235, 3, 5);
    CHECK((a.h.rows() != c.h.rows() || (a.h - c.h).max_abs() != 0.0));
}
