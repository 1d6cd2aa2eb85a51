#include "rcc/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rcc/commands.hpp"
#include "rcc/models.hpp"
#include "rcc/moduli.hpp"
#include "rcc/prng.hpp"
#include "rcc/spectral.hpp"
#include "rcc/tolerances.hpp"

namespace rcc {

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(3);
    ss << v;
    return ss.str();
}

SelftestItem make_item(std::string id, std::string title) {
    SelftestItem item;
    item.id = std::move(id);
    item.title = std::move(title);
    return item;
}

SelftestItem check_lemma2_bound() {
    SelftestItem item = make_item("AC1", "block eigenvalue bound over 1000 seeded Hermitian matrices");
    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < 1000; ++t) {
        SplitMix64 rng(1001 + t);
        const std::size_t n_blocks = 2 + static_cast<std::size_t>(rng.next_below(3));
        BlockHermitian bh = random_block_hermitian(rng.next_u64(), n_blocks, 30);
        Lemma2Result r = lemma2_bound_check(bh.h, bh.partition);
        min_slack = std::min(min_slack, r.lambda_min_actual - r.lambda_min_bound);
        if (!r.pass) {
            item.detail = "violation at trial " + std::to_string(t);
            return item;
        }
    }
    if (min_slack < -tol::scaled(1e-9)) {
        item.detail = "min slack " + fmt(min_slack);
        return item;
    }
    // injected equality case: H = [[2,1],[1,2]], scalar blocks
    Lemma2Result eq = lemma2_bound_check(DenseMatrix{{2.0, 1.0}, {1.0, 2.0}}, {1, 1});
    const double eq_slack = std::abs(eq.lambda_min_actual - eq.lambda_min_bound);
    if (eq_slack > tol::scaled(1e-12)) {
        item.detail = "equality case slack " + fmt(eq_slack);
        return item;
    }
    item.pass = true;
    item.detail = "min slack " + fmt(min_slack) + ", equality slack " + fmt(eq_slack);
    return item;
}

SelftestItem check_gamma_equivalences() {
    SelftestItem item = make_item("AC2", "gamma via SVD vs A*A eigenvalues vs Rayleigh sampling");
    SplitMix64 rng(2002);
    double worst_eig_gap = 0.0, worst_rayleigh = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < 200; ++t) {
        const std::size_t m = 3 + rng.next_below(10);
        const std::size_t n = 3 + rng.next_below(10);
        DenseMatrix a(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                a(i, j) = Complex{rng.next_signed(), rng.next_signed()};

        GammaResult g = gamma(OperatorRep(Dense{a}));
        const double gv = g.value.value();

        std::vector<double> sv = svd_values(a);
        const double cut = tol::rank_tol(m, n, sv.front());
        std::size_t rank = 0;
        for (double v : sv)
            if (v > cut) ++rank;
        DenseMatrix gram = a.adjoint() * a;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                Complex v = 0.5 * (gram(i, j) + std::conj(gram(j, i)));
                gram(i, j) = v;
                gram(j, i) = std::conj(v);
            }
        // smallest of the top-(rank) eigenvalues of A*A, matching the rank cut
        std::vector<double> eigs = eigh_values(gram);
        const double min_eig = eigs[eigs.size() - rank];
        worst_eig_gap = std::max(worst_eig_gap, std::abs(gv - std::sqrt(min_eig)));

        // Rayleigh sampling in the numerical cokernel never undercuts gamma
        SingularTriplets tri = svd_right_vectors(a);
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < tri.values.size(); ++i)
            if (tri.values[i] > cut) keep.push_back(i);
        DenseMatrix vr = tri.right_vectors.select_columns(keep);
        DenseMatrix avr = a * vr;  // ||A (Vr u)|| = ||(A Vr) u||
        const std::size_t r = vr.cols();
        std::vector<Complex> u(r);
        for (std::size_t s = 0; s < 10000; ++s) {
            double norm2 = 0.0;
            for (auto& z : u) {
                z = Complex{rng.next_signed(), rng.next_signed()};
                norm2 += std::norm(z);
            }
            if (norm2 == 0.0) continue;
            const double inv = 1.0 / std::sqrt(norm2);
            double len2 = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                Complex acc = 0.0;
                for (std::size_t k = 0; k < r; ++k) acc += avr(i, k) * u[k];
                len2 += std::norm(acc);
            }
            worst_rayleigh = std::min(worst_rayleigh, std::sqrt(len2) * inv - gv);
        }
    }
    if (worst_eig_gap > tol::scaled(1e-9)) {
        item.detail = "svd/eig gap " + fmt(worst_eig_gap);
        return item;
    }
    if (worst_rayleigh < -tol::scaled(1e-8)) {
        item.detail = "Rayleigh undercut " + fmt(worst_rayleigh);
        return item;
    }
    item.pass = true;
    item.detail = "max |gamma - sqrt(min eig)| = " + fmt(worst_eig_gap);
    return item;
}

SelftestItem check_m_e_proposition() {
    SelftestItem item = make_item("AC3", "m_e via sigma_e equals the brute-force oracle limit");
    SplitMix64 rng(3003);
    double worst = 0.0;
    for (std::size_t t = 0; t < 50; ++t) {
        EPDiag d;
        const std::size_t head_len = rng.next_below(4);
        for (std::size_t i = 0; i < head_len; ++i)
            d.head.push_back(-2.0 + 4.0 * rng.next_double());
        const std::size_t period = 1 + rng.next_below(4);
        for (std::size_t i = 0; i < period; ++i)
            d.tail_period.push_back(0.1 + 2.4 * rng.next_double());
        OperatorRep rep((EPDiag(d)));

        const double exact = m_e(rep).value();
        const double oracle = m_e_bruteforce_oracle(rep, head_len + 2, 600);
        worst = std::max(worst, std::abs(exact - oracle));
        // oracle is nondecreasing in the rank budget
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r <= head_len + 2; ++r) {
            const double v = m_e_bruteforce_oracle(rep, r, 600);
            if (v < prev - 1e-15) {
                item.detail = "oracle not monotone at trial " + std::to_string(t);
                return item;
            }
            prev = v;
        }
    }
    if (worst > tol::scaled(1e-9)) {
        item.detail = "max |m_e - oracle| = " + fmt(worst);
        return item;
    }
    item.pass = true;
    item.detail = "max |m_e - oracle| = " + fmt(worst);
    return item;
}

SelftestItem check_constant_angle_end_to_end() {
    SelftestItem item = make_item("AC4", "constant-angle model cos 0.5: certificate and Gram spectra");
    TwoSubspaceSystem model = two_subspace_system(AngleModel{{}, {0.5}, {}});
    CertificateInputs inputs = compute_inputs(model.system);
    Verdict v = certify(model.system, inputs);
    if (!v.certified || std::abs(v.lambda_min_m - 0.5) > tol::scaled(1e-12)) {
        item.detail = "lambda_min " + fmt(v.lambda_min_m);
        return item;
    }
    for (std::size_t n : {std::size_t{50}, std::size_t{200}, std::size_t{800}}) {
        GramAssembly g = assemble_gram(model.system, n);
        std::vector<double> ev = eigh_values(g.gram);
        std::vector<double> expected = model.gram_eigs(n);
        if (ev.size() != expected.size()) {
            item.detail = "Gram dimension mismatch at N=" + std::to_string(n);
            return item;
        }
        double gap = 0.0;
        for (std::size_t i = 0; i < ev.size(); ++i)
            gap = std::max(gap, std::abs(ev[i] - expected[i]));
        if (gap > tol::scaled(1e-10)) {
            item.detail = "spectrum gap " + fmt(gap) + " at N=" + std::to_string(n);
            return item;
        }
    }
    item.pass = true;
    item.detail = "lambda_min = " + fmt(v.lambda_min_m) + ", spectra match {0.5, 1.5}";
    return item;
}

SelftestItem check_graph_example() {
    SelftestItem item = make_item("AC5", "graph example with entries 2^-j: eps = 1, kernel growth");
    EPDiag a;
    a.tail_period = {0.0};
    a.decay = GeometricDecay{{1.0}, 0.5};
    SystemSpec system = graph_example(OperatorRep(std::move(a)));
    CertificateInputs inputs = compute_inputs(system);
    if (inputs.eps_ub[0][1] != 1.0) {
        item.detail = "eps = " + fmt(inputs.eps_ub[0][1]);
        return item;
    }
    Verdict v = certify(system, inputs);
    if (v.certified) {
        item.detail = "unexpected certification";
        return item;
    }
    KernelTrace trace = kernel_dimension_estimate(system, {50, 100, 200, 400});
    for (std::size_t i = 1; i < trace.counts.size(); ++i)
        if (trace.counts[i] <= trace.counts[i - 1]) {
            item.detail = "kernel counts not strictly increasing";
            return item;
        }
    item.pass = true;
    std::string counts;
    for (std::size_t c : trace.counts) counts += std::to_string(c) + " ";
    item.detail = "eps = 1 exactly, kernel counts " + counts;
    return item;
}

SelftestItem check_theorem_a_limit() {
    SelftestItem item = make_item("AC6", "disjoint-tail projections: eps = 0, certified for every cap");
    std::vector<CoordinatePattern> patterns = {
        {{}, {1, 0, 0}}, {{}, {0, 1, 0}}, {{1, 1, 1}, {0}}};
    CoordinateSystem cs = coordinate_projection_system(patterns);
    CertificateInputs inputs = compute_inputs(cs.system);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (inputs.eps_ub[i][j] != 0.0) {
                item.detail = "nonzero eps";
                return item;
            }
    if (!inputs.gamma_lb[2].is_infinite()) {
        item.detail = "finite-rank projection should have gamma_e = inf";
        return item;
    }
    for (double cap : {2.0, 1e3, 1e6}) {
        CertificateMatrix cm = build_certificate_matrix(inputs, cap);
        if (!(cm.lambda_min > tol::pd_boundary())) {
            item.detail = "not certified at cap " + fmt(cap);
            return item;
        }
    }
    Verdict v = certify(cs.system, inputs);
    if (!v.certified || !v.gamma_cap) {
        item.detail = "default-cap verdict not certified";
        return item;
    }
    item.pass = true;
    item.detail = "all eps exactly 0, certified with caps 2, 1e3, 1e6";
    return item;
}

SelftestItem check_diag_dominance_fast_path() {
    SelftestItem item = make_item("AC7", "n=3, eps=0.4 system: diagonal dominance, lambda_min 0.2");
    // three unit vectors in R^3 with pairwise inner product 0.4
    const double c = 0.4;
    const double p = std::sqrt(1.0 - c);
    const double q = (-p + std::sqrt(p * p + 3.0 * c)) / 3.0;
    std::vector<OperatorRep> ops;
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<double> u(3, q);
        u[i] += p;
        DenseMatrix proj(3, 3);
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t s = 0; s < 3; ++s) proj(r, s) = u[r] * u[s];
        EPBlock b;
        b.d = 3;
        b.tail_period = {proj};
        ops.push_back(OperatorRep(std::move(b)));
    }
    SystemSpec system = make_system(std::move(ops));
    CertificateInputs inputs = compute_inputs(system);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            if (std::abs(inputs.eps_ub[i][j] - 0.4) > tol::scaled(1e-12)) {
                item.detail = "eps off: " + fmt(inputs.eps_ub[i][j]);
                return item;
            }
    Verdict v = certify(system, inputs);
    if (!v.certified || v.fast_path != FastPath::diag_dominance) {
        item.detail = "fast path not taken";
        return item;
    }
    if (std::abs(v.lambda_min_m - 0.2) > tol::scaled(1e-12)) {
        item.detail = "lambda_min " + fmt(v.lambda_min_m);
        return item;
    }
    item.pass = true;
    item.detail = "diag-dominant, lambda_min = " + fmt(v.lambda_min_m);
    return item;
}

SelftestItem check_weyl_invariance() {
    SelftestItem item = make_item("AC8", "100 finite-rank perturbations: essential data unchanged");
    SplitMix64 rng(8008);
    for (std::size_t t = 0; t < 100; ++t) {
        EPDiag base;
        const std::size_t head_len = rng.next_below(4);
        for (std::size_t i = 0; i < head_len; ++i)
            base.head.push_back(-2.0 + 4.0 * rng.next_double());
        const std::size_t period = 1 + rng.next_below(3);
        for (std::size_t i = 0; i < period; ++i)
            base.tail_period.push_back(-1.5 + 3.0 * rng.next_double());
        if (rng.next_below(2) == 0) {
            GeometricDecay g;
            g.ratio = -0.9 + 1.8 * rng.next_double();
            for (std::size_t i = 0; i < period; ++i)
                g.coeffs.push_back(-1.0 + 2.0 * rng.next_double());
            base.decay = std::move(g);
        }
        OperatorRep base_rep((EPDiag(base)));

        FiniteRankPerturb f;
        f.base = std::make_shared<const OperatorRep>(base_rep);
        const std::size_t rank = 1 + rng.next_below(3);
        for (std::size_t r = 0; r < rank; ++r) {
            std::vector<std::pair<std::size_t, Complex>> sup;
            const std::size_t nnz = 1 + rng.next_below(4);
            for (std::size_t s = 0; s < nnz; ++s)
                sup.emplace_back(rng.next_below(40), Complex{rng.next_signed(), 0.0});
            SparseVector v(std::move(sup));
            f.left.push_back(v);
            f.right.push_back(v);  // v v* keeps the perturbation self-adjoint
        }
        OperatorRep perturbed((FiniteRankPerturb(f)));

        EssentialSpectrumSet sb = essential_spectrum(base_rep);
        EssentialSpectrumSet sp = essential_spectrum(perturbed);
        if (sb.points != sp.points || sb.finite_dimensional != sp.finite_dimensional) {
            item.detail = "essential spectrum changed at trial " + std::to_string(t);
            return item;
        }
        if (essential_norm(base_rep).value != essential_norm(perturbed).value) {
            item.detail = "essential norm changed at trial " + std::to_string(t);
            return item;
        }
    }
    item.pass = true;
    item.detail = "spectra and norms identical on all 100 cases";
    return item;
}

SelftestItem check_boundary_strictness() {
    SelftestItem item = make_item("AC9", "cos -> 1 decay model: lambda_min 0 is not certified");
    AngleModel model;
    model.tail_cos_period = {1.0};
    model.decay = AngleModel::Decay{{-1.0}, 0.5};  // cos theta_k = 1 - 2^-k
    TwoSubspaceSystem sys = two_subspace_system(model);
    CertificateInputs inputs = compute_inputs(sys.system);
    CertificateMatrix cm = build_certificate_matrix(inputs);
    if (std::abs(cm.lambda_min) > tol::scaled(1e-12)) {
        item.detail = "lambda_min " + fmt(cm.lambda_min);
        return item;
    }
    Verdict v = certify(sys.system, inputs);
    if (v.certified) {
        item.detail = "boundary case wrongly certified";
        return item;
    }
    item.pass = true;
    item.detail = "lambda_min = " + fmt(cm.lambda_min) + ", not certified";
    return item;
}

SelftestItem check_fuzz_determinism() {
    SelftestItem item = make_item("AC10", "fuzz-lemma2 summaries are byte-identical across runs");
    CommandResult r1 = cmd_fuzz_lemma2(200, 424242, 4, 12);
    CommandResult r2 = cmd_fuzz_lemma2(200, 424242, 4, 12);
    if (r1.exit_code != 0 || r2.exit_code != 0) {
        item.detail = "fuzz run failed";
        return item;
    }
    if (r1.out != r2.out) {
        item.detail = "summaries differ";
        return item;
    }
    item.pass = true;
    item.detail = "identical summaries over 200 trials";
    return item;
}

}  // namespace

std::vector<SelftestItem> run_selftest() {
    return {
        check_lemma2_bound(),       check_gamma_equivalences(), check_m_e_proposition(),
        check_constant_angle_end_to_end(), check_graph_example(), check_theorem_a_limit(),
        check_diag_dominance_fast_path(), check_weyl_invariance(),    check_boundary_strictness(),
        check_fuzz_determinism(),
    };
}

}  // namespace rcc
