#include "rcc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcc/errors.hpp"
#include "rcc/spectral.hpp"
#include "rcc/tolerances.hpp"

namespace rcc {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::exact: return "exact";
        case Provenance::user_supplied: return "user-supplied";
        case Provenance::estimate: return "estimate";
    }
    return "?";
}

SystemSpec make_system(std::vector<OperatorRep> operators, std::vector<std::string> labels,
                       std::vector<std::size_t> truncation_allocation) {
    if (operators.empty()) throw Error("SystemSpec: at least one operator required");
    const SpaceDesc codomain = codomain_space(operators.front());
    for (std::size_t k = 1; k < operators.size(); ++k)
        if (codomain_space(operators[k]) != codomain)
            throw IncompatibleShapes("SystemSpec: operators do not share a codomain");
    if (labels.empty()) {
        labels.reserve(operators.size());
        for (std::size_t k = 0; k < operators.size(); ++k)
            labels.push_back("A" + std::to_string(k + 1));
    } else if (labels.size() != operators.size()) {
        throw Error("SystemSpec: label count mismatch");
    }
    if (truncation_allocation.empty()) {
        truncation_allocation.assign(operators.size(), 1);
    } else if (truncation_allocation.size() != operators.size()) {
        throw Error("SystemSpec: truncation_allocation count mismatch");
    }
    for (std::size_t a : truncation_allocation)
        if (a == 0) throw Error("SystemSpec: truncation_allocation entries must be positive");
    return SystemSpec{std::move(operators), std::move(labels), std::move(truncation_allocation)};
}

CertificateInputs compute_inputs(const SystemSpec& system, const Overrides& overrides) {
    const std::size_t n = system.operators.size();
    if (n == 0) throw Error("compute_inputs: empty system");
    if (!overrides.gamma.empty() && overrides.gamma.size() != n)
        throw Error("compute_inputs: gamma override count mismatch");

    CertificateInputs inputs;
    inputs.gamma_lb.reserve(n);
    inputs.gamma_provenance.reserve(n);

    for (std::size_t k = 0; k < n; ++k) {
        GammaResult g = gamma(system.operators[k]);
        if (!g.range_closed || !(g.value > 0.0))
            throw HypothesisViolated("operator " + system.labels[k] +
                                     ": range is not closed (gamma = 0)");
        if (k < overrides.gamma.size() && overrides.gamma[k]) {
            const ExtendedReal& v = *overrides.gamma[k];
            if (!(v > 0.0))
                throw HypothesisViolated("operator " + system.labels[k] +
                                         ": gamma override must be positive");
            inputs.gamma_lb.push_back(v);
            inputs.gamma_provenance.push_back(Provenance::user_supplied);
        } else {
            GammaEResult ge = gamma_e(system.operators[k]);
            if (!(ge.value > 0.0))
                throw HypothesisViolated("operator " + system.labels[k] +
                                         ": gamma_e vanishes, hypothesis gamma_k > 0 fails");
            inputs.gamma_lb.push_back(ge.value);
            inputs.gamma_provenance.push_back(ge.exact ? Provenance::exact
                                                       : Provenance::estimate);
        }
    }

    inputs.eps_ub.assign(n, std::vector<double>(n, 0.0));
    inputs.eps_provenance.assign(n, std::vector<Provenance>(n, Provenance::exact));

    auto find_override = [&overrides](std::size_t i, std::size_t j) -> std::optional<double> {
        for (const auto& e : overrides.eps)
            if ((e.i == i && e.j == j) || (e.i == j && e.j == i)) return e.value;
        return std::nullopt;
    };

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double value = 0.0;
            Provenance prov = Provenance::exact;
            if (auto ov = find_override(i, j)) {
                if (*ov < 0.0) throw Error("compute_inputs: eps override must be >= 0");
                value = *ov;
                prov = Provenance::user_supplied;
            } else {
                try {
                    // both orders are valid upper bounds; max is the
                    // conservative symmetric choice
                    EssNormResult eij = essential_norm(
                        compose(adjoint(system.operators[i]), system.operators[j]));
                    EssNormResult eji = essential_norm(
                        compose(adjoint(system.operators[j]), system.operators[i]));
                    value = std::max(eij.value, eji.value);
                    if (!eij.exact || !eji.exact) prov = Provenance::estimate;
                } catch (const UnsupportedComposition&) {
                    throw MissingOverride("compute_inputs: product " + system.labels[i] +
                                          "* " + system.labels[j] +
                                          " is not composable; supply an eps override");
                }
            }
            inputs.eps_ub[i][j] = inputs.eps_ub[j][i] = value;
            inputs.eps_provenance[i][j] = inputs.eps_provenance[j][i] = prov;
        }
    return inputs;
}

CertificateMatrix build_certificate_matrix(const CertificateInputs& inputs,
                                           std::optional<double> cap_override) {
    const std::size_t n = inputs.size();
    if (n == 0) throw Error("build_certificate_matrix: empty inputs");
    if (inputs.eps_ub.size() != n) throw Error("build_certificate_matrix: eps size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (inputs.eps_ub[i].size() != n)
            throw Error("build_certificate_matrix: eps row size mismatch");
        if (inputs.eps_ub[i][i] != 0.0)
            throw Error("build_certificate_matrix: eps diagonal must be zero");
        for (std::size_t j = 0; j < n; ++j) {
            if (inputs.eps_ub[i][j] < 0.0)
                throw Error("build_certificate_matrix: eps entries must be >= 0");
            if (inputs.eps_ub[i][j] != inputs.eps_ub[j][i])
                throw Error("build_certificate_matrix: eps must be symmetric");
        }
        if (!(inputs.gamma_lb[i] > 0.0))
            throw HypothesisViolated("build_certificate_matrix: gamma_k must be positive");
    }

    CertificateMatrix out;
    bool any_infinite = false;
    double cap_base = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (inputs.gamma_lb[i].is_infinite())
            any_infinite = true;
        else
            cap_base = std::max(cap_base, inputs.gamma_lb[i].value());
        for (std::size_t j = 0; j < n; ++j) cap_base = std::max(cap_base, inputs.eps_ub[i][j]);
    }
    double cap = 0.0;
    if (any_infinite) {
        cap = cap_override ? *cap_override : 1e3 * cap_base;
        out.gamma_cap = cap;
    }

    out.m = DenseMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double gi = inputs.gamma_lb[i].value_or(cap);
        if (inputs.gamma_lb[i].is_infinite()) out.capped.push_back(i);
        out.m(i, i) = gi * gi;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) out.m(i, j) = -inputs.eps_ub[i][j];
    }
    out.lambda_min = eigh_values(out.m).front();

    out.diag_dominant = true;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row += inputs.eps_ub[i][j];
        const double gi = inputs.gamma_lb[i].value_or(cap);
        if (!(row < gi * gi)) {
            out.diag_dominant = false;
            break;
        }
    }
    return out;
}

Verdict certify(const SystemSpec& system, const CertificateInputs& inputs) {
    if (system.operators.size() != inputs.size())
        throw Error("certify: inputs size does not match the system");
    CertificateMatrix cm = build_certificate_matrix(inputs);
    Verdict v;
    v.lambda_min_m = cm.lambda_min;
    v.certified = cm.lambda_min > tol::pd_boundary();
    v.fast_path = cm.diag_dominant ? FastPath::diag_dominance : FastPath::none;
    v.sum_closed_guaranteed = v.certified;
    v.essentially_linearly_independent_guaranteed = v.certified;
    v.gamma_cap = cm.gamma_cap;
    v.capped = cm.capped;
    return v;
}

GramAssembly assemble_gram(const SystemSpec& system, std::size_t n) {
    if (n == 0) throw Error("assemble_gram: n must be >= 1");
    const std::size_t count = system.operators.size();
    std::vector<DenseMatrix> columns;
    columns.reserve(count);
    std::size_t codomain_dim = 0;
    GramAssembly out;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t nk = n * system.truncation_allocation[k];
        DenseMatrix tk = truncate(system.operators[k], nk);
        DenseMatrix pk = cokernel_injection(system.operators[k], nk);
        if (k == 0)
            codomain_dim = tk.rows();
        else if (tk.rows() != codomain_dim)
            throw TruncationUnavailable(
                "assemble_gram: codomain truncations differ across operators; "
                "adjust truncation_allocation");
        columns.push_back(tk * pk);
        out.block_sizes.push_back(pk.cols());
    }
    std::size_t total = 0;
    for (std::size_t s : out.block_sizes) total += s;
    out.gamma_factor = DenseMatrix(codomain_dim, total);
    std::size_t c0 = 0;
    for (const auto& col : columns) {
        for (std::size_t i = 0; i < codomain_dim; ++i)
            for (std::size_t j = 0; j < col.cols(); ++j)
                out.gamma_factor(i, c0 + j) = col(i, j);
        c0 += col.cols();
    }
    out.gram = out.gamma_factor.adjoint() * out.gamma_factor;
    // Gamma* Gamma is Hermitian; fold roundoff
    for (std::size_t i = 0; i < total; ++i)
        for (std::size_t j = i; j < total; ++j) {
            Complex v = 0.5 * (out.gram(i, j) + std::conj(out.gram(j, i)));
            out.gram(i, j) = v;
            out.gram(j, i) = std::conj(v);
        }
    return out;
}

KernelTrace kernel_dimension_estimate(const SystemSpec& system,
                                      const std::vector<std::size_t>& n_list,
                                      std::optional<double> zero_tol) {
    if (n_list.empty()) throw Error("kernel_dimension_estimate: empty n list");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw Error("kernel_dimension_estimate: n list must be strictly increasing");
    KernelTrace trace;
    trace.n_values = n_list;
    for (std::size_t nv : n_list) {
        GramAssembly g = assemble_gram(system, nv);
        if (g.gram.rows() == 0) {
            trace.counts.push_back(0);
            continue;
        }
        std::vector<double> ev = eigh_values(g.gram);
        const double norm = std::max(std::abs(ev.front()), std::abs(ev.back()));
        const double tol = zero_tol ? *zero_tol : tol::gram_zero_tol(g.gram.rows(), norm);
        std::size_t count = 0;
        for (double v : ev)
            if (v < tol) ++count;
        trace.counts.push_back(count);
    }
    const std::size_t window = std::min<std::size_t>(3, trace.counts.size());
    trace.stabilized = window >= 2;
    for (std::size_t i = trace.counts.size() - window; i + 1 < trace.counts.size(); ++i)
        if (trace.counts[i] != trace.counts[i + 1]) trace.stabilized = false;
    if (trace.stabilized) trace.stable_value = trace.counts.back();
    return trace;
}

Lemma1Result lemma1_gap_check(const SystemSpec& system, std::size_t n, double eps) {
    if (n == 0) throw Error("lemma1_gap_check: n must be >= 1");
    if (!(eps > 0.0)) throw Error("lemma1_gap_check: eps must be positive");
    DenseMatrix sum;
    bool first = true;
    for (std::size_t k = 0; k < system.operators.size(); ++k) {
        const std::size_t nk = n * system.truncation_allocation[k];
        DenseMatrix term;
        try {
            term = truncate(compose(system.operators[k], adjoint(system.operators[k])), nk);
        } catch (const UnsupportedComposition&) {
            DenseMatrix tk = truncate(system.operators[k], nk);
            term = tk * tk.adjoint();
        }
        if (first) {
            sum = std::move(term);
            first = false;
        } else {
            if (term.rows() != sum.rows())
                throw TruncationUnavailable(
                    "lemma1_gap_check: codomain truncations differ across operators");
            sum = sum + term;
        }
    }
    for (std::size_t i = 0; i < sum.rows(); ++i)
        for (std::size_t j = i; j < sum.cols(); ++j) {
            Complex v = 0.5 * (sum(i, j) + std::conj(sum(j, i)));
            sum(i, j) = v;
            sum(j, i) = std::conj(v);
        }
    std::vector<double> ev = eigh_values(sum);
    Lemma1Result out;
    const double norm = ev.empty() ? 0.0 : std::max(std::abs(ev.front()), std::abs(ev.back()));
    out.zero_tol = tol::gram_zero_tol(sum.rows(), norm);
    out.smallest_above_tol = std::numeric_limits<double>::infinity();
    out.gap_empty = true;
    for (double v : ev) {
        if (v <= out.zero_tol) {
            ++out.count_below_tol;
            continue;
        }
        out.smallest_above_tol = std::min(out.smallest_above_tol, v);
        if (v < eps) out.gap_empty = false;
    }
    return out;
}

Lemma2Result lemma2_bound_check(const DenseMatrix& h, const std::vector<std::size_t>& partition) {
    if (!h.is_square()) throw DimensionMismatch("lemma2_bound_check: matrix is not square");
    std::size_t total = 0;
    for (std::size_t p : partition) {
        if (p == 0) throw PartitionMismatch("lemma2_bound_check: zero block size");
        total += p;
    }
    if (total != h.rows())
        throw PartitionMismatch("lemma2_bound_check: partition does not sum to the dimension");

    const std::size_t n = partition.size();
    std::vector<std::size_t> offset(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + partition[i];

    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        DenseMatrix hii = h.block(offset[i], offset[i + 1], offset[i], offset[i + 1]);
        m(i, i) = eigh_values(hii).front();
        for (std::size_t j = i + 1; j < n; ++j) {
            DenseMatrix hij = h.block(offset[i], offset[i + 1], offset[j], offset[j + 1]);
            const double a = spectral_norm(hij);
            m(i, j) = -a;
            m(j, i) = -a;
        }
    }
    Lemma2Result out;
    out.lambda_min_actual = eigh_values(h).front();
    out.lambda_min_bound = eigh_values(m).front();
    out.pass = out.lambda_min_actual >= out.lambda_min_bound - tol::scaled(1e-9);
    return out;
}

}  // namespace rcc
