#include "rcc/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rcc/errors.hpp"
#include "rcc/spectral.hpp"
#include "rcc/tolerances.hpp"

namespace rcc {

namespace {

constexpr std::size_t kDecayEnumCap = 300000;  // per-channel safety bound

// smallest |entry| over the nonzero entries of one decaying tail channel,
// together with whether the channel forces gamma = 0 (entries accumulate at
// 0 without reaching it)
struct ChannelInfimum {
    double inf_nonzero = std::numeric_limits<double>::infinity();
    bool vanishing = false;  // tau = 0, coeff != 0, ratio != 0
    bool active = false;     // infinitely many nonzero entries
};

ChannelInfimum diag_channel_infimum(Complex tau, Complex coeff, double ratio,
                                    std::size_t first_j, std::size_t period) {
    ChannelInfimum out;
    const double atau = std::abs(tau);
    if (coeff == Complex{0.0} || ratio == 0.0) {
        // ratio 0: only the j = 0 entry differs from tau
        if (ratio == 0.0 && coeff != Complex{0.0} && first_j == 0) {
            const double v = std::abs(tau + coeff);
            if (v != 0.0) out.inf_nonzero = v;
            // remaining entries are exactly tau
            if (atau != 0.0) {
                out.inf_nonzero = std::min(out.inf_nonzero, atau);
                out.active = true;
            }
            return out;
        }
        if (atau != 0.0) {
            out.inf_nonzero = atau;
            out.active = true;
        }
        return out;
    }
    if (tau == Complex{0.0}) {
        // entries coeff * ratio^j are nonzero and tend to 0
        out.vanishing = true;
        out.active = true;
        out.inf_nonzero = 0.0;
        return out;
    }
    // enumerate until the decay term is negligible against |tau|
    out.active = true;
    const double cut = 0x1.0p-60 * atau;
    double scale = std::abs(coeff) * std::pow(std::abs(ratio), static_cast<double>(first_j));
    std::size_t iter = 0;
    for (std::size_t j = first_j; scale > cut && iter < kDecayEnumCap; j += period, ++iter) {
        const Complex e = tau + coeff * std::pow(ratio, static_cast<double>(j));
        const double v = std::abs(e);
        if (v != 0.0) out.inf_nonzero = std::min(out.inf_nonzero, v);
        scale *= std::pow(std::abs(ratio), static_cast<double>(period));
    }
    out.inf_nonzero = std::min(out.inf_nonzero, atau);
    return out;
}

GammaResult gamma_ep_diag(const EPDiag& d) {
    double inf_nonzero = std::numeric_limits<double>::infinity();
    bool vanishing = false;
    for (Complex h : d.head) {
        const double v = std::abs(h);
        if (v != 0.0) inf_nonzero = std::min(inf_nonzero, v);
    }
    const std::size_t p = d.tail_period.size();
    for (std::size_t m = 0; m < p; ++m) {
        const Complex coeff = d.decay ? d.decay->coeffs[m] : Complex{0.0};
        const double ratio = d.decay ? d.decay->ratio : 0.0;
        ChannelInfimum ci = diag_channel_infimum(d.tail_period[m], coeff, ratio, m, p);
        inf_nonzero = std::min(inf_nonzero, ci.inf_nonzero);
        vanishing = vanishing || ci.vanishing;
    }
    if (vanishing) return {ExtendedReal(0.0), false, true};
    if (std::isinf(inf_nonzero)) return {ExtendedReal::infinity(), true, true};
    return {ExtendedReal(inf_nonzero), true, true};
}

// nonzero singular values of a small structured block
std::vector<double> block_nonzero_singulars(const DenseMatrix& b) {
    std::vector<double> s = svd_values(b);
    if (s.empty() || s.front() == 0.0) return {};
    const double cut = tol::block_rank_tol(b.rows(), s.front());
    std::vector<double> out;
    for (double v : s)
        if (v > cut) out.push_back(v);
    return out;
}

GammaResult gamma_ep_block(const EPBlock& b) {
    double inf_nonzero = std::numeric_limits<double>::infinity();
    for (const auto& blk : b.head)
        for (double v : block_nonzero_singulars(blk)) inf_nonzero = std::min(inf_nonzero, v);
    for (const auto& blk : b.tail_period)
        for (double v : block_nonzero_singulars(blk)) inf_nonzero = std::min(inf_nonzero, v);
    if (std::isinf(inf_nonzero)) return {ExtendedReal::infinity(), true, true};
    return {ExtendedReal(inf_nonzero), true, true};
}

GammaResult gamma_dense(const DenseMatrix& m) {
    std::vector<double> s = svd_values(m);
    if (s.empty() || s.front() == 0.0) return {ExtendedReal::infinity(), true, true};
    const double cut = tol::rank_tol(m.rows(), m.cols(), s.front());
    double smallest = std::numeric_limits<double>::infinity();
    for (double v : s)
        if (v > cut) smallest = std::min(smallest, v);
    if (std::isinf(smallest)) return {ExtendedReal::infinity(), true, true};
    return {ExtendedReal(smallest), true, true};
}

// flagged truncation estimate for perturbed reps
GammaResult gamma_estimate(const OperatorRep& a) {
    std::size_t span = 0;
    if (const auto* f = a.get_if<FiniteRankPerturb>()) {
        for (const auto& v : f->left)
            if (!v.empty()) span = std::max(span, v.max_index() + 1);
        for (const auto& v : f->right)
            if (!v.empty()) span = std::max(span, v.max_index() + 1);
    }
    const std::size_t n = std::min<std::size_t>(512, 128 + span);
    DenseMatrix t = truncate(a, n);
    GammaResult g = gamma_dense(t);
    g.exact = false;
    return g;
}

}  // namespace

GammaResult gamma(const OperatorRep& a) {
    if (is_zero(a)) return {ExtendedReal::infinity(), true, true};
    return std::visit(
        [&a](const auto& node) -> GammaResult {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Dense>)
                return gamma_dense(node.m);
            else if constexpr (std::is_same_v<T, EPDiag>)
                return gamma_ep_diag(node);
            else if constexpr (std::is_same_v<T, EPBlock>)
                return gamma_ep_block(node);
            else if constexpr (std::is_same_v<T, FiniteRankPerturb>)
                return gamma_estimate(a);
            else {
                GammaResult out{ExtendedReal::infinity(), true, true};
                for (const auto& part : node.parts) {
                    GammaResult g = gamma(part);
                    out.value = min(out.value, g.value);
                    out.range_closed = out.range_closed && g.range_closed;
                    out.exact = out.exact && g.exact;
                }
                return out;
            }
        },
        a.node());
}

namespace {

GammaEResult gamma_e_ep_diag(const EPDiag& d) {
    bool any_active = false;
    double min_limit_sq = std::numeric_limits<double>::infinity();
    const std::size_t p = d.tail_period.size();
    for (std::size_t m = 0; m < p; ++m) {
        const Complex tau = d.tail_period[m];
        const Complex coeff = d.decay ? d.decay->coeffs[m] : Complex{0.0};
        const double ratio = d.decay ? d.decay->ratio : 0.0;
        if (tau != Complex{0.0}) {
            any_active = true;
            min_limit_sq = std::min(min_limit_sq, std::norm(tau));
        } else if (coeff != Complex{0.0} && ratio != 0.0) {
            // nonzero entries accumulating at 0: 0 is in sigma_e(B)
            any_active = true;
            min_limit_sq = 0.0;
        }
    }
    if (!any_active) return {ExtendedReal::infinity(), true, true};
    return {ExtendedReal(std::sqrt(min_limit_sq)), false, true};
}

GammaEResult gamma_e_ep_block(const EPBlock& b) {
    bool any_active = false;
    double min_sigma = std::numeric_limits<double>::infinity();
    for (const auto& blk : b.tail_period) {
        std::vector<double> s = block_nonzero_singulars(blk);
        if (s.empty()) continue;
        any_active = true;
        min_sigma = std::min(min_sigma, s.back());
    }
    if (!any_active) return {ExtendedReal::infinity(), true, true};
    return {ExtendedReal(min_sigma), false, true};
}

}  // namespace

GammaEResult gamma_e(const OperatorRep& a) {
    return std::visit(
        [](const auto& node) -> GammaEResult {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Dense>)
                return {ExtendedReal::infinity(), true, true};
            else if constexpr (std::is_same_v<T, EPDiag>)
                return gamma_e_ep_diag(node);
            else if constexpr (std::is_same_v<T, EPBlock>)
                return gamma_e_ep_block(node);
            else if constexpr (std::is_same_v<T, FiniteRankPerturb>)
                // invariant under finite-rank perturbations: the cokernel
                // moves by finitely many dimensions and sigma_e(A*A) is
                // Weyl-stable
                return gamma_e(*node.base);
            else {
                GammaEResult out{ExtendedReal::infinity(), true, true};
                for (const auto& part : node.parts) {
                    GammaEResult g = gamma_e(part);
                    out.value = min(out.value, g.value);
                    out.cokernel_finite = out.cokernel_finite && g.cokernel_finite;
                    out.exact = out.exact && g.exact;
                }
                return out;
            }
        },
        a.node());
}

EssNormResult essential_norm(const OperatorRep& a) {
    return std::visit(
        [](const auto& node) -> EssNormResult {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Dense>) {
                return {0.0, true};
            } else if constexpr (std::is_same_v<T, EPDiag>) {
                double m = 0.0;
                for (Complex z : node.tail_period) m = std::max(m, std::abs(z));
                return {m, true};
            } else if constexpr (std::is_same_v<T, EPBlock>) {
                double m = 0.0;
                for (const auto& blk : node.tail_period) m = std::max(m, spectral_norm(blk));
                return {m, true};
            } else if constexpr (std::is_same_v<T, FiniteRankPerturb>) {
                return essential_norm(*node.base);
            } else {
                EssNormResult out{0.0, true};
                for (const auto& part : node.parts) {
                    EssNormResult e = essential_norm(part);
                    out.value = std::max(out.value, e.value);
                    out.exact = out.exact && e.exact;
                }
                return out;
            }
        },
        a.node());
}

ExtendedReal m_e(const OperatorRep& c) {
    EssentialSpectrumSet s = essential_spectrum(c);  // throws NotSelfAdjoint
    if (s.finite_dimensional || s.points.empty()) return ExtendedReal::infinity();
    const double v = s.points.front();
    if (v < 0.0) throw Error("m_e: negative essential minimum is outside ExtendedReal; "
                             "shift the operator first");
    return ExtendedReal(v);
}

WitnessCheck gamma_e_witness_check(const OperatorRep& a, const OperatorRep& t, double gamma_lb,
                                   std::size_t n) {
    if (!is_compact(t)) throw NotCompactWitness("gamma_e_witness_check: T is not compact");
    if (domain_space(t) != domain_space(a))
        throw IncompatibleShapes("gamma_e_witness_check: T and A domains differ");
    DenseMatrix an = truncate(a, n);
    DenseMatrix tn = truncate(t, n);
    if (an.cols() != tn.cols())
        throw IncompatibleShapes("gamma_e_witness_check: truncations are not aligned");
    DenseMatrix p = cokernel_injection(a, n);
    DenseMatrix ap = an * p;
    DenseMatrix tp = tn * p;
    DenseMatrix q = ap.adjoint() * ap + tp.adjoint() * tp;
    // symmetrize roundoff
    for (std::size_t i = 0; i < q.rows(); ++i)
        for (std::size_t j = i; j < q.cols(); ++j) {
            Complex v = 0.5 * (q(i, j) + std::conj(q(j, i)));
            q(i, j) = v;
            q(j, i) = std::conj(v);
        }
    WitnessCheck out;
    if (q.rows() == 0) {  // empty cokernel: the bound holds vacuously
        out.lambda_min = gamma_lb * gamma_lb;
        out.margin = 0.0;
        out.pass = true;
        return out;
    }
    out.lambda_min = eigh_values(q).front();
    out.margin = out.lambda_min - gamma_lb * gamma_lb;
    out.pass = out.margin >= -tol::witness_slack() * std::max(1.0, gamma_lb * gamma_lb);
    return out;
}

double m_e_bruteforce_oracle(const OperatorRep& c, std::size_t rank_budget, std::size_t n) {
    const EPDiag* d = c.get_if<EPDiag>();
    if (!d) throw Error("m_e_bruteforce_oracle: diagonal-class reps only");
    if (!is_self_adjoint(c)) throw NotSelfAdjoint("m_e_bruteforce_oracle: not self-adjoint");
    if (n == 0) throw Error("m_e_bruteforce_oracle: n must be >= 1");
    if (rank_budget >= n)
        throw Error("m_e_bruteforce_oracle: rank budget must be below the truncation size");
    std::vector<double> entries(n);
    for (std::size_t k = 0; k < n; ++k) entries[k] = ep_diag_entry(*d, k).real();
    // a rank-r self-adjoint perturbation can lift exactly the r smallest
    // diagonal entries; lambda_min of the best lift is the (r+1)-th smallest
    std::nth_element(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(rank_budget),
                     entries.end());
    return entries[rank_budget];
}

ModuliReport moduli_report(const OperatorRep& a) {
    ModuliReport r;
    GammaResult g = gamma(a);
    GammaEResult ge = gamma_e(a);
    EssNormResult en = essential_norm(a);
    r.gamma = g.value;
    r.range_closed = g.range_closed;
    r.gamma_exact = g.exact;
    r.gamma_e = ge.value;
    r.cokernel_finite = ge.cokernel_finite;
    r.gamma_e_exact = ge.exact;
    r.ess_norm = en.value;
    r.ess_norm_exact = en.exact;
    return r;
}

}  // namespace rcc
