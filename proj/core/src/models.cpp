#include "rcc/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rcc/errors.hpp"
#include "rcc/prng.hpp"

namespace rcc {

namespace {

constexpr std::size_t kResolveCap = 200000;

// projection onto the line spanned by (cos, sin) inside C^2
DenseMatrix line_projection(double c) {
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    return DenseMatrix{{c * c, c * s}, {c * s, s * s}};
}

// projection onto the line spanned by (1, a)/sqrt(1+|a|^2)
DenseMatrix graph_projection(Complex a) {
    const double w = 1.0 + std::norm(a);
    DenseMatrix m(2, 2);
    m(0, 0) = 1.0 / w;
    m(0, 1) = std::conj(a) / w;
    m(1, 0) = a / w;
    m(1, 1) = std::norm(a) / w;
    return m;
}

void check_cos(double c, const char* what) {
    if (!(c >= 0.0 && c <= 1.0))
        throw Error(std::string(what) + ": cosine outside [0,1]");
}

}  // namespace

double AngleModel::cos_at(std::size_t k) const {
    if (k < head_cos.size()) return head_cos[k];
    const std::size_t j = k - head_cos.size();
    const std::size_t m = j % tail_cos_period.size();
    double c = tail_cos_period[m];
    if (decay) c += decay->coeffs[m] * std::pow(decay->ratio, static_cast<double>(j));
    return c;
}

double TwoSubspaceSystem::cos_at(std::size_t k) const {
    if (k < resolved_cos.size()) return resolved_cos[k];
    return tail_cos_period[(k - resolved_cos.size()) % tail_cos_period.size()];
}

std::vector<double> TwoSubspaceSystem::gram_eigs(std::size_t n) const {
    std::vector<double> out;
    out.reserve(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        const double c = cos_at(k);
        out.push_back(1.0 - c);
        out.push_back(1.0 + c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

TwoSubspaceSystem two_subspace_system(const AngleModel& model) {
    if (model.tail_cos_period.empty())
        throw Error("AngleModel: tail_cos_period must be nonempty");
    for (double c : model.head_cos) check_cos(c, "AngleModel head");
    for (double c : model.tail_cos_period) check_cos(c, "AngleModel tail");
    if (model.decay) {
        if (model.decay->coeffs.size() != model.tail_cos_period.size())
            throw Error("AngleModel: decay coeffs must match tail period length");
        if (!(std::abs(model.decay->ratio) < 1.0))
            throw Error("AngleModel: |decay ratio| must be < 1");
    }

    // materialize the decaying stretch into the head; beyond it the doubles
    // coincide with the limit cosines and the tail is exactly periodic
    TwoSubspaceSystem out;
    out.tail_cos_period = model.tail_cos_period;
    const std::size_t p = model.tail_cos_period.size();
    std::size_t resolved_tail = 0;
    if (model.decay) {
        // find a full period of consecutive indices whose computed cosine
        // already equals the limit value; |coeff|*|ratio|^j decreases, so the
        // run never breaks again
        std::size_t j = 0, run = 0;
        for (; j < kResolveCap && run < p; ++j) {
            if (model.cos_at(model.head_cos.size() + j) == model.tail_cos_period[j % p])
                ++run;
            else
                run = 0;
        }
        resolved_tail = j - run;
        if (resolved_tail % p) resolved_tail += p - resolved_tail % p;  // align the phase
    }
    out.resolved_cos.reserve(model.head_cos.size() + resolved_tail);
    for (std::size_t k = 0; k < model.head_cos.size() + resolved_tail; ++k) {
        const double c = model.cos_at(k);
        check_cos(c, "AngleModel resolved");
        out.resolved_cos.push_back(c);
    }

    const DenseMatrix first_line = line_projection(1.0);  // [[1,0],[0,0]]
    EPBlock p1;
    p1.d = 2;
    p1.tail_period = {first_line};

    EPBlock p2;
    p2.d = 2;
    for (double c : out.resolved_cos) p2.head.push_back(line_projection(c));
    for (double c : out.tail_cos_period) p2.tail_period.push_back(line_projection(c));

    out.system = make_system({OperatorRep(p1), OperatorRep(p2)}, {"P1", "P2"});
    out.ess_cos = *std::max_element(out.tail_cos_period.begin(), out.tail_cos_period.end());
    return out;
}

SystemSpec graph_example(const OperatorRep& a_diag) {
    const EPDiag* d = a_diag.get_if<EPDiag>();
    if (!d) throw Error("graph_example: A must be an EPDiag rep");

    const std::size_t p = d->tail_period.size();
    // blocks become exactly periodic once the diagonal entries do
    std::size_t resolved_tail = 0;
    if (d->decay) {
        std::size_t j = 0, run = 0;
        for (; j < kResolveCap && run < p; ++j) {
            if (ep_diag_entry(*d, d->head.size() + j) == d->tail_period[j % p])
                ++run;
            else
                run = 0;
        }
        resolved_tail = j - run;
        if (resolved_tail % p) resolved_tail += p - resolved_tail % p;
    }
    const std::size_t head_len = d->head.size() + resolved_tail;

    EPBlock p1;
    p1.d = 2;
    p1.tail_period = {DenseMatrix{{1.0, 0.0}, {0.0, 0.0}}};

    EPBlock p2;
    p2.d = 2;
    for (std::size_t k = 0; k < head_len; ++k)
        p2.head.push_back(graph_projection(ep_diag_entry(*d, k)));
    for (Complex tau : d->tail_period) p2.tail_period.push_back(graph_projection(tau));

    return make_system({OperatorRep(p1), OperatorRep(p2)}, {"P_X1", "P_X2"});
}

CoordinateSystem coordinate_projection_system(const std::vector<CoordinatePattern>& patterns) {
    if (patterns.empty()) throw Error("coordinate_projection_system: no patterns");
    CoordinateSystem out;
    std::vector<OperatorRep> ops;
    for (const auto& pat : patterns) {
        if (pat.period.empty())
            throw Error("coordinate_projection_system: pattern period must be nonempty");
        EPDiag rep;
        for (int b : pat.head) {
            if (b != 0 && b != 1) throw Error("coordinate_projection_system: bits must be 0/1");
            rep.head.push_back(static_cast<double>(b));
        }
        for (int b : pat.period) {
            if (b != 0 && b != 1) throw Error("coordinate_projection_system: bits must be 0/1");
            rep.tail_period.push_back(static_cast<double>(b));
        }
        ops.push_back(OperatorRep(std::move(rep)));
    }
    out.system = make_system(std::move(ops));

    const std::size_t n = patterns.size();
    auto bit_at = [&patterns](std::size_t i, std::size_t k) -> int {
        const auto& pat = patterns[i];
        if (k < pat.head.size()) return pat.head[k];
        return pat.period[(k - pat.head.size()) % pat.period.size()];
    };
    out.eps_oracle.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            std::size_t start = std::max(patterns[i].head.size(), patterns[j].head.size());
            std::size_t span = std::lcm(patterns[i].period.size(), patterns[j].period.size());
            double eps = 0.0;
            for (std::size_t k = start; k < start + span; ++k)
                if (bit_at(i, k) == 1 && bit_at(j, k) == 1) {
                    eps = 1.0;
                    break;
                }
            out.eps_oracle[i][j] = out.eps_oracle[j][i] = eps;
        }
    return out;
}

BlockHermitian random_block_hermitian(std::uint64_t seed, std::size_t n_blocks,
                                      std::size_t max_block) {
    if (n_blocks == 0 || max_block == 0)
        throw Error("random_block_hermitian: sizes must be positive");
    SplitMix64 rng(seed);
    BlockHermitian out;
    std::size_t dim = 0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        std::size_t s = 1 + static_cast<std::size_t>(rng.next_below(max_block));
        out.partition.push_back(s);
        dim += s;
    }
    out.h = DenseMatrix(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out.h(i, i) = rng.next_signed();
        for (std::size_t j = i + 1; j < dim; ++j) {
            Complex v{rng.next_signed(), rng.next_signed()};
            out.h(i, j) = v;
            out.h(j, i) = std::conj(v);
        }
    }
    return out;
}

}  // namespace rcc
