#include "alaw/entropy.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "alaw/errors.hpp"

namespace alaw {

namespace {

double entropy_of_spectrum(const RealVector& w) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) > kEntropyFloor) s -= w(i) * std::log2(w(i));
    return s;
}

}  // namespace

EntropyReport von_neumann(const DensityOperator& rho) {
    if (rho.rho.rows() != rho.rho.cols())
        throw PreconditionError("von_neumann: density operator must be square");
    const double herm = (rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermTol) throw NumericError("von_neumann: input lost hermiticity");
    const double tr = rho.rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-8)
        throw NumericError("von_neumann: trace drifted to " + std::to_string(tr));

    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.rho, Eigen::EigenvaluesOnly);
    RealVector w = es.eigenvalues();
    EntropyReport rep;
    double mass = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) < kEigClip)
            throw NumericError("von_neumann: eigenvalue " + std::to_string(w(i)) +
                               " below the clip window");
        if (w(i) < 0.0) {
            w(i) = 0.0;
            ++rep.clip_count;
        }
        mass += w(i);
    }
    if (mass <= 0.0) throw NumericError("von_neumann: spectrum has no mass");
    w /= mass;  // renormalize after clipping
    std::sort(w.data(), w.data() + w.size(), std::greater<double>());
    rep.spectrum = w;
    rep.value = entropy_of_spectrum(w);
    return rep;
}

double region_entropy(const ChainState& state, const Region& region) {
    if (region.empty()) return 0.0;
    const Region comp = region.complement(state.num_sites);
    if (comp.empty()) return 0.0;  // marginal of a pure state on everything
    const Region& small = (comp.size() < region.size()) ? comp : region;
    return von_neumann(reduce(state, small)).value;
}

double max_block_entropy(const ChainState& state, int len) {
    if (len < 1 || len > state.num_sites)
        throw PreconditionError("max_block_entropy: window length outside the chain");
    double best = 0.0;
    for (int start = 0; start + len <= state.num_sites; ++start)
        best = std::max(best, region_entropy(state, Region::contiguous(start, len)));
    return best;
}

double shannon(const RealVector& p) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) < -1e-12)
            throw PreconditionError("shannon: negative probability " + std::to_string(p(i)));
        sum += p(i);
    }
    if (std::abs(sum - 1.0) > kTraceTol)
        throw PreconditionError("shannon: probabilities sum to " + std::to_string(sum));
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > kEntropyFloor) s -= p(i) * std::log2(p(i));
    return s;
}

double eps_h() {
    static const double v = std::log2(std::exp(1.0)) / std::exp(1.0);
    return v;
}

double mutual_information(const ChainState& state, const Region& r1, const Region& r2) {
    if (!r1.disjoint_from(r2))
        throw PreconditionError("mutual_information: regions overlap");
    if (r1.empty() || r2.empty()) return 0.0;
    const double mi =
        region_entropy(state, r1) + region_entropy(state, r2) -
        region_entropy(state, r1.joined(r2));
    if (mi < -kMarginTol)
        throw NumericError("mutual information came out negative: " + std::to_string(mi));
    return std::max(mi, 0.0);
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw PreconditionError("trace_distance: dimension mismatch");
    Matrix d = rho - sigma;
    d = (d + d.adjoint()) / 2.0;  // symmetrize away roundoff
    Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
    if (!(rho.basis == sigma.basis))
        throw PreconditionError("trace_distance: operators live on different regions");
    return trace_distance(rho.rho, sigma.rho);
}

double fannes_eps(const FannesParams& p) {
    if (p.xi <= 0.0) throw PreconditionError("fannes_eps: decay length must be positive");
    if (p.l_b < 0.0 || p.L < 0.0) throw PreconditionError("fannes_eps: negative length");
    const double width = (1.0 - p.alpha) * p.l_b;
    return (p.L + 2.0 * width) * std::pow(2.0, -width / p.xi);
}

FannesCheck modified_fannes(const DensityOperator& rho, const DensityOperator& sigma) {
    FannesCheck chk;
    chk.eps = trace_distance(rho.rho, sigma.rho);
    if (chk.eps > 0.5)
        throw PreconditionError("modified_fannes: trace distance " + std::to_string(chk.eps) +
                                " exceeds 1/2");
    chk.delta_s = std::abs(von_neumann(rho).value - von_neumann(sigma).value);
    const double d = static_cast<double>(rho.rho.rows());
    // eps log(1/eps) -> 0 as eps -> 0; guard the log at exactly zero distance
    chk.rhs = (chk.eps > 0.0) ? chk.eps * (std::log2(d) - 2.0 * std::log2(chk.eps)) : 0.0;
    chk.holds = chk.delta_s <= chk.rhs + kMarginTol;
    return chk;
}

bool modified_fannes_check(const DensityOperator& rho, const DensityOperator& sigma) {
    return modified_fannes(rho, sigma).holds;
}

double f_deficit(const ChainState& state, const Partition& part) {
    const double i_ac = part.c.empty() ? 0.0 : mutual_information(state, part.a, part.c);
    const double i_bb = mutual_information(state, part.b1, part.b2);
    return i_ac - i_bb;
}

}  // namespace alaw
