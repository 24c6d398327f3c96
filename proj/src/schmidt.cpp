#include "alaw/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "alaw/errors.hpp"

namespace alaw {

namespace {

// Descending eigenpairs of the marginal on `region`; ties keep the solver's
// original order (stable sort on index).
struct EigSorted {
    RealVector w;   // all eigenvalues, descending, clipped at 0
    Matrix v;       // matching columns
};

EigSorted sorted_eig(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const RealVector& w = es.eigenvalues();
    std::vector<int> idx(w.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w(a) > w(b); });
    EigSorted out;
    out.w.resize(w.size());
    out.v.resize(es.eigenvectors().rows(), w.size());
    for (size_t j = 0; j < idx.size(); ++j) {
        double val = w(idx[j]);
        if (val < kEigClip)
            throw NumericError("schmidt: marginal eigenvalue " + std::to_string(val) +
                               " below the clip window");
        out.w(j) = std::max(val, 0.0);
        out.v.col(j) = es.eigenvectors().col(idx[j]);
    }
    return out;
}

}  // namespace

SchmidtSpectrum schmidt_cut(const ChainState& state, const Region& region) {
    state.validate();
    if (region.empty() || region.complement(state.num_sites).empty())
        throw PreconditionError("schmidt_cut: cut must leave both sides nonempty");
    // spectrum of the smaller marginal; both sides of a pure cut agree
    const Region comp = region.complement(state.num_sites);
    const Region& small = (comp.size() < region.size()) ? comp : region;
    EigSorted es = sorted_eig(reduce(state, small).rho);
    int rank = 0;
    while (rank < es.w.size() && es.w(rank) > kRankTol) ++rank;
    SchmidtSpectrum spec;
    spec.p = es.w.head(rank);
    spec.cut_region = region;
    return spec;
}

SchmidtSpectrum dual_schmidt_cut(const ChainState& state, const Region& b1) {
    return schmidt_cut(state, b1);
}

SchmidtDecomposition schmidt_decompose(const ChainState& state, const Region& region) {
    state.validate();
    if (region.empty() || region.complement(state.num_sites).empty())
        throw PreconditionError("schmidt_decompose: cut must leave both sides nonempty");
    const Matrix m = bipartite_matrix(state, region);
    EigSorted es = sorted_eig((m * m.adjoint()).eval());
    int rank = 0;
    while (rank < es.w.size() && es.w(rank) > kRankTol) ++rank;
    SchmidtDecomposition dec;
    dec.p = es.w.head(rank);
    dec.u = es.v.leftCols(rank);
    dec.phi.resize(rank, m.cols());
    for (int i = 0; i < rank; ++i)
        dec.phi.row(i) = (dec.u.col(i).adjoint() * m) / std::sqrt(dec.p(i));
    dec.cut_region = region;
    return dec;
}

Cutoff cutoff(const SchmidtSpectrum& spec, double alpha, double l_b, double xi) {
    if (xi <= 0.0) throw PreconditionError("cutoff: decay length must be positive");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw PreconditionError("cutoff: threshold fraction must lie in (0, 1)");
    if (l_b <= 0.0) throw PreconditionError("cutoff: l_b must be positive");
    Cutoff c;
    c.alpha = alpha;
    c.threshold = std::pow(2.0, -alpha * l_b / xi);
    for (Eigen::Index i = 0; i < spec.p.size(); ++i) {
        if (spec.p(i) >= c.threshold)
            ++c.head_count;
        else
            c.tail_mass += spec.p(i);
    }
    return c;
}

double window_mass(const SchmidtSpectrum& spec, int m, int n) {
    if (m < 1 || n < m || n > spec.rank())
        throw PreconditionError("window_mass: window [" + std::to_string(m) + "," +
                                std::to_string(n) + "] outside rank " +
                                std::to_string(spec.rank()));
    double q = 0.0;
    for (int i = m; i <= n; ++i) q += spec.p(i - 1);
    return q;
}

DensityOperator project_tail_state(const ChainState& state, const Partition& part,
                                   int m, int n) {
    const SchmidtDecomposition dec = schmidt_decompose(state, part.a);
    if (m < 1 || n < m || n > dec.rank())
        throw PreconditionError("project_tail_state: window outside the Schmidt rank");
    double mass = 0.0;
    for (int i = m; i <= n; ++i) mass += dec.p(i - 1);
    if (mass <= kRankTol)
        throw PreconditionError("project_tail_state: window mass below working precision");

    // (P_mn x 1)|psi> recovered from the kept Schmidt components, then
    // renormalized; its C-marginal is the window state.
    Matrix kept = Matrix::Zero(dec.u.rows(), dec.phi.cols());
    for (int i = m; i <= n; ++i)
        kept.noalias() += std::sqrt(dec.p(i - 1)) * dec.u.col(i - 1) * dec.phi.row(i - 1);
    kept /= std::sqrt(mass);
    ChainState projected = assemble_state(kept, part.a, state.num_sites);
    projected.amps /= projected.amps.norm();  // absorb roundoff from the rebuild
    return reduce(projected, part.c);
}

TailGrouping group_tail(const SchmidtSpectrum& spec, double alpha, double l_b, double xi) {
    const Cutoff c = cutoff(spec, alpha, l_b, xi);
    if (c.tail_mass < c.threshold)
        throw PreconditionError("group_tail: tail mass " + std::to_string(c.tail_mass) +
                                " below the threshold " + std::to_string(c.threshold) +
                                "; grouping hypothesis unmet");
    TailGrouping g;
    g.head_count = c.head_count;
    g.threshold = c.threshold;
    for (int i = 0; i < c.head_count; ++i) g.group_masses.push_back(spec.p(i));

    double acc = 0.0;
    std::vector<double> tail_groups;
    for (Eigen::Index i = c.head_count; i < spec.p.size(); ++i) {
        acc += spec.p(i);
        if (acc >= c.threshold) {
            tail_groups.push_back(acc);
            acc = 0.0;
        }
    }
    if (acc > 0.0) {
        // undersized remainder: fold into the previous group
        if (tail_groups.empty())
            throw InternalError("group_tail: remainder with no closed group despite mass check");
        tail_groups.back() += acc;
    }
    g.group_masses.insert(g.group_masses.end(), tail_groups.begin(), tail_groups.end());
    return g;
}

}  // namespace alaw
