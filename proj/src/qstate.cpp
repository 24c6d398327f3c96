#include "alaw/qstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "alaw/errors.hpp"
#include "alaw/rng.hpp"

namespace alaw {

// --- Region ------------------------------------------------------------------

Region Region::contiguous(int start, int len) {
    if (start < 0 || len < 0) throw PreconditionError("region bounds must be nonnegative");
    Region r;
    r.sites.reserve(len);
    for (int s = start; s < start + len; ++s) r.sites.push_back(s);
    return r;
}

bool Region::contains(int site) const {
    return std::binary_search(sites.begin(), sites.end(), site);
}

bool Region::disjoint_from(const Region& other) const {
    for (int s : other.sites)
        if (contains(s)) return false;
    return true;
}

Region Region::joined(const Region& other) const {
    if (!disjoint_from(other)) throw PreconditionError("joined() requires disjoint regions");
    Region r;
    r.sites.resize(sites.size() + other.sites.size());
    std::merge(sites.begin(), sites.end(), other.sites.begin(), other.sites.end(),
               r.sites.begin());
    return r;
}

Region Region::complement(int num_sites) const {
    Region r;
    for (int s = 0; s < num_sites; ++s)
        if (!contains(s)) r.sites.push_back(s);
    return r;
}

std::string to_string(const Region& r) {
    std::string out = "{";
    for (size_t i = 0; i < r.sites.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(r.sites[i]);
    }
    return out + "}";
}

// --- ChainState ---------------------------------------------------------------

void ChainState::validate() const {
    if (num_sites < kMinSites || num_sites > kMaxSites)
        throw PreconditionError("chain length " + std::to_string(num_sites) +
                                " outside dense range [2,20]");
    if (amps.size() != (Eigen::Index(1) << num_sites))
        throw PreconditionError("amplitude vector length is not 2^num_sites");
    const double n = amps.norm();
    if (std::abs(n - 1.0) > kNormTol)
        throw NumericError("state norm drifted: |norm-1| = " + std::to_string(std::abs(n - 1.0)));
}

// --- Partition ----------------------------------------------------------------

Partition make_partition(int num_sites, int start, int l_left, int l_a, int l_right) {
    if (l_left < 1 || l_a < 1 || l_right < 1)
        throw PreconditionError("partition blocks must be nonempty");
    if (start < 0 || start + l_left + l_a + l_right > num_sites)
        throw PreconditionError("partition does not fit in the chain");
    Partition p;
    p.num_sites = num_sites;
    p.start = start;
    p.left = Region::contiguous(start, l_left);
    p.a = Region::contiguous(start + l_left, l_a);
    p.right = Region::contiguous(start + l_left + l_a, l_right);
    p.c = p.left.joined(p.a).joined(p.right).complement(num_sites);
    p.mirrored = l_right < l_left;
    p.b1 = p.mirrored ? p.right : p.left;
    p.b2 = p.mirrored ? p.left : p.right;
    p.l_b1 = p.b1.size();
    p.l_b2 = p.b2.size();
    p.l_a = l_a;
    return p;
}

// --- DensityOperator -----------------------------------------------------------

void DensityOperator::validate() const {
    if (rho.rows() != rho.cols()) throw PreconditionError("density operator must be square");
    if (rho.rows() != (Eigen::Index(1) << basis.size()))
        throw PreconditionError("density operator dimension does not match its basis region");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermTol) throw NumericError("density operator lost hermiticity: " + std::to_string(herm));
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol)
        throw NumericError("density operator trace drifted: " + std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kEigClip)
        throw NumericError("density operator has a negative eigenvalue below the clip window");
}

// --- reshapes and partial trace -------------------------------------------------

namespace {

// For each full amplitude index, the (row, col) coordinates under the
// region/complement bit split.  Row bit j comes from region.sites[j].
struct BitSplit {
    std::vector<int> row_sites, col_sites;
};

BitSplit split_sites(int num_sites, const Region& region) {
    BitSplit s;
    s.row_sites = region.sites;
    for (int q = 0; q < num_sites; ++q)
        if (!region.contains(q)) s.col_sites.push_back(q);
    return s;
}

inline Eigen::Index gather_bits(std::uint64_t x, const std::vector<int>& sites) {
    Eigen::Index out = 0;
    for (size_t j = 0; j < sites.size(); ++j)
        out |= static_cast<Eigen::Index>((x >> sites[j]) & 1ULL) << j;
    return out;
}

}  // namespace

Matrix bipartite_matrix(const ChainState& state, const Region& region) {
    const BitSplit sp = split_sites(state.num_sites, region);
    const Eigen::Index rows = Eigen::Index(1) << sp.row_sites.size();
    const Eigen::Index cols = Eigen::Index(1) << sp.col_sites.size();
    Matrix m(rows, cols);
    const Eigen::Index dim = state.amps.size();
    for (Eigen::Index x = 0; x < dim; ++x)
        m(gather_bits(x, sp.row_sites), gather_bits(x, sp.col_sites)) = state.amps(x);
    return m;
}

ChainState assemble_state(const Matrix& m, const Region& region, int num_sites) {
    const BitSplit sp = split_sites(num_sites, region);
    if (m.rows() != (Eigen::Index(1) << sp.row_sites.size()) ||
        m.cols() != (Eigen::Index(1) << sp.col_sites.size()))
        throw PreconditionError("assemble_state: matrix shape does not match the region split");
    ChainState st;
    st.num_sites = num_sites;
    st.amps = Vector::Zero(Eigen::Index(1) << num_sites);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::uint64_t xr = 0;
        for (size_t j = 0; j < sp.row_sites.size(); ++j)
            xr |= ((static_cast<std::uint64_t>(r) >> j) & 1ULL) << sp.row_sites[j];
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::uint64_t x = xr;
            for (size_t j = 0; j < sp.col_sites.size(); ++j)
                x |= ((static_cast<std::uint64_t>(c) >> j) & 1ULL) << sp.col_sites[j];
            st.amps(static_cast<Eigen::Index>(x)) = m(r, c);
        }
    }
    return st;
}

DensityOperator reduce(const ChainState& state, const Region& region) {
    state.validate();
    for (int s : region.sites)
        if (s < 0 || s >= state.num_sites)
            throw PreconditionError("region site outside the chain");
    const Matrix m = bipartite_matrix(state, region);
    DensityOperator d;
    d.rho = m * m.adjoint();
    d.basis = region;
    return d;
}

// --- generators ------------------------------------------------------------------

ChainState make_product(int num_sites, const std::vector<double>& angles) {
    if (num_sites < kMinSites || num_sites > kMaxSites)
        throw PreconditionError("product state: chain length outside [2,20]");
    if (angles.size() != static_cast<size_t>(num_sites))
        throw PreconditionError("product state: need one angle per site");
    ChainState st;
    st.num_sites = num_sites;
    st.amps = Vector::Ones(1);
    for (int s = 0; s < num_sites; ++s) {
        Vector q(2);
        q << std::cos(angles[s]), std::sin(angles[s]);
        Vector next(st.amps.size() * 2);
        // site s becomes the new most significant bit
        next.head(st.amps.size()) = q(0) * st.amps;
        next.tail(st.amps.size()) = q(1) * st.amps;
        st.amps.swap(next);
    }
    st.validate();
    return st;
}

ChainState make_bell_chain(int num_pairs) {
    if (num_pairs < 1) throw PreconditionError("bell chain: need at least one pair");
    const int n = 2 * num_pairs;
    if (n > kMaxSites) throw PreconditionError("bell chain: exceeds the 20-site dense cap");
    ChainState st;
    st.num_sites = n;
    st.amps = Vector::Zero(Eigen::Index(1) << n);
    const double w = std::pow(0.5, num_pairs / 2.0);
    // nonzero amplitudes: both bits of every pair equal
    for (std::uint64_t k = 0; k < (1ULL << num_pairs); ++k) {
        std::uint64_t x = 0;
        for (int p = 0; p < num_pairs; ++p)
            if ((k >> p) & 1ULL) x |= 3ULL << (2 * p);
        st.amps(static_cast<Eigen::Index>(x)) = w;
    }
    st.validate();
    return st;
}

ChainState make_ghz(int num_sites) {
    if (num_sites < kMinSites || num_sites > kMaxSites)
        throw PreconditionError("ghz: chain length outside [2,20]");
    ChainState st;
    st.num_sites = num_sites;
    st.amps = Vector::Zero(Eigen::Index(1) << num_sites);
    const double w = std::sqrt(0.5);
    st.amps(0) = w;
    st.amps(st.amps.size() - 1) = w;
    return st;
}

ChainState make_random_mps(int num_sites, int bond_dim, std::uint64_t seed) {
    if (num_sites < kMinSites || num_sites > kMaxSites)
        throw PreconditionError("random mps: chain length outside [2,20]");
    if (bond_dim < 1) throw PreconditionError("random mps: bond dimension must be >= 1");
    SplitMix64 rng(seed);
    // contracted prefix: (2^sites_done) x chi, physical index little-endian
    Matrix prefix = Matrix::Ones(1, 1);
    int chi_l = 1;
    for (int site = 0; site < num_sites; ++site) {
        const double cap_r = std::min<double>(
            bond_dim, std::pow(2.0, std::min(site + 1, num_sites - site - 1)));
        const int chi_r = static_cast<int>(cap_r);
        // site tensor A[bl][phys][br], drawn iid complex normal
        std::vector<Complex> tensor(static_cast<size_t>(chi_l) * 2 * chi_r);
        for (auto& t : tensor) {
            const double re = rng.next_normal();
            const double im = rng.next_normal();
            t = Complex(re, im);
        }
        Matrix next(prefix.rows() * 2, chi_r);
        for (int phys = 0; phys < 2; ++phys) {
            Matrix a(chi_l, chi_r);
            for (int bl = 0; bl < chi_l; ++bl)
                for (int br = 0; br < chi_r; ++br)
                    a(bl, br) = tensor[(static_cast<size_t>(bl) * 2 + phys) * chi_r + br];
            // new physical bit (this site) is the most significant so far
            next.block(phys * prefix.rows(), 0, prefix.rows(), chi_r) = prefix * a;
        }
        prefix.swap(next);
        chi_l = chi_r;
    }
    ChainState st;
    st.num_sites = num_sites;
    st.amps = prefix.col(0);
    const double n = st.amps.norm();
    if (n < 1e-100) throw NumericError("random mps contracted to the zero vector");
    st.amps /= n;
    st.validate();
    return st;
}

namespace {

// y += H x for H = -sum Z_i Z_{i+1} - field sum X_i, matrix-free.
void tfim_apply(const RealVector& diag_zz, double field, int n, const Vector& x, Vector& y) {
    y.noalias() = diag_zz.cast<Complex>().cwiseProduct(x);
    const Eigen::Index dim = x.size();
    for (int i = 0; i < n; ++i) {
        const Eigen::Index bit = Eigen::Index(1) << i;
        for (Eigen::Index a = 0; a < dim; ++a) y(a) -= field * x(a ^ bit);
    }
}

}  // namespace

ChainState make_tfim_ground(int num_sites, double field) {
    if (num_sites < 4 || num_sites > 16)
        throw PreconditionError("tfim ground state: chain length outside [4,16]");
    if (!(field > 1.0))
        throw PreconditionError("tfim ground state: field must exceed 1 (gapped phase)");
    const Eigen::Index dim = Eigen::Index(1) << num_sites;
    RealVector diag_zz(dim);
    for (Eigen::Index x = 0; x < dim; ++x) {
        int s = 0;
        for (int i = 0; i + 1 < num_sites; ++i) {
            const int zi = 1 - 2 * static_cast<int>((x >> i) & 1);
            const int zj = 1 - 2 * static_cast<int>((x >> (i + 1)) & 1);
            s += zi * zj;
        }
        diag_zz(x) = -s;
    }

    // Restarted Lanczos with full reorthogonalization inside each block.
    // Start vector: uniform superposition; the ground state has strictly
    // positive amplitudes (Perron-Frobenius for -H), so the overlap is safe.
    const long matvec_cap = 10L * (1L << num_sites);
    const double tol = 1e-10;
    long matvecs = 0;
    const int block = 40;
    Vector v = Vector::Constant(dim, Complex(1.0 / std::sqrt(double(dim)), 0.0));
    double energy = 0.0;

    for (int restart = 0; restart < 200; ++restart) {
        std::vector<Vector> basis;
        basis.reserve(block);
        std::vector<double> alpha, beta;  // tridiagonal coefficients
        basis.push_back(v);
        Vector w(dim);
        for (int j = 0; j < block && matvecs < matvec_cap; ++j) {
            tfim_apply(diag_zz, field, num_sites, basis[j], w);
            ++matvecs;
            Complex a = basis[j].dot(w);
            alpha.push_back(a.real());
            w -= a.real() * basis[j];
            if (j > 0) w -= beta[j - 1] * basis[j - 1];
            for (const auto& b : basis) w -= b.dot(w) * b;  // reorthogonalize
            const double nb = w.norm();
            if (nb < 1e-13) break;  // invariant subspace found
            beta.push_back(nb);
            if (j + 1 < block) basis.push_back(w / nb);
        }
        const int k = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        energy = es.eigenvalues()(0);
        Vector next = Vector::Zero(dim);
        for (int i = 0; i < static_cast<int>(basis.size()); ++i)
            next += es.eigenvectors()(i, 0) * basis[i];
        next.normalize();
        v.swap(next);
        tfim_apply(diag_zz, field, num_sites, v, w);
        ++matvecs;
        const double residual = (w - energy * v).norm();
        if (residual <= tol) break;
        if (matvecs >= matvec_cap)
            throw NumericError("tfim ground state: matvec budget exhausted at residual " +
                               std::to_string(residual));
    }

    ChainState st;
    st.num_sites = num_sites;
    // fix the global phase: make the largest amplitude real positive
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    v *= std::polar(1.0, -std::arg(v(imax)));
    st.amps = v;
    st.validate();
    return st;
}

ChainState make_random_state(int num_sites, std::uint64_t seed) {
    if (num_sites < kMinSites || num_sites > kMaxSites)
        throw PreconditionError("random state: chain length outside [2,20]");
    SplitMix64 rng(seed);
    ChainState st;
    st.num_sites = num_sites;
    st.amps.resize(Eigen::Index(1) << num_sites);
    for (Eigen::Index i = 0; i < st.amps.size(); ++i) {
        const double re = rng.next_normal();
        const double im = rng.next_normal();
        st.amps(i) = Complex(re, im);
    }
    st.amps.normalize();
    return st;
}

// --- binary files -------------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'A', 'L', 'A', 'W', 'S', 'T', 'A', 'T'};
}

void save_state(const ChainState& state, const std::string& path) {
    state.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PreconditionError("cannot open " + path + " for writing");
    out.write(kMagic, 8);
    const std::uint32_t n = static_cast<std::uint32_t>(state.num_sites);
    const std::uint32_t reserved = 0;
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&reserved), 4);
    for (Eigen::Index i = 0; i < state.amps.size(); ++i) {
        const double re = state.amps(i).real();
        const double im = state.amps(i).imag();
        out.write(reinterpret_cast<const char*>(&re), 8);
        out.write(reinterpret_cast<const char*>(&im), 8);
    }
    if (!out) throw NumericError("short write while saving state to " + path);
}

ChainState load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw PreconditionError(path + " is not a chain-state file (bad magic)");
    std::uint32_t n = 0, reserved = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&reserved), 4);
    if (!in || n < kMinSites || n > kMaxSites)
        throw PreconditionError(path + ": header chain length out of range");
    ChainState st;
    st.num_sites = static_cast<int>(n);
    st.amps.resize(Eigen::Index(1) << n);
    for (Eigen::Index i = 0; i < st.amps.size(); ++i) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), 8);
        in.read(reinterpret_cast<char*>(&im), 8);
        st.amps(i) = Complex(re, im);
    }
    if (!in) throw PreconditionError(path + ": truncated amplitude payload");
    st.validate();
    return st;
}

}  // namespace alaw
