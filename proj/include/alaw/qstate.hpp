#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace alaw {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Pinned tolerances.  Every hard-coded comparison in the library routes
// through one of these so the contract is auditable in one place.
inline constexpr double kNormTol = 1e-12;    // state normalization
inline constexpr double kHermTol = 1e-12;    // hermiticity drift
inline constexpr double kTraceTol = 1e-10;   // density-operator trace drift
inline constexpr double kEigClip = -1e-10;   // eigenvalues above this clip to 0
inline constexpr double kEntropyFloor = 1e-14;  // eigenvalues below count as 0
inline constexpr double kRankTol = 1e-12;    // Schmidt coefficient rank cut
inline constexpr double kMarginTol = 1e-9;   // inequality margin slack
inline constexpr double kIdentityTol = 1e-9; // exact-identity residual budget
inline constexpr int kMinSites = 2;
inline constexpr int kMaxSites = 20;

// A subset of chain sites, kept sorted and unique.  Need not be contiguous:
// complements of contiguous blocks on an open chain come in two pieces.
struct Region {
    std::vector<int> sites;

    static Region contiguous(int start, int len);
    int size() const { return static_cast<int>(sites.size()); }
    bool empty() const { return sites.empty(); }
    bool contains(int site) const;
    bool disjoint_from(const Region& other) const;
    Region joined(const Region& other) const;          // union of disjoint regions
    Region complement(int num_sites) const;
    bool operator==(const Region& other) const { return sites == other.sites; }
};

std::string to_string(const Region& r);

// Pure state of an open qubit chain.  Site 0 is the least significant bit of
// the amplitude index (little-endian throughout the library).
struct ChainState {
    int num_sites = 0;
    Vector amps;

    void validate() const;  // dimension 2^n, unit norm within kNormTol
};

// Contiguous tri-partition B1 | A | B2 with complement C.  Geometric blocks
// (left/right of A as placed) are kept alongside the role-normalized labels:
// b1 is always the smaller outer block, so l_b1 <= l_b2 and the decay length
// in every bound is measured across the thinner side.
struct Partition {
    int num_sites = 0;
    Region left, a, right;  // as placed on the chain
    Region b1, b2;          // role-normalized outer blocks
    Region c;               // complement of left+a+right
    int l_b1 = 0, l_a = 0, l_b2 = 0;
    int start = 0;          // first site of the left block
    bool mirrored = false;  // true when the smaller outer block is the right one

    int l_b() const { return l_b1; }
    int l_B() const { return l_b1 + l_b2; }
    // Effective separated-region length fed to continuity bounds: the piece of
    // the chain whose entropy is compared equals A+B1+B2 by purity.
    int l_C_eff() const { return l_a + l_b1 + l_b2; }
};

Partition make_partition(int num_sites, int start, int l_left, int l_a, int l_right);

// Density operator on the qubits of `basis` (little-endian over basis.sites).
struct DensityOperator {
    Matrix rho;
    Region basis;

    Eigen::Index dim() const { return rho.rows(); }
    void validate() const;  // hermitian, unit trace, spectrum >= kEigClip
};

// Reshape helpers: |psi> viewed as a (2^|region|) x (2^(n-|region|)) matrix,
// rows indexed by the region bits, columns by the complement bits.
Matrix bipartite_matrix(const ChainState& state, const Region& region);
ChainState assemble_state(const Matrix& m, const Region& region, int num_sites);

// Partial trace over the complement of `region`.
DensityOperator reduce(const ChainState& state, const Region& region);

// --- state generators -------------------------------------------------------

// Product of single-qubit states cos(theta_i)|0> + sin(theta_i)|1>.
ChainState make_product(int num_sites, const std::vector<double>& angles);

// Chain of Bell pairs on sites (2k, 2k+1); 2*num_pairs sites total.
ChainState make_bell_chain(int num_pairs);

ChainState make_ghz(int num_sites);

// Random open-boundary MPS with the given bond dimension, contracted to a
// dense state.  Same seed, same amplitudes, bit for bit.
ChainState make_random_mps(int num_sites, int bond_dim, std::uint64_t seed);

// Ground state of H = -sum Z_i Z_{i+1} - field * sum X_i (open boundary)
// via restarted Lanczos with matrix-free application of H.  Requires
// field > 1 (gapped, disordered phase) and 4 <= num_sites <= 16.
ChainState make_tfim_ground(int num_sites, double field);

// Haar-like random state: normalized vector of iid complex normal amplitudes.
ChainState make_random_state(int num_sites, std::uint64_t seed);

// --- binary state files ------------------------------------------------------
// 16-byte header: magic "ALAWSTAT", u32 num_sites, u32 reserved(0); then
// 2^n little-endian f64 (re, im) pairs in amplitude-index order.
void save_state(const ChainState& state, const std::string& path);
ChainState load_state(const std::string& path);

}  // namespace alaw
