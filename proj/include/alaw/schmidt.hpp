#pragma once

#include "alaw/qstate.hpp"

namespace alaw {

// Schmidt spectrum across region | rest-of-chain, descending, with entries at
// or below kRankTol dropped (they carry no weight at working precision).
struct SchmidtSpectrum {
    RealVector p;        // descending, each > kRankTol, sums to ~1
    Region cut_region;

    int rank() const { return static_cast<int>(p.size()); }
};

SchmidtSpectrum schmidt_cut(const ChainState& state, const Region& region);

// Same cut taken across the near boundary block; provided as its own entry
// point because the mirrored bounds thread their threshold through l_A.
SchmidtSpectrum dual_schmidt_cut(const ChainState& state, const Region& b1);

// Full decomposition |psi> = sum_i sqrt(p_i) |u_i>|phi_i> for the cut
// region | rest.  u columns live on the region, phi rows on the rest.
struct SchmidtDecomposition {
    RealVector p;     // descending, > kRankTol
    Matrix u;         // 2^{|region|} x rank
    Matrix phi;       // rank x 2^{n-|region|}, rows normalized
    Region cut_region;

    int rank() const { return static_cast<int>(p.size()); }
};

SchmidtDecomposition schmidt_decompose(const ChainState& state, const Region& region);

// Threshold bookkeeping: head_count = #{p_i >= 2^{-alpha l_b / xi}},
// tail_mass = total weight strictly below the threshold.
struct Cutoff {
    double alpha = 0.0;
    double threshold = 0.0;
    int head_count = 0;    // q(alpha)
    double tail_mass = 0.0;  // Q(alpha)
};

Cutoff cutoff(const SchmidtSpectrum& spec, double alpha, double l_b, double xi);

// Total weight of the 1-indexed window [m, n].
double window_mass(const SchmidtSpectrum& spec, int m, int n);

// Marginal on C of the state projected onto Schmidt window [m, n] of the cut
// at A (1-indexed, inclusive).  Errors when the window mass is negligible.
DensityOperator project_tail_state(const ChainState& state, const Partition& part,
                                   int m, int n);

// Head singletons plus greedy left-to-right packing of the tail into groups of
// mass >= threshold; an undersized final remainder merges into the previous
// group.  Closed groups land in [t, 2t); only the merged last group may reach
// [t, 3t) since every tail entry is < t.
struct TailGrouping {
    std::vector<double> group_masses;  // head singletons first, then tail groups
    int head_count = 0;
    double threshold = 0.0;
};

TailGrouping group_tail(const SchmidtSpectrum& spec, double alpha, double l_b, double xi);

}  // namespace alaw
