#pragma once

#include "alaw/qstate.hpp"

namespace alaw {

// All entropies are in bits (base-2 logarithms).

struct EntropyReport {
    double value = 0.0;       // bits
    RealVector spectrum;      // eigenvalues actually used, descending
    int clip_count = 0;       // negatives in [kEigClip, 0) zeroed and renormalized
};

EntropyReport von_neumann(const DensityOperator& rho);

// Entropy of the marginal on `region`, routed through the smaller side of the
// cut (the marginal and its complement share a spectrum for a pure state).
double region_entropy(const ChainState& state, const Region& region);

// Max entropy over all contiguous in-chain windows of the given length.
double max_block_entropy(const ChainState& state, int len);

double shannon(const RealVector& p);

// max_p (-p log2 p) = log2(e)/e, the single-outcome entropy ceiling.
double eps_h();

// I(R1:R2) = S(R1) + S(R2) - S(R1 R2) for disjoint regions; clamped to 0
// when roundoff drags it within kMarginTol below zero.
double mutual_information(const ChainState& state, const Region& r1, const Region& r2);

double trace_distance(const Matrix& rho, const Matrix& sigma);
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

// Continuity envelope {L + 2(1-alpha) l_b} * 2^{-(1-alpha) l_b / xi}.
struct FannesParams {
    double L;       // bits of log-dimension entering the bound
    double l_b;     // separating block width
    double alpha;   // threshold exponent fraction
    double xi;      // decay length
};
double fannes_eps(const FannesParams& p);

// Entropy continuity: |S(rho) - S(sigma)| <= eps (log2 d - 2 log2 eps)
// for eps = D(rho, sigma) <= 1/2.
struct FannesCheck {
    double eps = 0.0;
    double delta_s = 0.0;
    double rhs = 0.0;
    bool holds = false;
};
FannesCheck modified_fannes(const DensityOperator& rho, const DensityOperator& sigma);
bool modified_fannes_check(const DensityOperator& rho, const DensityOperator& sigma);

// f = I(A:C) - I(B1:B2): the exact correction term in
// S(B1 A B2) = S(B1) - S(A) + S(B2) + f.
double f_deficit(const ChainState& state, const Partition& part);

}  // namespace alaw
