#pragma once

#include <vector>

#include "alaw/errors.hpp"

namespace alaw {

// Analytical area-law bound engine. Everything here is plain arithmetic on
// the certified decay parameters; no quantum state is involved. All
// logarithms are base 2 and all entropies are in bits.

struct BoundParams {
    double xi = 1.0;        // decay length, sites; must be >= 1
    double alpha0 = 10.0 / 11.0;  // threshold exponent fraction in [2/3, 1)

    void validate() const;  // PreconditionError on violation
};

// One refinement step of the entropy-density descent. `s_bar` is the
// certified upper bound on the block entropy density (bits/site) after this
// step; `q_c` is the cut-off mass pivot used to produce it (0 for the seed).
struct DescentStep {
    int n = 0;
    double s_bar = 0.0;
    double q_c = 0.0;
};

// One rung of the coarse-graining ladder at scale l_{2m} = 9^m l0.
// `s_bar` bounds the entropy density at that scale, `q` bounds the cut-off
// mass Q_{2m} = 7 (xi/alpha0) s_bar.
struct LadderStep {
    int m = 0;
    double s_bar = 0.0;
    double q = 0.0;
};

// Upper bound on the correction term lambda_i, expressed as
// coeff * (alpha0/xi) * l0 + constant so the series can be summed once and
// evaluated at any saturation length.
struct LambdaTerm {
    int i = 0;
    double coeff = 0.0;
    double constant = 0.0;
};

struct Saturation {
    double ell0 = 0.0;          // unit length of the descent
    int n0 = 0;                 // refinement steps to saturation
    int phase1_steps = 0;       // fixed-pivot steps before the per-step optimum
    double l0 = 0.0;            // saturation length 4^{n0} * ell0
    double s_bar_l0 = 0.0;      // certified density bound at l0, bits/site
    std::vector<DescentStep> descent;
};

struct LambdaSum {
    double coeff = 0.0;         // on (alpha0/xi) * l0
    double constant = 0.0;      // additive bits
    int depth = 0;              // ladder levels summed
    std::vector<LambdaTerm> terms;
};

struct BoundOptions {
    bool tight = false;       // start the ladder at the achieved density
                              // bound instead of the admissibility boundary
    bool greedy = false;      // refine until the target instead of the fixed
                              // eight-step schedule
    bool verify_eps = true;   // recompute the dropped continuity corrections
                              // and assert they are negligible
};

struct BoundTrace {
    BoundParams params;
    bool tight = false;
    bool greedy = false;
    Saturation sat;
    std::vector<LadderStep> ladder;
    LambdaSum lambda;
    double lambda_at_l0 = 0.0;   // coeff * (alpha0/xi) * l0 + constant
    double eta_residual = 0.0;   // top-window term at the deepest rung
    double assembled = 0.0;      // 2 S(l0) bound + lambda sum + residual
    int n0_cap = 0;              // closed-form step cap
    double lemma10 = 0.0;        // single-cut closed-form bound, bits
    double theorem = 0.0;        // two-cut closed-form bound, bits
    bool has_eq4 = false;
    double eq4 = 0.0;            // printed specialization at alpha0 = 10/11
    double eps_drop_ratio = 0.0; // dropped corrections / retained terms
};

// Unit length (2 xi / (1 - alpha0)) (log2(xi / (1 - alpha0)) + 3).
double unit_length(const BoundParams& params);

// One descent step: subtract Q_c alpha0 / (4 xi) above the crossover
// Q_c (1 - Q_c) alpha0 / (2 (1 - 2 Q_c) xi), divide by 2 (1 - Q_c) below it.
// Requires Q_c in (0, 1/2).
double lemma8_step(double s_bar, double q_c, const BoundParams& params);

// The pivot whose crossover sits exactly at s_bar: with c = 2 xi s_bar /
// alpha0, the root of Q^2 - (1 + 2c) Q + c in (0, 1/2).
double optimal_qc(double s_bar, const BoundParams& params);

// Drive the density bound from 1 + eps_h / ell0 down below alpha0 / (27 xi).
// Phase 1 uses the fixed pivot 2/5; phase 2 runs the universal eight-step
// schedule (or, greedy, per-step optima from the achieved value).
Saturation find_saturation(const BoundParams& params, bool greedy = false);

// Coarse-graining recursion s_bar(9 l) <= (2/9) s_bar(l) / (1 - Q), Q = 7
// (xi/alpha0) s_bar(l). The start must not exceed alpha0 / (27 xi); the
// boundary itself is admitted so the universal reference chain is reachable.
std::vector<LadderStep> ladder(const BoundParams& params, double s_bar_l0, int depth);

// Per-level correction bounds assembled from consecutive ladder rungs.
// A ladder of depth D yields terms i = 0 .. 2D - 3.
std::vector<LambdaTerm> eta_bounds(const BoundParams& params,
                                   const std::vector<LadderStep>& rungs);

// Sum the correction series to convergence from the given start (bits/site).
LambdaSum lambda_sum_from(const BoundParams& params, double s_bar_l0);

// Reference summation from the admissibility boundary alpha0 / (27 xi);
// reproduces the universal printed coefficients.
LambdaSum lambda_sum(const BoundParams& params);

// Closed-form step cap used by the closed-form bounds.
int theorem_n0_cap(const BoundParams& params);

// Closed-form single-cut bound (alpha0 / (2 (1 - alpha0))) (log2(xi /
// (1 - alpha0)) + 3) 4^{n0} + 6, with the assembled pieces asserted to fit.
double lemma10_bound(const BoundParams& params);

// Two-cut closed form: exactly twice the single-cut bound.
double theorem_bound(const BoundParams& params);

// Printed specialization 160 (log2 xi + 6.5) 4^{ceil(11 xi + 0.05)} + 12.
double eq4_bound(double xi);

// Full audit trace: descent, ladder, series, residual, closed forms, and
// the internal-consistency assertions tying them together.
BoundTrace compute_bound_trace(const BoundParams& params,
                               const BoundOptions& opts = BoundOptions{});

// Presentation helpers for the two-significant-digit chains: round away
// from zero / to nearest, with a snap guard against representation noise.
double round_up_2sig(double x);
double round_near_2sig(double x);

}  // namespace alaw
