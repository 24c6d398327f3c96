#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alaw/qstate.hpp"

namespace alaw {

// || rho^{XY} - rho^X x rho^Y ||_1 for disjoint supports of up to two sites
// each.  This is a certified ceiling on |<XY> - <X><Y>| over every pair of
// unit-norm observables on those supports, so a profile of these values
// witnesses the decay assumption for the restricted operator family.
double correlation_strength(const ChainState& state, const Region& x, const Region& y);

// Worst strength per separation, maximized over all placements of supports of
// exactly `region_size` sites.  Separation = number of sites strictly between
// the two supports (>= 1).
struct CorrelationProfile {
    std::vector<int> separations;
    std::vector<double> strengths;
    int region_size = 1;
};

CorrelationProfile measure_profile(const ChainState& state, int region_size);

struct XiFit {
    double xi_hat = 1.0;       // decay length with the 1.5x safety factor
    double slope = 0.0;        // fitted log2(strength) per site
    double intercept = 0.0;
    double fit_residual = 0.0; // rms residual of the least-squares fit
    bool certified = false;    // every point obeys strength <= 2^{-l/xi_hat}
    int points_used = 0;
    // alternate fit form: strength ~ 2^{b0} l^{b1} 2^{-l/xi}; recorded only,
    // never silently substituted into the prefactor-free bounds
    bool poly_prefactor = false;
    double poly_log2_scale = 0.0;  // b0
    double poly_power = 0.0;       // b1
};

XiFit fit_xi(const std::vector<CorrelationProfile>& profiles, bool poly_prefactor = false);
XiFit fit_xi(const CorrelationProfile& profile);

// One-stop certification: measures 1- and 2-site profiles, fits, and flags.
struct CorrelationCertificate {
    std::vector<CorrelationProfile> profiles;
    XiFit fit;
    double xi = 1.0;
    bool certified = false;
    bool overridden = false;  // xi imposed externally on a zero-correlation state
};

CorrelationCertificate certify_state(const ChainState& state, bool poly_prefactor = false);

// Impose a decay length by fiat; legal only when the measured profile is
// identically zero beyond adjacency (independent-block states).
CorrelationCertificate certify_with_override(const ChainState& state, double xi);

// CSV rows `separation,strength,region_size`, floats at 17 significant digits.
std::string profiles_to_csv(const std::vector<CorrelationProfile>& profiles);

}  // namespace alaw
