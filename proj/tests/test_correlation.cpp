#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "alaw/correlation.hpp"
#include "alaw/errors.hpp"
#include "alaw/qstate.hpp"

using namespace alaw;

TEST_CASE("connected-correlation strength of paired and independent sites") {
    const ChainState bell = make_bell_chain(3);
    CHECK(correlation_strength(bell, Region{{0}}, Region{{1}}) > 0.99);
    CHECK(correlation_strength(bell, Region{{0}}, Region{{2}}) <= 1e-12);
    CHECK(correlation_strength(bell, Region{{0, 1}}, Region{{4, 5}}) <= 1e-12);

    const ChainState prod = make_product(6, std::vector<double>(6, 0.4));
    CHECK(correlation_strength(prod, Region{{0}}, Region{{5}}) <= 1e-12);

    const ChainState ghz = make_ghz(6);
    CHECK(correlation_strength(ghz, Region{{0}}, Region{{5}}) > 0.9);

    CHECK_THROWS_AS(correlation_strength(bell, Region{{0, 1}}, Region{{1, 2}}),
                    PreconditionError);
}

TEST_CASE("profiles record the worst strength per separation") {
    const ChainState ghz = make_ghz(8);
    const CorrelationProfile prof = measure_profile(ghz, 1);
    REQUIRE(!prof.separations.empty());
    CHECK(prof.region_size == 1);
    CHECK(prof.separations.front() == 1);
    for (std::size_t i = 0; i < prof.strengths.size(); ++i) {
        CHECK(prof.strengths[i] > 0.9);  // constant long-range correlations
    }
    for (std::size_t i = 1; i < prof.separations.size(); ++i) {
        CHECK(prof.separations[i] == prof.separations[i - 1] + 1);
    }
}

TEST_CASE("fit recovers a synthetic decay length") {
    CorrelationProfile prof;
    prof.region_size = 1;
    const double xi_true = 1.5;
    for (int l = 1; l <= 8; ++l) {
        prof.separations.push_back(l);
        prof.strengths.push_back(std::pow(2.0, -static_cast<double>(l) / xi_true));
    }
    const XiFit fit = fit_xi(prof);
    CHECK(fit.slope == doctest::Approx(-1.0 / xi_true).epsilon(1e-9));
    CHECK(fit.fit_residual < 1e-9);
    CHECK(fit.certified);
    CHECK(fit.points_used == 8);
    // the reported length backs off from the raw fit, never below it
    CHECK(fit.xi_hat >= xi_true - 1e-9);
}

TEST_CASE("tfim correlations certify with a decaying profile") {
    const ChainState s = make_tfim_ground(12, 2.0);
    const CorrelationCertificate cert = certify_state(s);
    CHECK(cert.certified);
    CHECK_FALSE(cert.overridden);
    CHECK(cert.xi > 0.0);
    CHECK(cert.xi < 2.0);  // field 2.0 is deep in the gapped phase
    REQUIRE(cert.profiles.size() >= 1);
    const CorrelationProfile& p = cert.profiles.front();
    REQUIRE(p.strengths.size() >= 3);
    CHECK(p.strengths.front() > p.strengths.back());  // decay is visible
    // certificate property: every measured point sits under the fitted envelope
    for (std::size_t i = 0; i < p.strengths.size(); ++i) {
        const double envelope = std::pow(2.0, -p.separations[i] / cert.xi);
        CHECK(p.strengths[i] <= envelope * (1.0 + 1e-9));
    }
}

TEST_CASE("ghz does not certify: correlations never decay") {
    const CorrelationCertificate cert = certify_state(make_ghz(8));
    CHECK_FALSE(cert.certified);
    CHECK_THROWS_AS(certify_with_override(make_ghz(8), 1.0), PreconditionError);
}

TEST_CASE("zero-correlation families certify on the floor without an override") {
    const CorrelationCertificate bell = certify_state(make_bell_chain(4));
    CHECK(bell.certified);
    CHECK_FALSE(bell.overridden);

    const CorrelationCertificate prod =
        certify_state(make_product(8, std::vector<double>(8, 0.3)));
    CHECK(prod.certified);
}

TEST_CASE("an imposed decay length is legal only without real correlations") {
    const CorrelationCertificate cert = certify_with_override(make_bell_chain(4), 1.0);
    CHECK(cert.certified);
    CHECK(cert.overridden);
    CHECK(cert.xi == doctest::Approx(1.0));
    CHECK_THROWS_AS(certify_with_override(make_tfim_ground(8, 2.0), 1.0), PreconditionError);
}

TEST_CASE("profile CSV is deterministic with a fixed header") {
    const ChainState s = make_tfim_ground(8, 2.0);
    const CorrelationCertificate cert = certify_state(s);
    const std::string a = profiles_to_csv(cert.profiles);
    const std::string b = profiles_to_csv(cert.profiles);
    CHECK(a == b);
    CHECK(a.rfind("separation,strength,region_size\n", 0) == 0);
    CHECK(a.find('.') != std::string::npos);
}
