#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "alaw/correlation.hpp"
#include "alaw/entropy.hpp"
#include "alaw/errors.hpp"
#include "alaw/lemmas.hpp"
#include "alaw/qstate.hpp"
#include "alaw/schmidt.hpp"

using namespace alaw;

namespace {

CorrelationCertificate unit_xi_cert(const ChainState& s) {
    return certify_with_override(s, 1.0);
}

}  // namespace

TEST_CASE("verdict bookkeeping") {
    const LemmaVerdict ok = make_verdict("x", 1.0, 2.0, true, true, "ctx");
    CHECK(ok.margin == doctest::Approx(1.0));
    CHECK(ok.pass);
    CHECK_FALSE(violated(ok));

    const LemmaVerdict bad = make_verdict("x", 2.0, 1.0, true, true, "ctx");
    CHECK_FALSE(bad.pass);
    CHECK(violated(bad));

    // a breach without met preconditions or certification is flagged, not violated
    CHECK_FALSE(violated(make_verdict("x", 2.0, 1.0, false, true, "ctx")));
    CHECK_FALSE(violated(make_verdict("x", 2.0, 1.0, true, false, "ctx")));

    // roundoff-scale breaches stay inside the margin budget
    CHECK(make_verdict("x", 1.0 + 1e-10, 1.0, true, true, "ctx").pass);
}

TEST_CASE("verdict JSON is a deterministic array with fixed keys") {
    const std::vector<LemmaVerdict> vs = {make_verdict("a", 0.0, 1.0, true, true, "c1"),
                                          make_verdict("b", 1.0, 0.0, true, true, "c2")};
    const std::string j1 = verdicts_to_json(vs);
    const std::string j2 = verdicts_to_json(vs);
    CHECK(j1 == j2);
    CHECK(j1.front() == '[');
    CHECK(j1.find("\"lemma_id\": \"a\"") != std::string::npos);
    CHECK(j1.find("\"margin\"") != std::string::npos);
    CHECK(j1.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("window distance bound on the ising chain") {
    const ChainState s = make_tfim_ground(12, 2.0);
    const CorrelationCertificate cert = certify_state(s);
    REQUIRE(cert.certified);
    const Partition part = make_partition(12, 2, 3, 2, 3);
    const SchmidtSpectrum spec = schmidt_cut(s, part.a);
    for (int m = 1; m <= spec.rank(); ++m) {
        for (int n = m; n <= spec.rank(); ++n) {
            const LemmaVerdict v = check_lemma1(s, part, m, n, cert);
            CHECK_FALSE(violated(v));
            if (v.preconditions_met) CHECK(v.margin >= -1e-9);
        }
    }
}

TEST_CASE("window continuity bound on independent pairs, all windows") {
    const ChainState s = make_bell_chain(4);
    const CorrelationCertificate cert = unit_xi_cert(s);
    // start=1 places A across two pair boundaries, so the cut has rank 4
    const Partition part = make_partition(8, 1, 2, 2, 2);
    const SchmidtSpectrum spec = schmidt_cut(s, part.a);
    REQUIRE(spec.rank() >= 2);
    for (int m = 1; m <= spec.rank(); ++m) {
        for (int n = m; n <= spec.rank(); ++n) {
            CHECK_FALSE(violated(check_lemma2(s, part, m, n, 0.5, cert)));
            CHECK_FALSE(violated(check_lemma1(s, part, m, n, cert)));
        }
    }
}

TEST_CASE("tail-mass bound is assumption-free and holds on every family") {
    const std::vector<ChainState> states = {make_tfim_ground(10, 2.0), make_bell_chain(5),
                                            make_random_mps(10, 3, 7),
                                            make_random_state(10, 3)};
    for (const ChainState& s : states) {
        const CorrelationCertificate cert = certify_state(s);
        for (int start : {0, 2}) {
            const Partition part = make_partition(10, start, 2, 2, 2);
            const LemmaVerdict v = check_lemma3(s, part, 0.5, cert);
            CHECK(v.preconditions_met);
            CHECK(v.certified);  // no hypotheses: always asserted
            CHECK(v.margin >= -1e-9);
        }
    }
}

TEST_CASE("separated-region entropy bounds on the ising chain") {
    const ChainState s = make_tfim_ground(12, 2.0);
    const CorrelationCertificate cert = certify_state(s);
    REQUIRE(cert.certified);
    for (int start : {0, 1, 3}) {
        for (int lb : {2, 3}) {
            const Partition part = make_partition(12, start, lb, 2, lb);
            CHECK_FALSE(violated(check_lemma4(s, part, 0.5, cert)));
            CHECK_FALSE(violated(check_lemma5(s, part, 0.5, cert)));
        }
    }
}

TEST_CASE("the degenerate head-count branch stays vacuously true") {
    // alpha*l_b/xi huge -> threshold ~ 0 never strands every weight, so force
    // the other direction: a tiny exponent makes the threshold ~ 1 and pushes
    // every Schmidt weight below it (head empty).
    const ChainState s = make_random_state(8, 9);
    CorrelationCertificate cert = certify_state(s);
    cert.xi = 100.0;  // threshold 2^{-alpha l_b/100} ~ 1
    const Partition part = make_partition(8, 1, 2, 2, 2);
    const LemmaVerdict v = check_lemma4(s, part, 0.25, cert);
    CHECK(v.lemma_id == "lemma4");
    CHECK(v.pass == (v.preconditions_met && v.certified));
    CHECK(v.context.find("vacuous") != std::string::npos);
}

TEST_CASE("mutual-information bounds and their near-boundary dual") {
    const ChainState s = make_tfim_ground(12, 2.0);
    const CorrelationCertificate cert = certify_state(s);
    REQUIRE(cert.certified);
    for (int start : {0, 2}) {
        const Partition part = make_partition(12, start, 3, 2, 3);
        for (const LemmaVerdict& v : check_lemma6(s, part, 0.25, cert)) {
            CHECK_FALSE(violated(v));
        }
        CHECK_FALSE(violated(check_lemma6_dual(s, part, 0.25, cert)));
    }
}

TEST_CASE("flag-qubit construction identities on independent pairs") {
    const ChainState s = make_bell_chain(4);
    const CorrelationCertificate cert = unit_xi_cert(s);
    const Partition part = make_partition(8, 0, 2, 2, 2);
    const ConstructionReport rep = lemma6_constructions(s, part, 0.25, cert);
    CHECK(!rep.checks.empty());
    for (const LemmaVerdict& v : rep.checks) {
        INFO(v.lemma_id, " ", v.context);
        CHECK_FALSE(violated(v));
    }
    CHECK((rep.branch == "interior" || rep.branch == "no-tail" || rep.branch == "all-tail"));
    CHECK(rep.tail_mass >= 0.0);
    CHECK(rep.tail_mass <= 1.0);
}

TEST_CASE("flag-qubit construction identities on the ising chain") {
    const ChainState s = make_tfim_ground(10, 2.0);
    const CorrelationCertificate cert = certify_state(s);
    REQUIRE(cert.certified);
    for (int start : {0, 2}) {
        const Partition part = make_partition(10, start, 2, 2, 2);
        const ConstructionReport rep = lemma6_constructions(s, part, 0.25, cert);
        for (const LemmaVerdict& v : rep.checks) {
            INFO(v.lemma_id, " ", v.context);
            CHECK_FALSE(violated(v));
        }
    }
}

TEST_CASE("partition identity residual vanishes on every family") {
    const std::vector<ChainState> states = {make_random_state(10, 21), make_bell_chain(5),
                                            make_ghz(10), make_random_mps(10, 4, 5),
                                            make_tfim_ground(10, 2.0)};
    for (const ChainState& s : states) {
        for (int start : {0, 1, 3}) {
            const Partition part = make_partition(10, start, 2, 2, 2);
            CHECK(partition_identity_residual(s, part) < 1e-9);
        }
    }
}

TEST_CASE("nested window layout geometry") {
    const TelescopeLayout lay = make_telescope_layout(16, 1, 1, 2);
    CHECK(lay.block_len(0) == 1);
    CHECK(lay.block_len(1) == 3);
    CHECK(lay.big().size() == 12);
    CHECK(lay.big().sites.front() == 2);
    CHECK(lay.big().sites.back() == 13);
    CHECK(lay.a1[1].sites == std::vector<int>{2, 3, 4});
    CHECK(lay.b1[1].sites == std::vector<int>{11, 12, 13});
    REQUIRE(lay.a3.size() == 1);
    CHECK(lay.a3[0].sites == std::vector<int>{4});

    CHECK_THROWS_AS(make_telescope_layout(12, 1, 1, 0), PreconditionError);  // no complement
    CHECK_THROWS_AS(make_telescope_layout(16, 1, 1, 5), PreconditionError);  // falls off
    CHECK_THROWS_AS(make_telescope_layout(16, 0, 1, 0), PreconditionError);
}

TEST_CASE("telescoping identity is exact across families") {
    const std::vector<ChainState> states = {
        make_random_state(14, 99), make_bell_chain(7), make_ghz(14),
        make_random_mps(14, 3, 11), make_product(14, std::vector<double>(14, 0.5))};
    for (const ChainState& s : states) {
        const TelescopeLayout lay = make_telescope_layout(14, 1, 1, 1);
        const TelescopeReport rep = telescope_identity(s, lay);
        CHECK(std::abs(rep.residual) < 1e-9);
        CHECK(rep.f_terms == 6);  // 2 + 4n
    }
    // depth 0 telescopes too: the base identity alone
    const ChainState s = make_random_state(10, 5);
    const TelescopeReport rep = telescope_identity(s, make_telescope_layout(10, 2, 0, 1));
    CHECK(std::abs(rep.residual) < 1e-9);
    CHECK(rep.f_terms == 2);
}

TEST_CASE("block mutual information scan") {
    const ChainState ghz = make_ghz(8);
    const EtaEstimate sym = eta(ghz, 1, 1, 1);
    CHECK(sym.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sym.placements_scanned == 6);  // one orientation for symmetric shapes

    const EtaEstimate asym = eta(ghz, 1, 1, 2);
    CHECK(asym.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(asym.placements_scanned == 10);  // both orientations

    // independent pairs: every middle block is swallowed by its neighbors
    const EtaEstimate bell = eta(make_bell_chain(4), 1, 1, 1);
    CHECK(bell.value == doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS(eta(ghz, 3, 3, 3), PreconditionError);  // no complement left
    CHECK_THROWS_AS(eta(ghz, 0, 1, 1), PreconditionError);
}

TEST_CASE("doubling bound holds on every family") {
    const std::vector<ChainState> states = {
        make_ghz(16), make_bell_chain(8), make_random_mps(16, 3, 13),
        make_product(16, std::vector<double>(16, 0.8)), make_random_state(14, 4)};
    for (const ChainState& s : states) {
        const LemmaVerdict v = check_lemma7(s, 1, 1);
        CHECK(v.preconditions_met);
        CHECK(v.certified);  // identity-backed: no decay assumption
        INFO(v.context);
        CHECK(v.margin >= -1e-9);
    }
    CHECK_THROWS_AS(check_lemma7(make_ghz(12), 1, 1), PreconditionError);
}

TEST_CASE("suite runner: certified family, zero violations, deterministic") {
    const ChainState s = make_bell_chain(4);
    const CorrelationCertificate cert = unit_xi_cert(s);
    SuiteConfig cfg;
    cfg.jobs = 1;
    const SuiteResult r1 = run_lemma_suite(s, cert, cfg);
    CHECK(r1.violations == 0);
    CHECK(r1.passed > 0);
    CHECK(!r1.verdicts.empty());

    cfg.jobs = 4;
    const SuiteResult r4 = run_lemma_suite(s, cert, cfg);
    CHECK(verdicts_to_json(r1.verdicts) == verdicts_to_json(r4.verdicts));
}

TEST_CASE("suite runner: uncertified states flag instead of asserting") {
    const ChainState s = make_ghz(8);
    const CorrelationCertificate cert = certify_state(s);
    REQUIRE_FALSE(cert.certified);
    SuiteConfig cfg;
    const SuiteResult res = run_lemma_suite(s, cert, cfg);
    CHECK(res.violations == 0);  // nothing asserted can fail
    CHECK(res.flagged > 0);
    // assumption-free checks still pass outright
    bool saw_assumption_free = false;
    for (const auto& v : res.verdicts) {
        if (v.lemma_id == "lemma3" || v.lemma_id == "identity_f") {
            saw_assumption_free = true;
            CHECK(v.pass);
        }
    }
    CHECK(saw_assumption_free);
}

TEST_CASE("suite runner: configuration validation") {
    const ChainState s = make_bell_chain(2);
    const CorrelationCertificate cert = unit_xi_cert(s);
    SuiteConfig cfg;
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(run_lemma_suite(s, cert, cfg), PreconditionError);
    cfg.alpha = 0.5;
    cfg.alpha_small = 0.5;
    CHECK_THROWS_AS(run_lemma_suite(s, cert, cfg), PreconditionError);
    cfg.alpha_small = 0.25;
    cfg.max_cases = 0;
    CHECK_THROWS_AS(run_lemma_suite(s, cert, cfg), PreconditionError);
}
