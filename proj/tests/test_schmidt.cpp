#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "alaw/entropy.hpp"
#include "alaw/errors.hpp"
#include "alaw/qstate.hpp"
#include "alaw/schmidt.hpp"

using namespace alaw;

namespace {

SchmidtSpectrum spectrum_of(std::initializer_list<double> vals) {
    SchmidtSpectrum spec;
    spec.p = RealVector(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double v : vals) spec.p(i++) = v;
    spec.cut_region = Region::contiguous(0, 1);
    return spec;
}

}  // namespace

TEST_CASE("schmidt spectra of structured states") {
    const ChainState bell = make_bell_chain(2);
    const SchmidtSpectrum half = schmidt_cut(bell, Region{{0}});
    CHECK(half.rank() == 2);
    CHECK(half.p(0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(half.p(1) == doctest::Approx(0.5).epsilon(1e-13));

    const SchmidtSpectrum pure = schmidt_cut(bell, Region::contiguous(0, 2));
    CHECK(pure.rank() == 1);
    CHECK(pure.p(0) == doctest::Approx(1.0).epsilon(1e-13));

    const ChainState ghz = make_ghz(6);
    const SchmidtSpectrum g = schmidt_cut(ghz, Region::contiguous(0, 3));
    CHECK(g.rank() == 2);

    const ChainState prod = make_product(6, std::vector<double>(6, 0.7));
    CHECK(schmidt_cut(prod, Region::contiguous(0, 3)).rank() == 1);
}

TEST_CASE("schmidt spectrum normalizes, sorts, and matches the cut entropy") {
    const ChainState s = make_random_state(8, 77);
    const Region r = Region::contiguous(0, 4);
    const SchmidtSpectrum spec = schmidt_cut(s, r);
    CHECK(spec.rank() <= 16);
    CHECK(spec.p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 1; i < spec.rank(); ++i) CHECK(spec.p(i) <= spec.p(i - 1));
    CHECK(shannon(spec.p) == doctest::Approx(region_entropy(s, r)).epsilon(1e-10));
}

TEST_CASE("near-boundary cut equals the plain cut across that block") {
    const ChainState s = make_random_state(8, 99);
    const Region b1 = Region::contiguous(1, 2);
    const SchmidtSpectrum a = schmidt_cut(s, b1);
    const SchmidtSpectrum b = dual_schmidt_cut(s, b1);
    REQUIRE(a.rank() == b.rank());
    for (int i = 0; i < a.rank(); ++i) {
        CHECK(a.p(i) == doctest::Approx(b.p(i)).epsilon(1e-12));
    }
}

TEST_CASE("full decomposition reconstructs the state") {
    const ChainState s = make_random_state(7, 31);
    const Region r{{1, 2, 5}};
    const SchmidtDecomposition dec = schmidt_decompose(s, r);
    Matrix m = Matrix::Zero(dec.u.rows(), dec.phi.cols());
    for (int i = 0; i < dec.rank(); ++i) {
        m.noalias() += std::sqrt(dec.p(i)) * dec.u.col(i) * dec.phi.row(i);
    }
    const ChainState back = assemble_state(m, r, 7);
    // global phase is fixed by the reshape convention, so amplitudes match
    CHECK((back.amps - s.amps).norm() == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("threshold head count and tail mass") {
    // threshold 2^{-alpha l_b / xi} = 2^{-2} = 0.25
    const Cutoff co = cutoff(spectrum_of({0.5, 0.3, 0.2}), 0.5, 4.0, 1.0);
    CHECK(co.threshold == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(co.head_count == 2);
    CHECK(co.tail_mass == doctest::Approx(0.2).epsilon(1e-14));

    // boundary coefficient counts as head (>= threshold)
    const Cutoff edge = cutoff(spectrum_of({0.5, 0.25, 0.25}), 0.5, 4.0, 1.0);
    CHECK(edge.head_count == 3);
    CHECK(edge.tail_mass == doctest::Approx(0.0).epsilon(1e-14));

    CHECK_THROWS_AS(cutoff(spectrum_of({1.0}), 1.2, 4.0, 1.0), PreconditionError);
}

TEST_CASE("window mass is 1-indexed and inclusive") {
    const SchmidtSpectrum spec = spectrum_of({0.5, 0.3, 0.2});
    CHECK(window_mass(spec, 1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(window_mass(spec, 2, 3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(window_mass(spec, 1, 3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(window_mass(spec, 0, 2), PreconditionError);
    CHECK_THROWS_AS(window_mass(spec, 2, 4), PreconditionError);
}

TEST_CASE("the full-window projected marginal is the plain marginal") {
    const ChainState s = make_random_state(8, 17);
    const Partition part = make_partition(8, 1, 2, 2, 2);
    const SchmidtSpectrum spec = schmidt_cut(s, part.a);
    const DensityOperator proj = project_tail_state(s, part, 1, spec.rank());
    const DensityOperator direct = reduce(s, part.c);
    CHECK(trace_distance(proj, direct) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("projected window states are valid density operators") {
    const ChainState s = make_random_state(8, 18);
    const Partition part = make_partition(8, 1, 2, 2, 2);
    const SchmidtSpectrum spec = schmidt_cut(s, part.a);
    REQUIRE(spec.rank() >= 2);
    const DensityOperator head = project_tail_state(s, part, 1, 1);
    const DensityOperator tail = project_tail_state(s, part, 2, spec.rank());
    CHECK_NOTHROW(head.validate());
    CHECK_NOTHROW(tail.validate());
    CHECK_THROWS_AS(project_tail_state(s, part, 0, 1), PreconditionError);
    CHECK_THROWS_AS(project_tail_state(s, part, 2, spec.rank() + 1), PreconditionError);
}

TEST_CASE("tail grouping packs mass at or above the threshold") {
    // threshold 0.25: head (0.3); tail closes (0.2+0.2) then (0.15+0.15)
    const TailGrouping g = group_tail(spectrum_of({0.3, 0.2, 0.2, 0.15, 0.15}), 0.5, 4.0, 1.0);
    CHECK(g.head_count == 1);
    CHECK(g.threshold == doctest::Approx(0.25).epsilon(1e-14));
    REQUIRE(g.group_masses.size() == 3);
    CHECK(g.group_masses[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(g.group_masses[1] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(g.group_masses[2] == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("an undersized remainder folds into the previous group") {
    // threshold 0.25: head (0.3, 0.26); tail closes (0.2+0.2), remainder 0.04 folds
    const TailGrouping g = group_tail(spectrum_of({0.3, 0.26, 0.2, 0.2, 0.04}), 0.5, 4.0, 1.0);
    CHECK(g.head_count == 2);
    REQUIRE(g.group_masses.size() == 3);
    CHECK(g.group_masses[2] == doctest::Approx(0.44).epsilon(1e-14));
    double total = 0.0;
    for (double m : g.group_masses) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("grouping requires enough tail mass") {
    CHECK_THROWS_AS(group_tail(spectrum_of({0.5, 0.3, 0.2}), 0.5, 4.0, 1.0),
                    PreconditionError);
}
