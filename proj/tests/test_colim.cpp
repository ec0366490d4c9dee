#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tlab/colim.hpp"

using namespace tlab;

namespace {

// Z[1/p] presented as the constant colimit Z -p-> Z -p-> ...
ColimPtr z_inv(int p) { return ColimSpec::constant(Ring::Z(), 1, Mat{{p}}); }

ColimPtr split_colim() { return ColimSpec::constant(Ring::Z(), 2, Mat{{0, 1}, {1, 0}}); }

PAdicDigits seeded_digits() { return PAdicDigits::random(5, 64, 0xC0FFEEu); }

}  // namespace

TEST_CASE("digit streams and their truncations") {
    PAdicDigits d;
    d.p = 3;
    d.digits = {2, 0, 1};
    d.validate();
    CHECK(d.tau(0) == 2);
    CHECK(d.tau(1) == 2);
    CHECK(d.tau(2) == 11);
    CHECK_THROWS_AS(d.tau(3), std::out_of_range);

    PAdicDigits bad = d;
    bad.digits[0] = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = d;
    bad.digits[0] = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // unit flag set

    auto r1 = PAdicDigits::random(7, 20, 42);
    auto r2 = PAdicDigits::random(7, 20, 42);
    CHECK(r1.digits == r2.digits);  // deterministic for a fixed seed
    CHECK(r1.digits.size() == 20);
    CHECK(r1.digits[0] != 0);
    for (const Int& c : r1.digits) CHECK((c >= 0 && c < 7));
}

TEST_CASE("stage access, composition and purity") {
    auto c = z_inv(2);
    CHECK(colim_rank(*c, 0) == 1);
    CHECK(colim_rank(*c, 9) == 1);
    CHECK(colim_transition(*c, 3) == Mat{{2}});
    CHECK(colim_compose(*c, 1, 5) == Mat{{16}});
    CHECK(!colim_max_stage(*c));
    CHECK(colim_nonzero(*c));
    CHECK(!colim_pure_at(*c, 0));  // index 2 over Z

    auto u = ColimSpec::constant(Ring::invert({3}), 1, Mat{{3}});
    CHECK(colim_pure_at(*u, 0));  // 3 is a unit there

    std::vector<ColimStage> st;
    st.push_back({1, Mat{{1}, {0}}});
    st.push_back({2, Mat(0, 0)});
    auto t = ColimSpec::truncated(Ring::Z(), st);
    CHECK(colim_rank(*t, 1) == 2);
    CHECK(colim_max_stage(*t) == 1);
    CHECK_THROWS_AS(colim_rank(*t, 2), std::out_of_range);

    std::vector<ColimStage> bad;
    bad.push_back({2, Mat{{1, 0}}});  // kills a coordinate
    bad.push_back({1, Mat(0, 0)});
    CHECK_THROWS_AS(ColimSpec::truncated(Ring::Z(), bad), std::invalid_argument);
}

TEST_CASE("dual towers transpose the transitions") {
    auto d = dual_tower(z_inv(5));
    CHECK(tower_dim(*d, 4) == 1);
    CHECK(tower_bond(*d, 2) == Mat{{5}});

    auto s = dual_tower(ColimSpec::sum(z_inv(2), z_inv(3)));
    CHECK(tower_dim(*s, 0) == 2);
    CHECK(tower_bond(*s, 0) == Mat{{2, 0}, {0, 3}});

    auto xi = xi_module(seeded_digits(), 10);
    auto xd = dual_tower(xi);
    const PAdicDigits dg = seeded_digits();
    for (int n = 0; n + 1 < 10; ++n) {
        Int cn = dg.digits[size_t(n + 1)];
        CHECK(tower_bond(*xd, n) == Mat{{1, 0}, {cn * 5, 5}});
    }
}

TEST_CASE("coreduced: localizations yes, free modules no") {
    CHECK(coreduced_check(z_inv(2), 12).holds());
    CHECK(coreduced_check(ColimSpec::sum(z_inv(2), z_inv(7)), 12).holds());

    auto free_z = ColimSpec::constant(Ring::Z(), 1, Mat{{1}});
    CHECK(coreduced_check(free_z, 12).fails());

    std::vector<ColimStage> st;
    st.push_back({3, Mat(0, 0)});
    CHECK(coreduced_check(ColimSpec::truncated(Ring::Z(), st), 12).fails());

    CHECK(coreduced_check(xi_module(seeded_digits(), 20), 12).holds());
}

TEST_CASE("projectivity certificates") {
    // identity and permutation transitions split, so the colimit is projective
    CHECK(is_projective(ColimSpec::constant(Ring::Z(), 1, Mat{{1}}), 12).holds());
    CHECK(is_projective(split_colim(), 12).holds());
    std::vector<ColimStage> st;
    st.push_back({2, Mat(0, 0)});
    CHECK(is_projective(ColimSpec::truncated(Ring::Z(), st), 12).holds());

    // a nonzero coreduced module has no projective summand at all
    CHECK(is_projective(z_inv(2), 12).fails());
    CHECK(is_projective(xi_module(seeded_digits(), 20), 12).fails());
}

TEST_CASE("R-projective lengths over constant tails") {
    auto rep = r_projective_length(z_inv(2), Ordinal::parse("w"), 12);
    CHECK(rep.length.definite);
    CHECK(rep.length.length == Ordinal::from_nat(1));
    CHECK(rep.length.plain == LengthReport::Plain::Yes);
    CHECK(rep.coreduced.holds());
    CHECK(rep.projective.fails());

    auto proj = r_projective_length(split_colim(), Ordinal::parse("w"), 12);
    CHECK(proj.length.definite);
    CHECK(proj.length.length.is_zero());
    CHECK(proj.projective.holds());

    auto sum = r_projective_length(ColimSpec::sum(z_inv(2), split_colim()), Ordinal::parse("w"), 12);
    CHECK(sum.length.definite);
    CHECK(sum.length.length == Ordinal::from_nat(1));
    CHECK(sum.length.plain == LengthReport::Plain::Yes);
}

TEST_CASE("xi modules carry e coherently") {
    PAdicDigits d = seeded_digits();
    auto xi = xi_module(d, 12);
    CHECK(colim_rank(*xi, 5) == 2);
    for (int n = 0; n + 1 < 12; ++n) {
        Mat t = colim_transition(*xi, n);
        Int pn = 1;
        for (int i = 0; i < n; ++i) pn *= 5;
        // e = tau_n f + p^n g_n must map to e = tau_{n+1} f + p^{n+1} g_{n+1}
        CHECK(t * Mat{{d.tau(n)}, {pn}} == Mat{{d.tau(n + 1)}, {pn * 5}});
    }
    CHECK(xi->ring.is_local());

    auto wp = xi_well_pointed(xi);
    CHECK(wp.holds);  // tau is a unit mod p, so e never becomes divisible

    auto rep = r_projective_length(xi, Ordinal::parse("w"), 12);
    CHECK(rep.coreduced.holds());
    CHECK(rep.projective.fails());
    CHECK(rep.length.definite);
    CHECK(rep.length.length == Ordinal::from_nat(1));
    CHECK(rep.length.plain == LengthReport::Plain::Yes);

    // a stream that is not a unit mod p is rejected by the well-pointed report
    PAdicDigits nz = d;
    nz.digits[0] = 0;
    nz.unit_mod_p = false;
    auto bad = xi_module(nz, 6);
    CHECK(!xi_well_pointed(bad).holds);
}

TEST_CASE("wedge sums glue arms along the core") {
    // one identity arm glued along 1 -> 1 collapses back to the core
    auto arm = ColimSpec::constant(Ring::Z(), 1, Mat{{1}});
    auto w = wedge_sum(1, {arm}, {Mat{{1}}});
    CHECK(colim_rank(*w, 0) == 1);
    CHECK(colim_rank(*w, 1) == 1);
    CHECK(is_projective(w, 12).holds());

    std::vector<Mat> bad_psi = {Mat{{0}}};
    CHECK_THROWS_AS(wedge_sum(1, {arm}, bad_psi), std::invalid_argument);
}

TEST_CASE("the gap module") {
    PAdicDigits d = seeded_digits();
    auto m = gap_module(d, 8);
    // stage n is free of rank n+1: core plus n arms, one gluing relation each
    for (int n = 0; n <= 8; ++n) CHECK(colim_rank(*m, n) == n + 1);

    CHECK(tree_length_certificate(*m) == Ordinal::from_nat(2));
    CHECK(coreduced_check(m, 10).holds());
    CHECK(is_projective(m, 10).fails());

    auto rep = r_projective_length(m, Ordinal::parse("w"), 8);
    CHECK(rep.length.definite);
    CHECK(rep.length.length == Ordinal::from_nat(1));
    CHECK(rep.length.plain == LengthReport::Plain::Yes);
}

TEST_CASE("sigma and the partial module") {
    // coreduced inputs only
    CHECK_THROWS_AS(sigma_partial(ColimSpec::constant(Ring::Z(), 1, Mat{{1}}),
                                  Ordinal::from_nat(1), 10),
                    std::invalid_argument);

    auto xi = xi_module(seeded_digits(), 14);
    auto sx = sigma_partial(xi, Ordinal::from_nat(1), 10);
    CHECK(sx.exact);
    CHECK(sx.consistency.holds());
    for (const Lattice& l : sx.sigma) CHECK(l.is_full());  // partial_1 = 0
    CHECK(!colim_nonzero(*sx.partial));

    // R[1/p] over the localization, summed with the gap module
    auto loc_inv = ColimSpec::constant(Ring::local(5), 1, Mat{{5}});
    auto mixed = ColimSpec::sum(loc_inv, gap_module(seeded_digits(), 8));
    auto sm = sigma_partial(mixed, Ordinal::from_nat(1), 8);
    CHECK(sm.exact);
    CHECK(sm.consistency.holds());
    for (const Lattice& l : sm.sigma) CHECK(l.is_full());
    CHECK(!colim_nonzero(*sm.partial));
}

TEST_CASE("phantom resolution pieces") {
    auto c = z_inv(2);
    auto r0 = phantom_resolution(c, Ordinal::from_nat(0), 2, 10);
    REQUIRE(!r0.pieces.empty());
    for (const auto& p : r0.pieces) {
        CHECK(colim_rank(*p.piece, 0) == 1);  // P_n^0 C = C_n
        CHECK(p.purity.holds());
        CHECK(tree_length_certificate(*p.piece).is_zero());
    }
    CHECK(r0.tree_bound.is_zero());

    auto r1 = phantom_resolution(c, Ordinal::from_nat(1), 2, 10);
    for (const auto& p : r1.pieces) {
        CHECK(colim_rank(*p.piece, 0) == 1);  // wedged over C_n
        CHECK(p.purity.holds());
    }
    CHECK(r1.tree_bound == Ordinal::from_nat(1));

    // breadth 1 degenerates: the wedge collapses onto its single arm
    auto r1a = phantom_resolution(c, Ordinal::from_nat(1), 1, 10);
    for (const auto& p : r1a.pieces) CHECK(tree_length_certificate(*p.piece).is_zero());
}

TEST_CASE("tree length certificates propagate through the constructions") {
    auto xi = xi_module(seeded_digits(), 6);
    CHECK(tree_length_certificate(*xi) == Ordinal::from_nat(1));
    CHECK(tree_length_certificate(*z_inv(3)) == Ordinal::from_nat(1));
    auto loc = ColimSpec::constant(Ring::local(5), 1, Mat{{5}});
    CHECK(tree_length_certificate(*ColimSpec::sum(xi, loc)) == Ordinal::from_nat(1));
    std::vector<ColimStage> st;
    st.push_back({4, Mat(0, 0)});
    CHECK(tree_length_certificate(*ColimSpec::truncated(Ring::Z(), st)).is_zero());
}
