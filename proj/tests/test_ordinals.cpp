#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tlab/ordinal.hpp"

using namespace tlab;

namespace {

std::mt19937_64 rng(20260826);

// random CNF below w^5
Ordinal random_ordinal() {
    std::uniform_int_distribution<int> nd(0, 4);
    std::uniform_int_distribution<int> cd(1, 50);
    int nterms = nd(rng);
    Ordinal o;
    int e = 5;
    for (int i = 0; i < nterms && e > 0; ++i) {
        std::uniform_int_distribution<int> ed(0, e - 1);
        e = ed(rng);
        o = o + Ordinal::term(e, cd(rng));
    }
    return o;
}

}  // namespace

TEST_CASE("parse and format round trip") {
    CHECK(Ordinal::parse("0").is_zero());
    CHECK(Ordinal::parse("w").format() == "w");
    CHECK(Ordinal::parse("w^2*2+3").format() == "w^2*2+3");
    CHECK(Ordinal::parse("w^3+w*4+17").format() == "w^3+w*4+17");
    CHECK(Ordinal::parse(" w + 1 ").format() == "w+1");
    for (int i = 0; i < 10000; ++i) {
        Ordinal o = random_ordinal();
        CHECK(Ordinal::parse(o.format()) == o);
    }
    CHECK_THROWS(Ordinal::parse(""));
    CHECK_THROWS(Ordinal::parse("w^10"));        // at the cap
    CHECK_THROWS(Ordinal::parse("w+w"));         // not descending
    CHECK_THROWS(Ordinal::parse("3+w"));         // not descending
    CHECK_THROWS(Ordinal::parse("w^2*0"));
    CHECK_THROWS(Ordinal::parse("q"));
}

TEST_CASE("comparison is the CNF lexicographic order") {
    CHECK(Ordinal::parse("w^2*2+3") < Ordinal::parse("w^3"));
    CHECK(Ordinal::parse("w") < Ordinal::parse("w+1"));
    CHECK(Ordinal::parse("w+1") < Ordinal::parse("w*2"));
    CHECK(Ordinal::parse("5") < Ordinal::parse("w"));
    CHECK(Ordinal::parse("w^2") == Ordinal::parse("w^2"));
    // total order: trichotomy and transitivity on random triples
    for (int i = 0; i < 2000; ++i) {
        Ordinal a = random_ordinal(), b = random_ordinal(), c = random_ordinal();
        CHECK(((a < b) + (b < a) + (a == b)) == 1);
        if (a < b && b < c) CHECK(a < c);
    }
}

TEST_CASE("addition absorbs lower terms") {
    CHECK((Ordinal::parse("w+1") + Ordinal::parse("w")).format() == "w*2");
    CHECK((Ordinal::parse("3") + Ordinal::parse("w")).format() == "w");
    CHECK((Ordinal::parse("w^2") + Ordinal::parse("w+5")).format() == "w^2+w+5");
    CHECK((Ordinal::parse("w*2+3") + Ordinal::parse("w*2")).format() == "w*4");
    // associativity, identity, monotonicity in the right argument
    for (int i = 0; i < 2000; ++i) {
        Ordinal a = random_ordinal(), b = random_ordinal(), c = random_ordinal();
        CHECK((a + b) + c == a + (b + c));
        CHECK(a + Ordinal::zero() == a);
        CHECK(Ordinal::zero() + a == a);
        if (b < c) CHECK(a + b < a + c);
        CHECK(a <= a + b);
    }
}

TEST_CASE("successor and predecessor") {
    CHECK(Ordinal::parse("w^2").successor().format() == "w^2+1");
    CHECK(Ordinal::parse("0").successor().format() == "1");
    CHECK(Ordinal::parse("w+1").predecessor().format() == "w");
    CHECK_THROWS(Ordinal::parse("w").predecessor());
    CHECK_THROWS(Ordinal::parse("0").predecessor());
    for (int i = 0; i < 2000; ++i) {
        Ordinal a = random_ordinal();
        Ordinal s = a.successor();
        CHECK(s.is_successor());
        CHECK(a < s);
        CHECK(s.predecessor() == a);
    }
}

TEST_CASE("classification") {
    CHECK(Ordinal::parse("0").is_zero());
    CHECK(Ordinal::parse("7").is_successor());
    CHECK(Ordinal::parse("w").is_limit());
    CHECK(Ordinal::parse("w^3+w").is_limit());
    CHECK(Ordinal::parse("w^3+4").is_successor());
    CHECK(Ordinal::parse("12").finite().value() == 12);
    CHECK(!Ordinal::parse("w").finite().has_value());
}

TEST_CASE("fundamental sequence frozen examples") {
    CHECK(fundamental(Ordinal::parse("w"), 3).format() == "4");
    CHECK(fundamental(Ordinal::parse("w^2"), 2).format() == "w*3+1");
    CHECK(fundamental(Ordinal::parse("5"), 7).format() == "5");
    CHECK(fundamental(Ordinal::parse("0"), 9).is_zero());
    CHECK(fundamental(Ordinal::parse("w^2+w"), 0).format() == "w^2+1");
    CHECK(fundamental(Ordinal::parse("w^3*2"), 1).format() == "w^3+w^2*2+1");
    CHECK(fundamental(Ordinal::parse("w*5"), 2).format() == "w*4+3");
}

TEST_CASE("fundamental sequence properties") {
    for (int i = 0; i < 3000; ++i) {
        Ordinal a = random_ordinal();
        if (!a.is_limit()) {
            CHECK(fundamental(a, 4) == a);
            continue;
        }
        for (int n = 0; n < 8; ++n) {
            Ordinal fn = fundamental(a, n), fn1 = fundamental(a, n + 1);
            CHECK(fn.is_successor());
            CHECK(fn < fn1);
            CHECK(fn1 < a);
        }
    }
    // cofinality spot check: every beta < w^2 below a sampled bound is
    // eventually exceeded
    Ordinal a = Ordinal::parse("w^2");
    for (int b = 0; b < 40; ++b) {
        Ordinal beta = Ordinal::parse("w*3") + Ordinal::from_nat(b);
        bool exceeded = false;
        for (int n = 0; n < 10 && !exceeded; ++n)
            if (beta < fundamental(a, n)) exceeded = true;
        CHECK(exceeded);
    }
}
