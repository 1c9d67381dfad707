#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "oi/structure.hpp"

using namespace oi;

namespace {

Vocabulary binary_vocab() { return Vocabulary{{{"E", 2}}, {}}; }
Vocabulary unary_vocab() { return Vocabulary{{{"P", 1}}, {}}; }

Structure pure_set(int n) { return Structure(Vocabulary{}, n); }

} // namespace

TEST_CASE("vocabulary validation") {
    CHECK_NOTHROW(binary_vocab().validate());
    Vocabulary dup{{{"E", 2}, {"E", 1}}, {}};
    CHECK_THROWS_AS(dup.validate(), Error);
    Vocabulary nullary{{{"E", 0}}, {}};
    CHECK_THROWS_AS(nullary.validate(), Error);
    CHECK(Vocabulary::reserved_name("<"));
    CHECK(Vocabulary::reserved_name("child"));
    CHECK(Vocabulary::reserved_name("sib"));
    CHECK(Vocabulary::reserved_name("P_left"));
    CHECK(!Vocabulary::reserved_name("E"));
}

TEST_CASE("structure text format round trip") {
    std::string text =
        "structure G\n"
        "domain 3\n"
        "rel E/2: (0,1) (1,2)\n"
        "const c = 0\n"
        "end\n";
    Structure g = parse_structure(text);
    CHECK(g.size() == 3);
    CHECK(g.name() == "G");
    int t1[2] = {0, 1}, t2[2] = {1, 2}, t3[2] = {2, 0};
    CHECK(g.holds(0, t1));
    CHECK(g.holds(0, t2));
    CHECK(!g.holds(0, t3));
    CHECK(g.constant_value(0) == 0);
    Structure again = parse_structure(g.to_text());
    CHECK(again.serialize() == g.serialize());
}

TEST_CASE("structure parser rejects reserved relation names") {
    CHECK_THROWS_AS(parse_structure("structure G\ndomain 1\nrel </2:\nend\n"), Error);
    CHECK_THROWS_AS(parse_structure("structure G\ndomain 1\nrel P_left/1:\nend\n"), Error);
}

TEST_CASE("disjoint union tags parts") {
    Structure u = disjoint_union(pure_set(1), pure_set(1));
    CHECK(u.size() == 2);
    int pl = u.vocab().relation_index("P_left");
    int pr = u.vocab().relation_index("P_right");
    int e0[1] = {0}, e1[1] = {1};
    CHECK(u.holds(pl, e0));
    CHECK(!u.holds(pl, e1));
    CHECK(u.holds(pr, e1));
    CHECK(!u.holds(pr, e0));
}

TEST_CASE("disjoint union shifts the right part") {
    Structure a(binary_vocab(), 2);
    int e[2] = {0, 1};
    a.set(0, e);
    Structure b(binary_vocab(), 1);
    Structure u = disjoint_union(a, b);
    CHECK(u.size() == 3);
    int t[2] = {0, 1};
    CHECK(u.holds(0, t));
    int pl = u.vocab().relation_index("P_left");
    int x0[1] = {0}, x1[1] = {1}, x2[1] = {2};
    CHECK(u.holds(pl, x0));
    CHECK(u.holds(pl, x1));
    CHECK(!u.holds(pl, x2));
}

TEST_CASE("disjoint union rejects constants") {
    Vocabulary v{{}, {"c"}};
    Structure a(v, 1), b(v, 1);
    CHECK_THROWS_AS(disjoint_union(a, b), Error);
}

TEST_CASE("direct product componentwise semantics") {
    Structure loop(binary_vocab(), 1);
    int l[2] = {0, 0};
    loop.set(0, l);
    Structure edge(binary_vocab(), 2);
    int e[2] = {0, 1};
    edge.set(0, e);
    Structure p = direct_product(loop, edge);
    CHECK(p.size() == 2);
    // pair (0,b) encodes as b; edge ((0,0),(0,1)) = (0,1)
    int t[2] = {0, 1};
    CHECK(p.holds(0, t));
    int loop0[2] = {0, 0};
    CHECK(!p.holds(0, loop0));

    Structure v1(binary_vocab(), 1);
    Structure q = direct_product(v1, v1);
    CHECK(q.size() == 1);
    CHECK(!q.holds(0, loop0));
}

TEST_CASE("union and product sizes are exact") {
    std::mt19937 rng(0);
    auto random_structure = [&](int n) {
        Structure s(binary_vocab(), n);
        for (std::int64_t c = 0; c < s.tuple_count(0); ++c)
            s.set_raw_bit(0, c, rng() & 1);
        return s;
    };
    for (int i = 0; i < 50; ++i) {
        int na = static_cast<int>(rng() % 5) + 1, nb = static_cast<int>(rng() % 5) + 1;
        Structure a = random_structure(na), b = random_structure(nb);
        CHECK(disjoint_union(a, b).size() == na + nb);
        CHECK(direct_product(a, b).size() == na * nb);
    }
}

TEST_CASE("lex product order") {
    LinearOrder oa{{0, 1}}, ob{{0}};
    CHECK(lex_product_order(oa, ob, 2, 1).perm == std::vector<int>{0, 1});
    LinearOrder oa2{{1, 0}}, ob2{{0, 1}};
    CHECK(lex_product_order(oa2, ob2, 2, 2).perm == std::vector<int>{1, 0, 3, 2});
}

TEST_CASE("lex product order is a permutation satisfying the lex rule") {
    std::mt19937 rng(1);
    for (int trial = 0; trial < 30; ++trial) {
        int na = static_cast<int>(rng() % 5) + 1, nb = static_cast<int>(rng() % 5) + 1;
        std::vector<int> pa(na), pb(nb);
        for (int i = 0; i < na; ++i) pa[i] = i;
        for (int i = 0; i < nb; ++i) pb[i] = i;
        std::shuffle(pa.begin(), pa.end(), rng);
        std::shuffle(pb.begin(), pb.end(), rng);
        LinearOrder oa{pa}, ob{pb};
        LinearOrder lex = lex_product_order(oa, ob, na, nb);
        CHECK_NOTHROW(lex.validate());
        std::vector<int> posa = oa.positions(), posb = ob.positions(), pos = lex.positions();
        for (int x = 0; x < na * nb; ++x)
            for (int y = 0; y < na * nb; ++y) {
                int ax = x % na, bx = x / na, ay = y % na, by = y / na;
                bool lex_lt = posb[bx] < posb[by] || (bx == by && posa[ax] < posa[ay]);
                CHECK((pos[x] < pos[y]) == lex_lt);
            }
    }
}

TEST_CASE("enumeration counts") {
    CHECK(enumerate_structures(unary_vocab(), 1, false).size() == 2);
    CHECK(enumerate_structures(binary_vocab(), 2, true).size() == 10);
    CHECK(enumerate_structures(Vocabulary{}, 3, false).size() == 1);
    CHECK(enumerate_orders(1).size() == 1);
    CHECK(enumerate_orders(3).size() == 6);
}

TEST_CASE("enumeration guard") {
    CHECK_THROWS_AS(enumerate_structures(binary_vocab(), 6, false), Error);
    Guards g;
    g.order_cap = 5;
    CHECK_THROWS_AS(enumerate_orders(4, g), Error);
}

TEST_CASE("iso-quotiented enumeration covers and separates") {
    for (int n = 0; n <= 3; ++n) {
        auto all = enumerate_structures(binary_vocab(), n, false);
        auto reps = enumerate_structures(binary_vocab(), n, true);
        std::set<std::string> rep_keys, all_keys;
        for (const Structure& s : reps) CHECK(rep_keys.insert(s.canonical_key()).second);
        for (const Structure& s : all) all_keys.insert(s.canonical_key());
        CHECK(rep_keys == all_keys);
    }
}

TEST_CASE("with_order adds the order relation") {
    Structure a = pure_set(3);
    Structure o = with_order(a, LinearOrder{{2, 0, 1}});
    int lt = o.vocab().relation_index("<");
    REQUIRE(lt >= 0);
    int t1[2] = {2, 0}, t2[2] = {0, 2};
    CHECK(o.holds(lt, t1));
    CHECK(!o.holds(lt, t2));
    CHECK_THROWS_AS(with_order(o, LinearOrder::natural(3)), Error);
}
