#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "oi/tree.hpp"

using namespace oi;

TEST_CASE("tree text round trip") {
    UnrankedTree t = parse_tree("a(b,c(a))");
    CHECK(t.node_count() == 4);
    CHECK(t.to_text() == "a(b,c(a))");
    CHECK(parse_tree(t.to_text()).to_text() == t.to_text());
    CHECK(parse_tree("a").to_text() == "a");
    CHECK_THROWS_AS(parse_tree("a(b"), Error);
    CHECK_THROWS_AS(parse_tree(""), Error);
    CHECK_THROWS_AS(parse_tree("a(b,c)", {"a", "b"}), Error);
}

TEST_CASE("canonical key ignores sibling order") {
    CHECK(parse_tree("a(b,c)").canonical_key() == parse_tree("a(c,b)").canonical_key());
    CHECK(parse_tree("a(b(c),d)").canonical_key() == parse_tree("a(d,b(c))").canonical_key());
    CHECK(parse_tree("a(b,b,c)").canonical_key() != parse_tree("a(b,c,c)").canonical_key());
}

TEST_CASE("tree to structure, one-step edges") {
    UnrankedTree t = parse_tree("a(b,b)");
    Structure s = tree_to_structure(t);
    CHECK(s.size() == 3);
    int child = s.vocab().relation_index("child");
    int pa = s.vocab().relation_index("P_a");
    int pb = s.vocab().relation_index("P_b");
    REQUIRE(child >= 0);
    int e1[2] = {0, 1}, e2[2] = {0, 2}, e3[2] = {1, 2};
    CHECK(s.holds(child, e1));
    CHECK(s.holds(child, e2));
    CHECK(!s.holds(child, e3));
    int n0[1] = {0}, n1[1] = {1};
    CHECK(s.holds(pa, n0));
    CHECK(!s.holds(pa, n1));
    CHECK(s.holds(pb, n1));
}

TEST_CASE("tree to structure, descendant edges") {
    UnrankedTree t = parse_tree("a(b(c))");
    Structure s = tree_to_structure(t, EdgeSemantics::Descendant);
    int child = s.vocab().relation_index("child");
    int e[2] = {0, 2};
    CHECK(s.holds(child, e));
}

TEST_CASE("sibling order encoding") {
    UnrankedTree t = parse_tree("a(b,c)");
    Structure s = tree_to_structure(t, SiblingOrder::text_order(t));
    int sib = s.vocab().relation_index("sib");
    REQUIRE(sib >= 0);
    int bc[2] = {1, 2}, cb[2] = {2, 1}, rb[2] = {0, 1};
    CHECK(s.holds(sib, bc));
    CHECK(!s.holds(sib, cb));
    CHECK(!s.holds(sib, rb));
}

TEST_CASE("sibling order is transitive across a group") {
    UnrankedTree t = parse_tree("a(b,b,b)");
    Structure s = tree_to_structure(t, SiblingOrder::text_order(t));
    int sib = s.vocab().relation_index("sib");
    int e13[2] = {1, 3};
    CHECK(s.holds(sib, e13));
}

TEST_CASE("sibling order enumeration count is the product of factorials") {
    CHECK(enumerate_sibling_orders(parse_tree("a(b,b,b)")).size() == 6);
    CHECK(enumerate_sibling_orders(parse_tree("a(b(c,c),b(c,c))")).size() == 8);
    CHECK(enumerate_sibling_orders(parse_tree("a")).size() == 1);
}

TEST_CASE("tree enumeration counts") {
    // unlabeled rooted trees: 1, 1, 2, 4, 9
    std::vector<std::string> one = {"a"};
    CHECK(enumerate_trees(one, 1).size() == 1);
    CHECK(enumerate_trees(one, 2).size() == 1);
    CHECK(enumerate_trees(one, 3).size() == 2);
    CHECK(enumerate_trees(one, 4).size() == 4);
    CHECK(enumerate_trees(one, 5).size() == 9);
    std::vector<std::string> two = {"a", "b"};
    CHECK(enumerate_trees(two, 1).size() == 2);
    CHECK(enumerate_trees(two, 2).size() == 4);
    CHECK(enumerate_trees(two, 3).size() == 14);
}

TEST_CASE("tree enumeration is duplicate-free and canonical") {
    std::vector<std::string> two = {"a", "b"};
    std::set<std::string> keys;
    for (const UnrankedTree& t : enumerate_trees_up_to(two, 4)) {
        CHECK(t.node_count() <= 4);
        CHECK(keys.insert(t.canonical_key()).second);
    }
    CHECK(keys.size() == 2 + 4 + 14 + 52);
}
