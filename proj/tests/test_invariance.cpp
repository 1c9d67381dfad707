#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "oi/invariance.hpp"

using namespace oi;

namespace {

Vocabulary unary_vocab() { return Vocabulary{{{"P", 1}}, {}}; }

Structure pure_set(int n) { return Structure(Vocabulary{}, n); }

} // namespace

TEST_CASE("aux expansions: rank <= 1 needs one order") {
    CHECK(aux_expansions(pure_set(4), 0).size() == 1);
    CHECK(aux_expansions(pure_set(4), 1).size() == 1);
}

TEST_CASE("rank 1 types really are order blind") {
    // justification for the single-expansion shortcut: exhaustively, every
    // order yields the same rank-1 type
    for (const Vocabulary& v : {Vocabulary{}, unary_vocab(), Vocabulary{{{"E", 2}}, {}}})
        for (const Structure& a : enumerate_structures_up_to(v, 3, true))
            for (LogicKind logic : {LogicKind::FO, LogicKind::MSO}) {
                TypeRegistry reg;
                std::set<TypeId> seen;
                for (const LinearOrder& o : enumerate_orders(a.size()))
                    seen.insert(rank_type(with_order(a, o), 1, logic, reg));
                CHECK(seen.size() == 1);
            }
}

TEST_CASE("aux expansions dedup up to isomorphism") {
    // pure set: all orders isomorphic
    CHECK(aux_expansions(pure_set(3), 2).size() == 1);
    // P singles out one element: orders differ by its position
    Structure a(unary_vocab(), 3);
    int e[1] = {0};
    a.set(0, e);
    CHECK(aux_expansions(a, 2).size() == 3);
}

TEST_CASE("flip partition of pure sets at rank 1") {
    FlipPartition p = build_flip_partition(Vocabulary{}, 1, LogicKind::FO, 3);
    CHECK(p.component_count() == 2); // empty vs nonempty
    CHECK(invariant_type_of(pure_set(1), p) == invariant_type_of(pure_set(3), p));
    CHECK(invariant_type_of(pure_set(0), p) != invariant_type_of(pure_set(1), p));
}

TEST_CASE("flip partition respects invariant sentences") {
    // phi_even is order invariant with qr 4, so the rank-4 MSO partition
    // must separate sizes of different parity
    Guards g;
    g.raise_rank(4);
    FlipPartition p = build_flip_partition(Vocabulary{}, 4, LogicKind::MSO, 4, g);
    CHECK(invariant_type_of(pure_set(2), p, g) != invariant_type_of(pure_set(3), p, g));
    CHECK(invariant_type_of(pure_set(1), p, g) != invariant_type_of(pure_set(2), p, g));
}

TEST_CASE("component ids are stable across builds") {
    FlipPartition p1 = build_flip_partition(unary_vocab(), 2, LogicKind::FO, 3);
    FlipPartition p2 = build_flip_partition(unary_vocab(), 2, LogicKind::FO, 3);
    CHECK(p1.components() == p2.components());
    CHECK(p1.dump() == p2.dump());
    for (const Structure& a : enumerate_structures_up_to(unary_vocab(), 3, true))
        CHECK(invariant_type_of(a, p1) == invariant_type_of(a, p2));
}

TEST_CASE("invariant type is isomorphism invariant") {
    FlipPartition p = build_flip_partition(unary_vocab(), 2, LogicKind::FO, 3);
    Structure a(unary_vocab(), 3);
    int e[1] = {2};
    a.set(0, e);
    Structure b(unary_vocab(), 3);
    int e2[1] = {0};
    b.set(0, e2);
    CHECK(invariant_type_of(a, p) == invariant_type_of(b, p));
}

TEST_CASE("partition membership errors") {
    FlipPartition p = build_flip_partition(Vocabulary{}, 1, LogicKind::FO, 2);
    CHECK_THROWS_AS(invariant_type_of(pure_set(3), p), Error);
    CHECK_THROWS_AS(invariant_type_of(Structure(unary_vocab(), 1), p), Error);
}

TEST_CASE("check_invariance accepts order-free and divisibility sentences") {
    CHECK(check_invariance(parse_formula("(exists x (P x))"), unary_vocab(), 3).invariant);
    CHECK(check_invariance(phi_even(), Vocabulary{}, 4).invariant);
}

TEST_CASE("check_invariance rejects order-sensitive sentences") {
    // "the least element satisfies P"
    Formula f = parse_formula(
        "(exists x (and (P x) (forall y (or (= x y) (lt x y)))))");
    InvarianceVerdict v = check_invariance(f, unary_vocab(), 3);
    CHECK(!v.invariant);
    REQUIRE(v.structure.has_value());
    REQUIRE(v.order1.has_value());
    REQUIRE(v.order2.has_value());
    // the reported pair really disagrees
    bool r1 = evaluate(with_order(*v.structure, *v.order1), f);
    bool r2 = evaluate(with_order(*v.structure, *v.order2), f);
    CHECK(r1 != r2);
}

TEST_CASE("tree invariance of sibling-order-free sentences") {
    Formula f = parse_formula("(exists x (P_a x))");
    CHECK(check_tree_invariance(f, {"a", "b"}, 4).invariant);
}

TEST_CASE("tree invariance counterexample for sib-sensitive sentences") {
    // "some a-node has a right sibling"
    Formula f = parse_formula("(exists x (and (P_a x) (exists y (sib x y))))");
    TreeInvarianceVerdict v = check_tree_invariance(f, {"a", "b"}, 3);
    CHECK(!v.invariant);
    REQUIRE(v.tree.has_value());
    bool r1 = evaluate(tree_to_structure(*v.tree, *v.order1), f);
    bool r2 = evaluate(tree_to_structure(*v.tree, *v.order2), f);
    CHECK(r1 != r2);
}

TEST_CASE("query_membership on the canonical order") {
    CHECK(query_membership(phi_even(), pure_set(4)));
    CHECK(!query_membership(phi_even(), pure_set(5)));
    CHECK(query_membership(phi_even(), pure_set(0)));
}

TEST_CASE("tree flip partition at rank 1 counts label occupancy") {
    // rank-1 tree types over one label: trivial (every tree has a node)
    FlipPartition p = build_tree_flip_partition({"a"}, 1, LogicKind::FO, 3);
    CHECK(p.component_count() == 1);
    // two labels: which labels occur
    FlipPartition q = build_tree_flip_partition({"a", "b"}, 1, LogicKind::FO, 3);
    CHECK(q.component_count() == 3);
}
