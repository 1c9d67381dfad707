#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oi/tree_automaton.hpp"

using namespace oi;

namespace {

Dfa make_dfa(std::vector<std::string> alphabet, int n, int initial,
             std::vector<int> accepting, std::vector<std::vector<int>> trans) {
    Dfa m;
    m.alphabet = std::move(alphabet);
    m.num_states = n;
    m.initial = initial;
    m.accepting.assign(n, 0);
    for (int q : accepting) m.accepting[q] = 1;
    m.trans = std::move(trans);
    m.validate();
    return m;
}

// horizontal alphabet is the TA state list
const std::vector<std::string> kStates = {"even", "odd"};

// parity of "odd"-children; flip = result parity differs, eps_flips: does the
// empty word land on the flipped side (a-leaves count themselves)
Dfa parity_dfa(bool accept_odd, bool nonempty_required, bool eps_accepting) {
    // states: 0 = eps, 1 = even (nonempty), 2 = odd (nonempty)
    std::vector<int> acc;
    if (eps_accepting) acc.push_back(0);
    acc.push_back(accept_odd ? 2 : 1);
    if (!nonempty_required && !eps_accepting && !accept_odd) acc.push_back(0);
    return make_dfa(kStates, 3, 0, acc, {{1, 2}, {1, 2}, {2, 1}});
}

// accepts iff the tree has an even number of a-labeled leaves
TreeAutomaton even_a_leaves() {
    TreeAutomaton n;
    n.name = "even_a_leaves";
    n.alphabet = {"a", "b"};
    n.state_names = kStates;
    n.final_states = {1, 0};
    // a-node: leaf counts itself; b-node: pure sum
    Dfa a_even = parity_dfa(false, true, false);        // even children sum, not a leaf
    Dfa a_odd = parity_dfa(true, true, true);           // odd sum, or the leaf itself
    Dfa b_even = parity_dfa(false, false, true);        // even sum (leaf: zero)
    Dfa b_odd = parity_dfa(true, false, false);         // odd sum
    n.delta = {{a_even, b_even}, {a_odd, b_odd}};
    n.validate();
    return n;
}

int a_leaf_count(const UnrankedTree& t) {
    int c = 0;
    for (int v = 0; v < t.node_count(); ++v)
        if (t.children[v].empty() && t.alphabet[t.label[v]] == "a") ++c;
    return c;
}

} // namespace

TEST_CASE("validation and text round trip") {
    TreeAutomaton n = even_a_leaves();
    CHECK_NOTHROW(n.validate());
    TreeAutomaton again = parse_tree_automaton(n.to_text());
    CHECK(again.to_text() == n.to_text());
    CHECK(again.alphabet == n.alphabet);
    CHECK(again.state_names == n.state_names);
    TreeAutomaton bad = n;
    bad.delta[0][0].alphabet = {"x", "y"};
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("determinism and invariance of the leaf-parity automaton") {
    TreeAutomaton n = even_a_leaves();
    CHECK(n.is_deterministic());
    CHECK(is_sibling_invariant(n));
}

TEST_CASE("runs match the direct leaf count") {
    TreeAutomaton n = even_a_leaves();
    for (const UnrankedTree& t : enumerate_trees_up_to({"a", "b"}, 6)) {
        bool want = a_leaf_count(t) % 2 == 0;
        RunResult r = run(n, t, SiblingOrder::text_order(t));
        CHECK(r.accepted == want);
        CHECK(accepts_unordered(n, t) == want);
        CHECK(run_nondeterministic(n, t, SiblingOrder::text_order(t)) == want);
    }
    UnrankedTree t = parse_tree("a(b,b)");
    CHECK(run(n, t, SiblingOrder::text_order(t)).accepted); // zero a-leaves
}

TEST_CASE("invariant automata ignore the sibling order") {
    TreeAutomaton n = even_a_leaves();
    for (const UnrankedTree& t : enumerate_trees({"a", "b"}, 5)) {
        bool ref = accepts_unordered(n, t);
        for (const SiblingOrder& o : enumerate_sibling_orders(t))
            CHECK(run(n, t, o).accepted == ref);
    }
}

TEST_CASE("a non-commutative horizontal language breaks invariance") {
    // single state q, final; delta(q, a) = "q then anything" is commutative
    // over a 1-letter horizontal alphabet, so use two states
    TreeAutomaton n;
    n.alphabet = {"a"};
    n.state_names = {"p", "q"};
    n.final_states = {1, 1};
    // p: leaves only; q: first child p, second child q (order-sensitive)
    Dfa leaves_only = make_dfa({"p", "q"}, 2, 0, {0}, {{1, 1}, {1, 1}});
    Dfa p_then_q = make_dfa({"p", "q"}, 4, 0, {2}, {{1, 3}, {3, 2}, {3, 3}, {3, 3}});
    n.delta = {{leaves_only}, {p_then_q}};
    n.validate();
    CHECK(!is_sibling_invariant(n));
    CHECK_THROWS_AS(accepts_unordered(n, parse_tree("a(a,a)", {"a"})), Error);
}

TEST_CASE("nondeterministic automata are flagged and simulated") {
    TreeAutomaton n;
    n.alphabet = {"a"};
    n.state_names = {"p", "q"};
    n.final_states = {0, 1};
    Dfa eps_only = make_dfa({"p", "q"}, 2, 0, {0}, {{1, 1}, {1, 1}});
    n.delta = {{eps_only}, {eps_only}};
    n.validate();
    CHECK(!n.is_deterministic());
    UnrankedTree leaf = parse_tree("a", {"a"});
    CHECK_THROWS_AS(run(n, leaf, SiblingOrder::text_order(leaf)), Error);
    CHECK(run_nondeterministic(n, leaf, SiblingOrder::text_order(leaf)));
}

TEST_CASE("counting conversion preserves acceptance") {
    TreeAutomaton n = even_a_leaves();
    CountingTreeAutomaton c = to_counting_automaton(n);
    for (const UnrankedTree& t : enumerate_trees_up_to({"a", "b"}, 6))
        CHECK(run_counting(c, t) == accepts_unordered(n, t));
    // the b-node even constraint is parity on the odd-state count
    CHECK(c.delta[0][1].to_text().find("S[0,2]") != std::string::npos);
}

TEST_CASE("counting conversion requires invariance") {
    TreeAutomaton n;
    n.alphabet = {"a"};
    n.state_names = {"p", "q"};
    n.final_states = {1, 1};
    Dfa leaves_only = make_dfa({"p", "q"}, 2, 0, {0}, {{1, 1}, {1, 1}});
    Dfa p_then_q = make_dfa({"p", "q"}, 4, 0, {2}, {{1, 3}, {3, 2}, {3, 3}, {3, 3}});
    n.delta = {{leaves_only}, {p_then_q}};
    CHECK_THROWS_AS(to_counting_automaton(n), Error);
}

TEST_CASE("counting runs surface non-determinism with the node") {
    CountingTreeAutomaton c;
    c.alphabet = {"a"};
    c.state_names = {"p", "q"};
    c.final_states = {1, 1};
    SemilinearSet eps;
    eps.alphabet = kStates;
    eps.tuples = {{Progression{0, 0}, Progression{0, 0}}};
    c.delta = {{eps}, {eps}};
    try {
        run_counting(c, parse_tree("a", {"a"}));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("node") != std::string::npos);
    }
}

TEST_CASE("synthesis: one-letter rank 0 collapses to one state") {
    SynthResult r = synthesize_invariant_type_ta({"a"}, 0, LogicKind::FO, 4);
    CHECK(r.automaton.num_states() == 1);
    CHECK(r.diagnostics.functional_consistent);
    CHECK(r.diagnostics.permutation_independent);
}

TEST_CASE("synthesis: rank 1 FO states match the tree flip partition") {
    SynthResult r = synthesize_invariant_type_ta({"a", "b"}, 1, LogicKind::FO, 4);
    CHECK(r.diagnostics.functional_consistent);
    CHECK(r.diagnostics.permutation_independent);
    FlipPartition p = build_tree_flip_partition({"a", "b"}, 1, LogicKind::FO, 4);
    CHECK(r.automaton.num_states() == p.component_count());
    CHECK(is_sibling_invariant(r.automaton));
    // the synthesized automaton assigns each tree its own component
    for (const UnrankedTree& t : enumerate_trees_up_to({"a", "b"}, 4)) {
        RunResult run_r = run(r.automaton, t, SiblingOrder::text_order(t));
        CHECK(run_r.failure_node == -1);
        CHECK(r.state_types[run_r.states[0]] == invariant_type_of(t, p));
    }
}

TEST_CASE("synthesis is monotone from N to N+1") {
    SynthResult small = synthesize_invariant_type_ta({"a"}, 1, LogicKind::FO, 4);
    SynthResult big = synthesize_invariant_type_ta({"a"}, 1, LogicKind::FO, 5);
    // every observed transition of the small build persists in the big one
    for (const auto& [key, state] : small.table) {
        auto it = big.table.find(key);
        REQUIRE(it != big.table.end());
        CHECK(big.state_types[it->second] == small.state_types[state]);
    }
}

TEST_CASE("dfs order macro linearizes trees") {
    // "some node precedes all others" — with dfs order, always true
    Formula min_exists = with_dfs_order(
        parse_formula("(exists x (forall y (or (= x y) (lt x y))))"));
    for (const UnrankedTree& t : enumerate_trees_up_to({"a"}, 4))
        CHECK(evaluate(tree_to_structure(t, SiblingOrder::text_order(t)), min_exists));
    // totality: for each pair of distinct nodes exactly one direction holds
    Formula total = with_dfs_order(parse_formula(
        "(forall x (forall y (or (= x y) (or (lt x y) (lt y x)))))"));
    Formula antisym = with_dfs_order(
        parse_formula("(forall x (forall y (not (and (lt x y) (lt y x)))))"));
    for (const UnrankedTree& t : enumerate_trees_up_to({"a", "b"}, 4))
        for (const SiblingOrder& o : enumerate_sibling_orders(t)) {
            Structure s = tree_to_structure(t, o);
            CHECK(evaluate(s, total));
            CHECK(evaluate(s, antisym));
        }
}

TEST_CASE("dfs order agrees with the preorder walk") {
    Formula lt_xy = dfs_order_formula();
    UnrankedTree t = parse_tree("a(b(a),b)");
    Structure s = tree_to_structure(t, SiblingOrder::text_order(t));
    // text order preorder is exactly node id order
    int sx = lt_xy.free_evars()[0], sy = lt_xy.free_evars()[1];
    if (lt_xy.evar_name(sx) != "x") std::swap(sx, sy);
    for (int u = 0; u < t.node_count(); ++u)
        for (int v = 0; v < t.node_count(); ++v) {
            Assignment alpha;
            alpha.elems.assign(lt_xy.num_evars(), -1);
            alpha.elems[sx] = u;
            alpha.elems[sy] = v;
            CHECK(evaluate(s, lt_xy, alpha) == (u < v));
        }
}

TEST_CASE("ordered and counting parity sentences agree on trees") {
    Formula phi_c = parse_formula("(count 2 x (= x x))");
    Formula phi_o = with_dfs_order(phi_even());
    CourcelleVerdict v = courcelle_equivalence_check(phi_c, phi_o, {"a", "b"}, 4);
    CHECK(v.equivalent);
}

TEST_CASE("order-free sentences pass the equivalence check trivially") {
    Formula f = parse_formula("(exists x (P_a x))");
    CourcelleVerdict v = courcelle_equivalence_check(f, f, {"a", "b"}, 4);
    CHECK(v.equivalent);
}

TEST_CASE("mismatched counting moduli yield a counterexample") {
    Formula parity = parse_formula("(count 2 x (= x x))");
    Formula mod3 = with_dfs_order(order_divisibility_sentence(3, parse_formula("(= x x)")));
    CourcelleVerdict v = courcelle_equivalence_check(parity, mod3, {"a"}, 4);
    CHECK(!v.equivalent);
    REQUIRE(v.counterexample.has_value());
    int n = v.counterexample->node_count();
    CHECK((n % 2 == 0) != (n % 3 == 0));
    CHECK(n == 2); // first separating size
}

TEST_CASE("non-invariant ordered sentences are rejected with a witness") {
    Formula phi_c = parse_formula("(exists x (P_a x))");
    Formula phi_o = parse_formula("(exists x (and (P_a x) (exists y (sib x y))))");
    CourcelleVerdict v = courcelle_equivalence_check(phi_c, phi_o, {"a", "b"}, 3);
    CHECK(!v.equivalent);
    REQUIRE(v.invariance_failure.has_value());
    CHECK(!v.invariance_failure->invariant);
}
