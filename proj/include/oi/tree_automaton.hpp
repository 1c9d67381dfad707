#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oi/commutative.hpp"
#include "oi/formula.hpp"
#include "oi/invariance.hpp"
#include "oi/tree.hpp"

namespace oi {

/// Unranked tree automaton: horizontal languages are DFAs over the state
/// set (the DFA alphabet is the list of state names, in order).
struct TreeAutomaton {
    std::string name;
    std::vector<std::string> alphabet;
    std::vector<std::string> state_names;
    std::vector<char> final_states;        // per state
    std::vector<std::vector<Dfa>> delta;   // [state][letter]

    int num_states() const { return static_cast<int>(state_names.size()); }
    void validate() const;

    /// No horizontal word accepted for two distinct states under one label.
    bool is_deterministic() const;

    std::string to_text() const;
};

TreeAutomaton parse_tree_automaton(const std::string& text);

/// Def-style sibling invariance: every horizontal language permutation-closed.
bool is_sibling_invariant(const TreeAutomaton& n);

struct RunResult {
    bool accepted = false;
    std::vector<int> states;   // per node, -1 where no state applies
    int failure_node = -1;     // first node without a state, bottom-up
};

/// Bottom-up run under the given sibling order; deterministic automata only.
RunResult run(const TreeAutomaton& n, const UnrankedTree& t, const SiblingOrder& ord);

/// Subset simulation, verdict only; works for nondeterministic automata.
bool run_nondeterministic(const TreeAutomaton& n, const UnrankedTree& t,
                          const SiblingOrder& ord);

/// Runs on the canonical text order; requires sibling invariance.
bool accepts_unordered(const TreeAutomaton& n, const UnrankedTree& t);

/// Horizontal constraints as semilinear sets over child-state counts.
struct CountingTreeAutomaton {
    std::string name;
    std::vector<std::string> alphabet;
    std::vector<std::string> state_names;
    std::vector<char> final_states;
    std::vector<std::vector<SemilinearSet>> delta; // [state][letter], arity = num states

    int num_states() const { return static_cast<int>(state_names.size()); }
    std::string to_text() const;
};

CountingTreeAutomaton to_counting_automaton(const TreeAutomaton& n,
                                            const Guards& guards = {});

/// Bottom-up counting run; throws an input error naming the node when zero
/// or several candidate states apply.
bool run_counting(const CountingTreeAutomaton& c, const UnrankedTree& t);

struct SynthDiagnostics {
    bool functional_consistent = true;
    bool permutation_independent = true;
    bool partial_beyond_bound = true; // horizontal tables only cover observed counts
    std::vector<std::string> conflicts;
};

struct SynthResult {
    TreeAutomaton automaton;
    SynthDiagnostics diagnostics;
    std::vector<InvariantTypeId> state_types;       // per state, sorted ids
    // (label index, sorted child-state counts) -> root state, as observed
    std::map<std::pair<int, std::vector<int>>, int> table;
    int bound = 0;
};

/// Builds the invariant-type automaton empirically from all unordered trees
/// with <= N nodes: states are the sibling-invariant rank-k type components,
/// transitions read off the enumerated trees, horizontal languages emitted
/// as count-threshold DFAs over the observed ranges.
SynthResult synthesize_invariant_type_ta(const std::vector<std::string>& alphabet, int k,
                                         LogicKind logic, int N,
                                         const Guards& guards = {});

/// Linear order on tree nodes defined from sib and child (depth-first
/// preorder); free variables x, y with x first.
Formula dfs_order_formula();

/// Copy of phi with every lt atom replaced by the dfs order macro.
Formula with_dfs_order(const Formula& phi);

struct CourcelleVerdict {
    bool equivalent = true;
    int bound = 0;
    std::optional<UnrankedTree> counterexample;
    std::optional<TreeInvarianceVerdict> invariance_failure;
};

/// Compares a counting sentence on unordered encodings against an ordered
/// sentence on sibling-ordered encodings, over all trees with <= N nodes.
CourcelleVerdict courcelle_equivalence_check(const Formula& phi_counting,
                                             const Formula& phi_ordered,
                                             const std::vector<std::string>& alphabet, int N,
                                             const Guards& guards = {});

} // namespace oi
