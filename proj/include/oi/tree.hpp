#pragma once

#include <string>
#include <vector>

#include "oi/guards.hpp"
#include "oi/structure.hpp"

namespace oi {

/// Unranked tree over a label alphabet. Nodes are stored in preorder;
/// node 0 is the root. Children are kept in a definite list order, which
/// serves as the canonical (text-order) sibling order; the tree-as-such
/// is unordered and all sibling orders are enumerable.
struct UnrankedTree {
    std::vector<std::string> alphabet;
    std::vector<int> label;                 // per node, index into alphabet
    std::vector<std::vector<int>> children; // per node, child node ids
    std::vector<int> parent;                // -1 for the root

    int node_count() const { return static_cast<int>(label.size()); }
    void validate() const;

    /// `a(b,c(a))` form, children in list order.
    std::string to_text() const;

    /// Canonical form: children multisets sorted recursively. Equal strings
    /// iff equal unordered trees.
    std::string canonical_key() const;
};

/// A sibling order: for each node, a permutation of its children list.
struct SiblingOrder {
    std::vector<std::vector<int>> order; // order[v] lists children of v left to right

    static SiblingOrder text_order(const UnrankedTree& t);
};

UnrankedTree parse_tree(const std::string& text, const std::vector<std::string>& alphabet = {});

/// Encoding as a structure over (child, (P_a)_a), one-step child edges by
/// default; `descendant` switches to the literal descendant encoding.
enum class EdgeSemantics { OneStep, Descendant };

Structure tree_to_structure(const UnrankedTree& t, EdgeSemantics sem = EdgeSemantics::OneStep);

/// Encoding of the sibling-ordered tree: adds binary `sib`, the order
/// relation restricted to sibling groups (transitive pairs).
Structure tree_to_structure(const UnrankedTree& t, const SiblingOrder& ord,
                            EdgeSemantics sem = EdgeSemantics::OneStep);

/// All sibling orders; guard on the product of factorials of group sizes.
std::vector<SiblingOrder> enumerate_sibling_orders(const UnrankedTree& t,
                                                   const Guards& guards = {});

/// All unordered trees with exactly n nodes over the alphabet, in canonical
/// form, deterministic order.
std::vector<UnrankedTree> enumerate_trees(const std::vector<std::string>& alphabet, int n);
std::vector<UnrankedTree> enumerate_trees_up_to(const std::vector<std::string>& alphabet, int max_n);

} // namespace oi
