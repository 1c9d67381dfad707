#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oi/guards.hpp"
#include "oi/structure.hpp"

namespace oi {

enum class FKind {
    True, False,
    Rel,    // R(x...)
    Eq,     // x = y
    Lt,     // x < y (relation "<" of the structure)
    In,     // X(x)
    Not, And, Or, Implies,
    Exists, Forall,       // element quantifiers
    ExistsSet, ForallSet, // set quantifiers
    Count,  // Q_p x phi
};

/// FO/MSO/CMSO formula. Nodes live in an arena; variables are slots
/// assigned at construction time (input formulas are alpha-renamed apart,
/// so no slot is ever bound twice).
class Formula {
public:
    struct Node {
        FKind kind = FKind::True;
        std::string rel;       // Rel
        int p = 0;             // Count divisor
        int var = -1;          // bound element/set slot for quantifiers
        std::vector<int> args; // element var slots (Rel/Eq/Lt args, In element)
        int svar = -1;         // In set slot
        std::vector<int> kids;
        std::vector<int> free_e, free_s; // sorted free slots
    };

    const Node& node(int i) const { return nodes_[i]; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int root() const { return root_; }
    int num_evars() const { return static_cast<int>(evar_names_.size()); }
    int num_svars() const { return static_cast<int>(svar_names_.size()); }
    const std::string& evar_name(int slot) const { return evar_names_[slot]; }
    const std::string& svar_name(int slot) const { return svar_names_[slot]; }
    const std::vector<int>& free_evars() const { return nodes_[root_].free_e; }
    const std::vector<int>& free_svars() const { return nodes_[root_].free_s; }

    std::string to_text() const;

    /// Relation atoms must match the vocabulary; `lt` needs relation "<".
    void check_vocabulary(const Vocabulary& vocab) const;

private:
    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<std::string> evar_names_, svar_names_;

    friend class FormulaBuilder;
};

/// Programmatic construction; all methods return node ids, finish() seals.
class FormulaBuilder {
public:
    int fresh_evar(const std::string& name);
    int fresh_svar(const std::string& name);

    int tru();
    int fls();
    int rel(const std::string& name, std::vector<int> evars);
    int eq(int x, int y);
    int lt(int x, int y);
    int in(int x, int X);
    int neg(int f);
    int conj(std::vector<int> fs);
    int disj(std::vector<int> fs);
    int implies(int f, int g);
    int exists(int var, int f);
    int forall(int var, int f);
    int exists_set(int var, int f);
    int forall_set(int var, int f);
    int count(int p, int var, int f);

    /// Copy a subformula of another formula, remapping variable slots.
    /// Unmapped bound variables get fresh slots; unmapped free variables
    /// are an error.
    int splice(const Formula& src, int src_node,
               const std::vector<int>& evar_map, const std::vector<int>& svar_map);

    Formula finish(int root);

private:
    Formula f_;
    int add(Formula::Node n);
};

Formula parse_formula(const std::string& text);

int quantifier_rank(const Formula& f);

/// Variable assignment by slot; -1 / absent means unset.
struct Assignment {
    std::vector<int> elems;           // per element slot
    std::vector<std::uint64_t> sets;  // per set slot, bitmask
    std::vector<bool> set_defined;
};

bool evaluate(const Structure& a, const Formula& f, const Assignment& alpha = {},
              const Guards& guards = {});

/// The MSO sentence over sigma + {<} that holds iff the number of elements
/// satisfying psi is divisible by p (count 0 qualifies). psi must have
/// exactly one free element variable. Requires p >= 2.
Formula order_divisibility_sentence(int p, const Formula& psi);

/// order_divisibility_sentence(2, x = x): even domain cardinality.
Formula phi_even();

} // namespace oi
