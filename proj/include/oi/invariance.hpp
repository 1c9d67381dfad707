#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oi/formula.hpp"
#include "oi/structure.hpp"
#include "oi/tree.hpp"
#include "oi/types.hpp"

namespace oi {

enum class AuxClass { LinearOrders, SiblingOrders };

/// Invariant-type component id: the minimal canonical serialization among the
/// member ordered types. Stable across runs and registries.
using InvariantTypeId = std::string;

/// Union-find over ordered rank-k types. Two types share a component iff
/// their witnesses are connected by flip steps (re-ordering the auxiliary
/// relation on one structure, or jumping between equal types) within the
/// size-bounded universe the partition was built from.
class FlipPartition {
public:
    FlipPartition(Vocabulary base, int k, LogicKind logic, AuxClass aux, int bound)
        : base_(std::move(base)), k_(k), logic_(logic), aux_(aux), bound_(bound) {}

    const Vocabulary& base_vocab() const { return base_; }
    int rank() const { return k_; }
    LogicKind logic() const { return logic_; }
    AuxClass aux() const { return aux_; }
    int bound() const { return bound_; }

    TypeRegistry& registry() { return reg_; }
    const TypeRegistry& registry() const { return reg_; }

    void add_node(TypeId t, const Structure& witness);
    void merge(TypeId a, TypeId b);
    void finalize(); // computes component ids; idempotent

    int find(TypeId t) const;
    bool contains(TypeId t) const;
    const InvariantTypeId& component_of(TypeId t) const;
    const Structure& witness_of(TypeId t) const;

    int component_count() const { return static_cast<int>(components_.size()); }
    /// Component ids in sorted order.
    const std::vector<InvariantTypeId>& components() const { return components_; }
    /// Members (TypeIds) of the component with the given id.
    std::vector<TypeId> members(const InvariantTypeId& id) const;

    std::string dump() const; // deterministic text form

private:
    Vocabulary base_;
    int k_;
    LogicKind logic_;
    AuxClass aux_;
    int bound_;
    TypeRegistry reg_;
    mutable std::vector<int> parent_;       // -1: not a node
    std::vector<Structure> witness_;
    std::vector<InvariantTypeId> root_id_;  // per root after finalize
    std::vector<InvariantTypeId> components_;
};

/// All aux expansions of a structure, deduplicated up to isomorphism.
/// For ranks <= 1 a single canonical expansion suffices: single-pin atomic
/// diagrams contain no aux facts, so those types are aux-independent.
std::vector<Structure> aux_expansions(const Structure& a, int k, const Guards& guards = {});
std::vector<Structure> aux_expansions(const UnrankedTree& t, int k, const Guards& guards = {});

/// Partition over every structure of size <= N of the vocabulary.
FlipPartition build_flip_partition(const Vocabulary& vocab, int k, LogicKind logic, int N,
                                   const Guards& guards = {});

/// Partition over an explicit class of structures (all of one vocabulary).
FlipPartition build_flip_partition_over(const Vocabulary& vocab,
                                        const std::vector<Structure>& structures, int k,
                                        LogicKind logic, int N, const Guards& guards = {});

/// Partition over all unordered trees with <= N nodes; aux = sibling orders.
FlipPartition build_tree_flip_partition(const std::vector<std::string>& alphabet, int k,
                                        LogicKind logic, int N, const Guards& guards = {});

InvariantTypeId invariant_type_of(const Structure& a, FlipPartition& p,
                                  const Guards& guards = {});
InvariantTypeId invariant_type_of(const UnrankedTree& t, FlipPartition& p,
                                  const Guards& guards = {});

struct InvarianceVerdict {
    bool invariant = true;
    int bound = 0;
    // first disagreement in enumeration order
    std::optional<Structure> structure;
    std::optional<LinearOrder> order1, order2;
};

/// Exhaustive: evaluates phi over every structure of size <= N (up to
/// isomorphism) under every order.
InvarianceVerdict check_invariance(const Formula& phi, const Vocabulary& base, int N,
                                   const Guards& guards = {});

/// Sibling-order variant over trees of <= N nodes.
struct TreeInvarianceVerdict {
    bool invariant = true;
    int bound = 0;
    std::optional<UnrankedTree> tree;
    std::optional<SiblingOrder> order1, order2;
};

TreeInvarianceVerdict check_tree_invariance(const Formula& phi,
                                            const std::vector<std::string>& alphabet, int N,
                                            const Guards& guards = {});

/// Evaluates an invariant sentence on the canonical order 0 < 1 < ...
bool query_membership(const Formula& phi, const Structure& a, const Guards& guards = {});

} // namespace oi
