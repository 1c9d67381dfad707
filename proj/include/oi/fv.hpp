#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oi/invariance.hpp"
#include "oi/structure.hpp"
#include "oi/types.hpp"

namespace oi {

enum class CompositionOp { Union, Product };

inline const char* op_name(CompositionOp op) {
    return op == CompositionOp::Union ? "union" : "product";
}

/// Composition table: invariant type of op(A, B) as a function of the
/// component invariant types. Component types are keyed over the bare
/// vocabulary; composite types over the union's part-predicate-enlarged
/// vocabulary where applicable.
struct CompositionTable {
    CompositionOp op = CompositionOp::Union;
    Vocabulary vocab;
    int k = 0;
    LogicKind logic = LogicKind::FO;
    int bound = 0;           // component size bound N
    int composite_bound = 0; // size bound of the composite universe

    struct Entry {
        InvariantTypeId result;
        Structure witness_a, witness_b; // one realizing pair
    };
    std::map<std::pair<InvariantTypeId, InvariantTypeId>, Entry> entries;

    std::string dump() const; // deterministic text
};

struct FvDiagnostics {
    bool functional = true;
    std::vector<std::string> conflicts;
};

struct FvBuild {
    CompositionTable table;
    FvDiagnostics diagnostics;
    FlipPartition components;  // partition of the factors
    FlipPartition composites;  // class-restricted partition of the results
};

FvBuild build_composition_table(CompositionOp op, const Vocabulary& vocab, int k,
                                LogicKind logic, int N, const Guards& guards = {});

InvariantTypeId compose(const CompositionTable& table, const InvariantTypeId& ta,
                        const InvariantTypeId& tb);

/// Order on a disjoint union: all of A (in oa order) before all of B.
LinearOrder concat_union_order(const LinearOrder& oa, const LinearOrder& ob);

struct LexEfVerdict {
    bool pass = true;
    long long checked = 0;
    std::string violation; // first violating quadruple, serialized
};

/// Whenever (A1,<) and (A2,<) are k-round equivalent and likewise the B's,
/// the lexicographically ordered products must be k-round equivalent.
/// Exhaustive over ordered structures of the vocabulary up to the size caps.
LexEfVerdict verify_lex_ef_lemma(const Vocabulary& vocab, int k, int max_a, int max_b,
                                 const Guards& guards = {});

struct FlipTransportVerdict {
    bool pass = true;
    long long order_steps = 0; // same-structure steps (pass by construction)
    long long jump_steps = 0;  // equivalence steps verified by the game
    std::string violation;
};

/// Interleaved product/union chain: a flip step on one factor induces a flip
/// step on the composite. Order steps keep the underlying composite; jump
/// steps must be k-round equivalent composites.
FlipTransportVerdict verify_flip_transport(CompositionOp op, const Vocabulary& vocab, int k,
                                           int N, const Guards& guards = {});

} // namespace oi
