#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "oi/formula.hpp"
#include "oi/guards.hpp"
#include "oi/structure.hpp"

namespace oi {

enum class LogicKind { FO, MSO };

inline const char* logic_name(LogicKind l) { return l == LogicKind::FO ? "FO" : "MSO"; }

using TypeId = int;

/// Pinned parameters: elements and sets (bitmasks), in pin order.
struct Pins {
    std::vector<int> elems;
    std::vector<std::uint64_t> sets;
};

/// Hash-consed canonical rank-k type trees. Equal TypeId within one registry
/// iff structurally equal canonical trees. Append-only; single writer.
class TypeRegistry {
public:
    struct Entry {
        LogicKind logic;
        int rank;
        int vocab;               // index into vocabs()
        int n_elem_pins, n_set_pins;
        std::string diagram;     // atomic diagram bit string (layout per vocab/pins)
        std::vector<TypeId> elem_exts; // sorted unique rank-(k-1) ids
        std::vector<TypeId> set_exts;  // sorted unique, MSO only
    };

    TypeId intern(Entry e);
    const Entry& entry(TypeId t) const { return entries_[t]; }
    int size() const { return static_cast<int>(entries_.size()); }

    int intern_vocab(const Vocabulary& v);
    const Vocabulary& vocab(int i) const { return vocabs_[i]; }

    /// Registry-independent canonical text form (children sorted by their
    /// own serializations); equal strings iff equal canonical trees.
    const std::string& serialize(TypeId t) const;

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, TypeId> index_;
    std::vector<Vocabulary> vocabs_;
    std::unordered_map<std::string, int> vocab_index_;
    mutable std::vector<std::string> serialized_; // lazily filled cache
};

TypeId rank_type(const Structure& a, const Pins& pins, int k, LogicKind logic,
                 TypeRegistry& reg, const Guards& guards = {});
TypeId rank_type(const Structure& a, int k, LogicKind logic, TypeRegistry& reg,
                 const Guards& guards = {});

/// Minimax EF-game solver, the independent oracle for rank_type: spoiler
/// picks a structure and an element (or, for MSO, a subset); the duplicator
/// answers in kind in the other structure; after k rounds the pinned tuples
/// must form a partial isomorphism. Constants are pre-pinned.
bool ef_equivalent(const Structure& a, const Structure& b, int k, LogicKind logic,
                   const Guards& guards = {});

struct RealizedType {
    TypeId type;
    Structure witness; // minimal witness in enumeration order
};

/// All types realized by structures of size <= max_n, sorted by canonical
/// serialization.
std::vector<RealizedType> realized_types(const Vocabulary& vocab, int k, LogicKind logic,
                                         int max_n, TypeRegistry& reg,
                                         const Guards& guards = {});

/// The defining sentence of an FO type: true on B iff rank_type(B) = t.
/// Small ranks and vocabularies only; requires a constant-free vocabulary
/// (the formula grammar has no constant terms).
Formula materialize_type_sentence(TypeId t, const TypeRegistry& reg,
                                  const Guards& guards = {});

} // namespace oi
