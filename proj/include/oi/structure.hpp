#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oi/error.hpp"
#include "oi/guards.hpp"

namespace oi {

/// Relational vocabulary: relation symbols with positive arities plus
/// constant symbols. Names are unique across both lists. The reserved
/// names `<`, `child`, `sib` and the `P_*` part/label predicates are
/// introduced only by the designated constructors (with_order,
/// disjoint_union, tree_to_structure).
struct Vocabulary {
    std::vector<std::pair<std::string, int>> relations;
    std::vector<std::string> constants;

    bool operator==(const Vocabulary&) const = default;

    int relation_index(const std::string& name) const;
    int constant_index(const std::string& name) const;
    void validate() const;
    std::string key() const; // deterministic fingerprint

    static bool reserved_name(const std::string& name);
};

/// Finite relational structure with domain {0,...,size-1}. Relation
/// interpretations are stored as bitsets over mixed-radix tuple codes
/// (component i contributes tuple[i] * size^i).
class Structure {
public:
    Structure() = default;
    Structure(Vocabulary vocab, int size);

    const Vocabulary& vocab() const { return vocab_; }
    int size() const { return n_; }
    const std::string& name() const { return name_; }
    void set_name(std::string s) { name_ = std::move(s); }

    bool holds(int rel, std::span<const int> tuple) const;
    void set(int rel, std::span<const int> tuple, bool value = true);
    int constant_value(int ci) const { return consts_.at(ci); }
    void set_constant(int ci, int value);

    std::int64_t tuple_count(int rel) const; // size^arity
    const std::vector<std::uint64_t>& raw_bits(int rel) const { return interp_[rel]; }
    void set_raw_bit(int rel, std::int64_t code, bool value);
    bool raw_bit(int rel, std::int64_t code) const;

    /// All tuples of a relation, in increasing tuple-code order.
    std::vector<std::vector<int>> tuples(int rel) const;

    Structure relabeled(std::span<const int> perm) const; // element i -> perm[i]

    /// Deterministic serialization; equal strings iff equal structures
    /// (same vocabulary, same labeled interpretation).
    std::string serialize() const;

    /// Minimal serialization over all permutations of the domain.
    std::string canonical_key() const;

    std::string to_text() const; // the line-based text format

private:
    Vocabulary vocab_;
    int n_ = 0;
    std::vector<std::vector<std::uint64_t>> interp_;
    std::vector<int> consts_;
    std::string name_;
};

Structure parse_structure(const std::string& text);

/// Linear order given as the list of elements in increasing order.
struct LinearOrder {
    std::vector<int> perm;

    int size() const { return static_cast<int>(perm.size()); }
    void validate() const;
    /// position[e] = rank of element e in the order
    std::vector<int> positions() const;
    static LinearOrder natural(int n);
};

// -- algebraic constructions -------------------------------------------------

/// Tagged disjoint union with fresh unary part predicates P_left/P_right.
/// Rejects constants: a constant has no canonical home in the union.
Structure disjoint_union(const Structure& a, const Structure& b);

/// Direct product with pair (a,b) encoded as a + |A|*b. Componentwise
/// relation semantics; both factors must be nonempty and constant-free.
Structure direct_product(const Structure& a, const Structure& b);

/// Lexicographic order on pair codes: (a,b) precedes (a',b') iff b <_B b',
/// or b = b' and a <_A a'.
LinearOrder lex_product_order(const LinearOrder& oa, const LinearOrder& ob,
                              int size_a, int size_b);

/// Expansion (A, <) over vocab + {"<"}.
Structure with_order(const Structure& a, const LinearOrder& ord);

// -- enumeration -------------------------------------------------------------

/// All structures of size exactly n; canonical representatives only when
/// up_to_iso. Guard: total relation-bit count <= guards.enum_bits_cap.
std::vector<Structure> enumerate_structures(const Vocabulary& vocab, int n,
                                            bool up_to_iso,
                                            const Guards& guards = {});

/// All structures of size 0..max_n.
std::vector<Structure> enumerate_structures_up_to(const Vocabulary& vocab, int max_n,
                                                  bool up_to_iso,
                                                  const Guards& guards = {});

/// All n! orders, lexicographic in perm.
std::vector<LinearOrder> enumerate_orders(int n, const Guards& guards = {});

} // namespace oi
