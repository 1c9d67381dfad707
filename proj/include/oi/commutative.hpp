#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oi/error.hpp"
#include "oi/guards.hpp"

namespace oi {

/// Deterministic finite automaton with a total transition function. Words
/// are sequences of letter indices into the alphabet.
struct Dfa {
    std::string name;
    std::vector<std::string> alphabet;
    int num_states = 0;
    int initial = 0;
    std::vector<char> accepting;          // per state
    std::vector<std::vector<int>> trans;  // trans[state][letter]

    void validate() const;
    int step(int state, std::span<const int> word) const;
    bool accepts(std::span<const int> word) const;

    /// Restriction to states reachable from the initial state.
    Dfa trimmed() const;
    /// Canonical minimal DFA (trim + Moore refinement, states in BFS order).
    Dfa minimized() const;

    std::string to_text() const;
};

Dfa parse_dfa(const std::string& text);

bool dfa_equivalent(const Dfa& a, const Dfa& b);

/// True iff L(M) is permutation-closed: on the minimal DFA, transitions
/// commute letterwise.
bool is_commutative(const Dfa& m);

/// Two words with equal Parikh image and different membership, if any.
std::optional<std::pair<std::vector<int>, std::vector<int>>> commutativity_witness(const Dfa& m);

/// Arithmetic progression S_{k,p} = {k + n*p : n >= 0}; p = 0 is the
/// singleton {k}.
struct Progression {
    std::int64_t k = 0, p = 0;

    bool contains(std::int64_t m) const {
        return m >= k && (p == 0 ? m == k : (m - k) % p == 0);
    }
    auto operator<=>(const Progression&) const = default;
    std::string to_text() const { return "S[" + std::to_string(k) + "," + std::to_string(p) + "]"; }
};

/// Finite family of r-tuples of progressions; denotes the union of the
/// componentwise products.
struct SemilinearSet {
    std::vector<std::string> alphabet; // binds the arity r
    std::vector<std::vector<Progression>> tuples;

    int arity() const { return static_cast<int>(alphabet.size()); }
    bool contains(std::span<const std::int64_t> v) const;
    void normalize(); // sort + dedupe tuples
    std::string to_text() const;
};

SemilinearSet parse_semilinear(const std::string& text, std::vector<std::string> alphabet);

/// The length set of a unary DFA as progressions, read off the lasso.
std::vector<Progression> unary_semilinear(const Dfa& m);

/// Semilinear characterization of the Parikh image via partitioned words
/// a_1* a_2* ... a_r*: exact for permutation-closed languages.
SemilinearSet parikh_decompose(const Dfa& m, bool require_commutative,
                               const Guards& guards = {});

bool semilinear_membership(const SemilinearSet& s, std::span<const std::int64_t> v);

std::vector<std::int64_t> parikh_vector(const Dfa& m, std::span<const int> word);

} // namespace oi
