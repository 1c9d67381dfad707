#include "oi/commutative.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace oi {

void Dfa::validate() const {
    if (alphabet.empty()) throw input_error("dfa: empty alphabet");
    if (num_states <= 0) throw input_error("dfa: no states");
    if (initial < 0 || initial >= num_states) throw input_error("dfa: bad initial state");
    if (static_cast<int>(accepting.size()) != num_states ||
        static_cast<int>(trans.size()) != num_states)
        throw input_error("dfa: inconsistent state arrays");
    for (const auto& row : trans) {
        if (row.size() != alphabet.size()) throw input_error("dfa: transition function not total");
        for (int q : row)
            if (q < 0 || q >= num_states) throw input_error("dfa: transition target out of range");
    }
    for (std::size_t i = 0; i < alphabet.size(); ++i)
        for (std::size_t j = i + 1; j < alphabet.size(); ++j)
            if (alphabet[i] == alphabet[j]) throw input_error("dfa: duplicate letter");
}

int Dfa::step(int state, std::span<const int> word) const {
    for (int a : word) {
        if (a < 0 || a >= static_cast<int>(alphabet.size()))
            throw input_error("dfa: letter index out of range");
        state = trans[state][a];
    }
    return state;
}

bool Dfa::accepts(std::span<const int> word) const {
    return accepting[step(initial, word)];
}

Dfa Dfa::trimmed() const {
    std::vector<int> id(num_states, -1);
    std::vector<int> order;
    id[initial] = 0;
    order.push_back(initial);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int a = 0; a < static_cast<int>(alphabet.size()); ++a) {
            int t = trans[order[i]][a];
            if (id[t] == -1) {
                id[t] = static_cast<int>(order.size());
                order.push_back(t);
            }
        }
    Dfa out;
    out.name = name;
    out.alphabet = alphabet;
    out.num_states = static_cast<int>(order.size());
    out.initial = 0;
    out.accepting.resize(out.num_states);
    out.trans.assign(out.num_states, std::vector<int>(alphabet.size()));
    for (int q = 0; q < out.num_states; ++q) {
        out.accepting[q] = accepting[order[q]];
        for (int a = 0; a < static_cast<int>(alphabet.size()); ++a)
            out.trans[q][a] = id[trans[order[q]][a]];
    }
    return out;
}

Dfa Dfa::minimized() const {
    Dfa t = trimmed();
    std::vector<int> cls(t.num_states);
    for (int q = 0; q < t.num_states; ++q) cls[q] = t.accepting[q] ? 1 : 0;
    while (true) {
        std::map<std::vector<int>, int> sig_id;
        std::vector<int> next(t.num_states);
        for (int q = 0; q < t.num_states; ++q) {
            std::vector<int> sig{cls[q]};
            for (int a = 0; a < static_cast<int>(t.alphabet.size()); ++a)
                sig.push_back(cls[t.trans[q][a]]);
            auto [it, _] = sig_id.try_emplace(std::move(sig), static_cast<int>(sig_id.size()));
            next[q] = it->second;
        }
        if (next == cls) break;
        cls = std::move(next);
    }
    // BFS-canonical numbering of the quotient
    int nc = *std::max_element(cls.begin(), cls.end()) + 1;
    std::vector<int> rep(nc, -1);
    for (int q = t.num_states - 1; q >= 0; --q) rep[cls[q]] = q;
    std::vector<int> id(nc, -1), order;
    id[cls[t.initial]] = 0;
    order.push_back(cls[t.initial]);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int a = 0; a < static_cast<int>(t.alphabet.size()); ++a) {
            int c = cls[t.trans[rep[order[i]]][a]];
            if (id[c] == -1) {
                id[c] = static_cast<int>(order.size());
                order.push_back(c);
            }
        }
    Dfa out;
    out.name = t.name;
    out.alphabet = t.alphabet;
    out.num_states = static_cast<int>(order.size());
    out.initial = 0;
    out.accepting.resize(out.num_states);
    out.trans.assign(out.num_states, std::vector<int>(t.alphabet.size()));
    for (int q = 0; q < out.num_states; ++q) {
        out.accepting[q] = t.accepting[rep[order[q]]];
        for (int a = 0; a < static_cast<int>(t.alphabet.size()); ++a)
            out.trans[q][a] = id[cls[t.trans[rep[order[q]]][a]]];
    }
    return out;
}

std::string Dfa::to_text() const {
    std::string out = "dfa " + (name.empty() ? std::string("M") : name) + "\n";
    out += "alphabet";
    for (const auto& a : alphabet) out += " " + a;
    out += "\nstates";
    for (int q = 0; q < num_states; ++q) out += " " + std::to_string(q);
    out += "\ninitial " + std::to_string(initial) + "\naccepting";
    for (int q = 0; q < num_states; ++q)
        if (accepting[q]) out += " " + std::to_string(q);
    out += "\n";
    for (int q = 0; q < num_states; ++q)
        for (int a = 0; a < static_cast<int>(alphabet.size()); ++a)
            out += "trans " + std::to_string(q) + " " + alphabet[a] + " " +
                   std::to_string(trans[q][a]) + "\n";
    out += "end\n";
    return out;
}

Dfa parse_dfa(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Dfa m;
    std::map<std::string, int> state_id;
    std::map<std::string, int> letter_id;
    std::vector<std::tuple<std::string, std::string, std::string>> raw_trans;
    std::vector<std::string> raw_accepting;
    std::string raw_initial;
    bool seen_dfa = false, seen_end = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (seen_end) throw input_error("dfa line " + std::to_string(lineno) + ": text after end");
        auto rest = [&] {
            std::vector<std::string> v;
            std::string w;
            while (ls >> w) v.push_back(w);
            return v;
        };
        if (word == "end") {
            seen_end = true;
            break;
        }
        if (word == "dfa") {
            if (!(ls >> m.name)) throw input_error("dfa line " + std::to_string(lineno) + ": missing name");
            seen_dfa = true;
        } else if (word == "alphabet") {
            m.alphabet = rest();
            for (const auto& a : m.alphabet)
                letter_id.try_emplace(a, static_cast<int>(letter_id.size()));
        } else if (word == "states") {
            for (const auto& s : rest())
                state_id.try_emplace(s, static_cast<int>(state_id.size()));
        } else if (word == "initial") {
            if (!(ls >> raw_initial))
                throw input_error("dfa line " + std::to_string(lineno) + ": missing initial state");
        } else if (word == "accepting") {
            raw_accepting = rest();
        } else if (word == "trans") {
            std::string from, letter, to;
            if (!(ls >> from >> letter >> to))
                throw input_error("dfa line " + std::to_string(lineno) + ": malformed transition");
            raw_trans.emplace_back(from, letter, to);
        } else {
            throw input_error("dfa line " + std::to_string(lineno) + ": unknown directive " + word);
        }
    }
    if (!seen_dfa) throw input_error("dfa: missing header line");
    if (!seen_end) throw input_error("dfa: missing end line");
    m.num_states = static_cast<int>(state_id.size());
    if (m.num_states == 0) throw input_error("dfa: no states declared");
    auto state = [&](const std::string& s) {
        auto it = state_id.find(s);
        if (it == state_id.end()) throw input_error("dfa: unknown state " + s);
        return it->second;
    };
    if (raw_initial.empty()) throw input_error("dfa: missing initial state");
    m.initial = state(raw_initial);
    m.accepting.assign(m.num_states, 0);
    for (const auto& s : raw_accepting) m.accepting[state(s)] = 1;
    m.trans.assign(m.num_states, std::vector<int>(m.alphabet.size(), -1));
    for (const auto& [from, letter, to] : raw_trans) {
        auto lit = letter_id.find(letter);
        if (lit == letter_id.end()) throw input_error("dfa: unknown letter " + letter);
        m.trans[state(from)][lit->second] = state(to);
    }
    for (int q = 0; q < m.num_states; ++q)
        for (std::size_t a = 0; a < m.alphabet.size(); ++a)
            if (m.trans[q][a] < 0)
                throw input_error("dfa: missing transition from state " + std::to_string(q) +
                                  " on " + m.alphabet[a]);
    m.validate();
    return m;
}

bool dfa_equivalent(const Dfa& a, const Dfa& b) {
    if (a.alphabet != b.alphabet) throw input_error("dfa_equivalent: alphabet mismatch");
    std::set<std::pair<int, int>> seen;
    std::deque<std::pair<int, int>> queue{{a.initial, b.initial}};
    seen.insert({a.initial, b.initial});
    while (!queue.empty()) {
        auto [p, q] = queue.front();
        queue.pop_front();
        if (static_cast<bool>(a.accepting[p]) != static_cast<bool>(b.accepting[q])) return false;
        for (std::size_t l = 0; l < a.alphabet.size(); ++l) {
            std::pair<int, int> next{a.trans[p][l], b.trans[q][l]};
            if (seen.insert(next).second) queue.push_back(next);
        }
    }
    return true;
}

bool is_commutative(const Dfa& m) {
    m.validate();
    Dfa mm = m.minimized();
    int r = static_cast<int>(mm.alphabet.size());
    for (int q = 0; q < mm.num_states; ++q)
        for (int a = 0; a < r; ++a)
            for (int b = a + 1; b < r; ++b)
                if (mm.trans[mm.trans[q][a]][b] != mm.trans[mm.trans[q][b]][a]) return false;
    return true;
}

namespace {

std::vector<int> bfs_word_to(const Dfa& m, int target) {
    std::vector<int> prev_state(m.num_states, -1), prev_letter(m.num_states, -1);
    std::vector<char> seen(m.num_states, 0);
    std::deque<int> queue{m.initial};
    seen[m.initial] = 1;
    while (!queue.empty()) {
        int q = queue.front();
        queue.pop_front();
        if (q == target) break;
        for (std::size_t a = 0; a < m.alphabet.size(); ++a) {
            int t = m.trans[q][a];
            if (!seen[t]) {
                seen[t] = 1;
                prev_state[t] = q;
                prev_letter[t] = static_cast<int>(a);
                queue.push_back(t);
            }
        }
    }
    std::vector<int> word;
    for (int q = target; prev_state[q] != -1; q = prev_state[q]) word.push_back(prev_letter[q]);
    std::reverse(word.begin(), word.end());
    return word;
}

// shortest word on which exactly one of the two states accepts; the states
// are distinct states of a minimal DFA, so one exists
std::vector<int> distinguishing_word(const Dfa& m, int s1, int s2) {
    std::map<std::pair<int, int>, std::pair<std::pair<int, int>, int>> prev;
    std::deque<std::pair<int, int>> queue{{s1, s2}};
    prev[{s1, s2}] = {{-1, -1}, -1};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        if (static_cast<bool>(m.accepting[cur.first]) != static_cast<bool>(m.accepting[cur.second])) {
            std::vector<int> word;
            for (auto p = cur; prev[p].second != -1; p = prev[p].first)
                word.push_back(prev[p].second);
            std::reverse(word.begin(), word.end());
            return word;
        }
        for (std::size_t a = 0; a < m.alphabet.size(); ++a) {
            std::pair<int, int> next{m.trans[cur.first][a], m.trans[cur.second][a]};
            if (prev.try_emplace(next, std::make_pair(cur, static_cast<int>(a))).second)
                queue.push_back(next);
        }
    }
    throw input_error("distinguishing_word: states are equivalent");
}

} // namespace

std::optional<std::pair<std::vector<int>, std::vector<int>>> commutativity_witness(const Dfa& m) {
    Dfa mm = m.minimized();
    int r = static_cast<int>(mm.alphabet.size());
    for (int q = 0; q < mm.num_states; ++q)
        for (int a = 0; a < r; ++a)
            for (int b = a + 1; b < r; ++b) {
                int s1 = mm.trans[mm.trans[q][a]][b];
                int s2 = mm.trans[mm.trans[q][b]][a];
                if (s1 == s2) continue;
                std::vector<int> u = bfs_word_to(mm, q);
                std::vector<int> w = distinguishing_word(mm, s1, s2);
                std::vector<int> w1 = u, w2 = u;
                w1.push_back(a);
                w1.push_back(b);
                w2.push_back(b);
                w2.push_back(a);
                w1.insert(w1.end(), w.begin(), w.end());
                w2.insert(w2.end(), w.begin(), w.end());
                return std::make_pair(std::move(w1), std::move(w2));
            }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

bool SemilinearSet::contains(std::span<const std::int64_t> v) const {
    if (static_cast<int>(v.size()) != arity())
        throw input_error("semilinear membership: arity mismatch");
    for (const auto& tup : tuples) {
        bool ok = true;
        for (int i = 0; i < arity() && ok; ++i) ok = tup[i].contains(v[i]);
        if (ok) return true;
    }
    return false;
}

void SemilinearSet::normalize() {
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
}

std::string SemilinearSet::to_text() const {
    std::string out = "{";
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        if (i) out += ", ";
        out += "(";
        for (int j = 0; j < arity(); ++j) {
            if (j) out += ", ";
            out += tuples[i][j].to_text();
        }
        out += ")";
    }
    out += "}";
    return out;
}

SemilinearSet parse_semilinear(const std::string& text, std::vector<std::string> alphabet) {
    SemilinearSet s;
    s.alphabet = std::move(alphabet);
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto expect = [&](char c) {
        skip();
        if (pos >= text.size() || text[pos] != c)
            throw input_error("semilinear parse error at position " + std::to_string(pos) +
                              ": expected '" + std::string(1, c) + "'");
        ++pos;
    };
    auto number = [&] {
        skip();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start)
            throw input_error("semilinear parse error at position " + std::to_string(pos) +
                              ": expected number");
        return std::stoll(text.substr(start, pos - start));
    };
    expect('{');
    skip();
    while (pos < text.size() && text[pos] != '}') {
        expect('(');
        std::vector<Progression> tup;
        while (true) {
            expect('S');
            expect('[');
            Progression p;
            p.k = number();
            expect(',');
            p.p = number();
            expect(']');
            tup.push_back(p);
            skip();
            if (pos < text.size() && text[pos] == ',') { ++pos; continue; }
            break;
        }
        expect(')');
        if (static_cast<int>(tup.size()) != s.arity())
            throw input_error("semilinear parse: tuple arity mismatch");
        s.tuples.push_back(std::move(tup));
        skip();
        if (pos < text.size() && text[pos] == ',') { ++pos; skip(); }
    }
    expect('}');
    s.normalize();
    return s;
}

std::vector<Progression> unary_semilinear(const Dfa& m) {
    m.validate();
    if (m.alphabet.size() != 1) throw input_error("unary_semilinear: alphabet must be unary");
    std::vector<int> first_at(m.num_states, -1);
    std::vector<int> path;
    int q = m.initial;
    while (first_at[q] == -1) {
        first_at[q] = static_cast<int>(path.size());
        path.push_back(q);
        q = m.trans[q][0];
    }
    int tail = first_at[q];
    int cycle = static_cast<int>(path.size()) - tail;
    std::vector<Progression> out;
    for (int i = 0; i < static_cast<int>(path.size()); ++i)
        if (m.accepting[path[i]])
            out.push_back(i < tail ? Progression{i, 0} : Progression{i, cycle});
    return out;
}

SemilinearSet parikh_decompose(const Dfa& m, bool require_commutative, const Guards& guards) {
    m.validate();
    if (require_commutative && !is_commutative(m))
        throw input_error("parikh_decompose: language is not commutative");
    Dfa t = m.trimmed();
    int r = static_cast<int>(t.alphabet.size());
    double seqs = std::pow(static_cast<double>(t.num_states), r);
    if (seqs > static_cast<double>(guards.parikh_seq_cap))
        throw guard_error("parikh_decompose: state-sequence count exceeds cap " +
                          std::to_string(guards.parikh_seq_cap));

    // legs[i][from][to]: lengths n with from -a_i^n-> to
    std::vector<std::vector<std::vector<std::vector<Progression>>>> legs(r);
    for (int i = 0; i < r; ++i) {
        legs[i].assign(t.num_states, std::vector<std::vector<Progression>>(t.num_states));
        for (int from = 0; from < t.num_states; ++from) {
            Dfa u;
            u.alphabet = {t.alphabet[i]};
            u.num_states = t.num_states;
            u.initial = from;
            u.accepting.assign(t.num_states, 0);
            u.trans.assign(t.num_states, std::vector<int>(1));
            for (int s = 0; s < t.num_states; ++s) u.trans[s][0] = t.trans[s][i];
            for (int to = 0; to < t.num_states; ++to) {
                std::fill(u.accepting.begin(), u.accepting.end(), 0);
                u.accepting[to] = 1;
                legs[i][from][to] = unary_semilinear(u);
            }
        }
    }

    SemilinearSet result;
    result.alphabet = t.alphabet;
    std::vector<int> seq(r);
    std::vector<Progression> tup(r);
    auto expand = [&](auto&& self, int i) -> void {
        if (i == r) {
            result.tuples.push_back(tup);
            return;
        }
        int from = i == 0 ? t.initial : seq[i - 1];
        for (int to = 0; to < t.num_states; ++to) {
            if (i == r - 1 && !t.accepting[to]) continue;
            const auto& progs = legs[i][from][to];
            if (progs.empty()) continue;
            seq[i] = to;
            for (const Progression& p : progs) {
                tup[i] = p;
                self(self, i + 1);
            }
        }
    };
    expand(expand, 0);
    result.normalize();
    return result;
}

bool semilinear_membership(const SemilinearSet& s, std::span<const std::int64_t> v) {
    return s.contains(v);
}

std::vector<std::int64_t> parikh_vector(const Dfa& m, std::span<const int> word) {
    std::vector<std::int64_t> v(m.alphabet.size(), 0);
    for (int a : word) {
        if (a < 0 || a >= static_cast<int>(m.alphabet.size()))
            throw input_error("parikh_vector: letter index out of range");
        ++v[a];
    }
    return v;
}

} // namespace oi
