#include "oi/tree_automaton.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace oi {

void TreeAutomaton::validate() const {
    if (alphabet.empty()) throw input_error("tree automaton: empty alphabet");
    if (state_names.empty()) throw input_error("tree automaton: no states");
    if (final_states.size() != state_names.size())
        throw input_error("tree automaton: inconsistent final-state array");
    if (delta.size() != state_names.size())
        throw input_error("tree automaton: horizontal map has wrong state dimension");
    for (const auto& row : delta) {
        if (row.size() != alphabet.size())
            throw input_error("tree automaton: horizontal map has wrong label dimension");
        for (const Dfa& d : row) {
            d.validate();
            if (d.alphabet != state_names)
                throw input_error("tree automaton: horizontal DFA alphabet must be the state list");
        }
    }
}

bool TreeAutomaton::is_deterministic() const {
    for (std::size_t a = 0; a < alphabet.size(); ++a)
        for (int q1 = 0; q1 < num_states(); ++q1)
            for (int q2 = q1 + 1; q2 < num_states(); ++q2) {
                const Dfa& d1 = delta[q1][a];
                const Dfa& d2 = delta[q2][a];
                std::set<std::pair<int, int>> seen{{d1.initial, d2.initial}};
                std::deque<std::pair<int, int>> queue{{d1.initial, d2.initial}};
                while (!queue.empty()) {
                    auto [p, q] = queue.front();
                    queue.pop_front();
                    if (d1.accepting[p] && d2.accepting[q]) return false;
                    for (std::size_t l = 0; l < d1.alphabet.size(); ++l) {
                        std::pair<int, int> next{d1.trans[p][l], d2.trans[q][l]};
                        if (seen.insert(next).second) queue.push_back(next);
                    }
                }
            }
    return true;
}

std::string TreeAutomaton::to_text() const {
    std::string out = "ta " + (name.empty() ? std::string("N") : name) + "\n";
    out += "alphabet";
    for (const auto& a : alphabet) out += " " + a;
    out += "\nstates";
    for (const auto& s : state_names) out += " " + s;
    out += "\nfinal";
    for (int q = 0; q < num_states(); ++q)
        if (final_states[q]) out += " " + state_names[q];
    out += "\n";
    for (int q = 0; q < num_states(); ++q)
        for (std::size_t a = 0; a < alphabet.size(); ++a) {
            out += "delta " + state_names[q] + " " + alphabet[a] + "\n";
            out += delta[q][a].to_text();
        }
    out += "end\n";
    return out;
}

namespace {

Dfa empty_language_dfa(std::vector<std::string> alphabet) {
    Dfa d;
    d.alphabet = std::move(alphabet);
    d.num_states = 1;
    d.initial = 0;
    d.accepting = {0};
    d.trans = {std::vector<int>(d.alphabet.size(), 0)};
    return d;
}

} // namespace

TreeAutomaton parse_tree_automaton(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    TreeAutomaton ta;
    std::map<std::string, int> state_id, letter_id;
    std::vector<std::string> final_names;
    std::vector<std::tuple<std::string, std::string, std::string>> delta_blocks;
    bool seen_end = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "end") {
            seen_end = true;
            break;
        }
        if (word == "ta") {
            if (!(ls >> ta.name)) throw input_error("ta line " + std::to_string(lineno) + ": missing name");
        } else if (word == "alphabet") {
            std::string a;
            while (ls >> a) {
                if (!letter_id.try_emplace(a, static_cast<int>(ta.alphabet.size())).second)
                    throw input_error("ta: duplicate label " + a);
                ta.alphabet.push_back(a);
            }
        } else if (word == "states") {
            std::string s;
            while (ls >> s) {
                if (!state_id.try_emplace(s, static_cast<int>(ta.state_names.size())).second)
                    throw input_error("ta: duplicate state " + s);
                ta.state_names.push_back(s);
            }
        } else if (word == "final") {
            std::string s;
            while (ls >> s) final_names.push_back(s);
        } else if (word == "delta") {
            std::string q, a;
            if (!(ls >> q >> a))
                throw input_error("ta line " + std::to_string(lineno) + ": malformed delta header");
            std::string block;
            bool closed = false;
            while (std::getline(in, line)) {
                ++lineno;
                block += line + "\n";
                std::istringstream bs(line);
                std::string first;
                if (bs >> first && first == "end") {
                    closed = true;
                    break;
                }
            }
            if (!closed) throw input_error("ta: unterminated horizontal DFA block");
            delta_blocks.emplace_back(q, a, block);
        } else {
            throw input_error("ta line " + std::to_string(lineno) + ": unknown directive " + word);
        }
    }
    if (!seen_end) throw input_error("ta: missing end line");
    if (ta.state_names.empty()) throw input_error("ta: no states declared");
    ta.final_states.assign(ta.state_names.size(), 0);
    for (const auto& s : final_names) {
        auto it = state_id.find(s);
        if (it == state_id.end()) throw input_error("ta: unknown final state " + s);
        ta.final_states[it->second] = 1;
    }
    ta.delta.assign(ta.state_names.size(),
                    std::vector<Dfa>(ta.alphabet.size(), empty_language_dfa(ta.state_names)));
    for (const auto& [q, a, block] : delta_blocks) {
        auto qi = state_id.find(q);
        auto ai = letter_id.find(a);
        if (qi == state_id.end()) throw input_error("ta: unknown state " + q);
        if (ai == letter_id.end()) throw input_error("ta: unknown label " + a);
        ta.delta[qi->second][ai->second] = parse_dfa(block);
    }
    ta.validate();
    return ta;
}

bool is_sibling_invariant(const TreeAutomaton& n) {
    n.validate();
    for (const auto& row : n.delta)
        for (const Dfa& d : row)
            if (!is_commutative(d)) return false;
    return true;
}

// ---------------------------------------------------------------------------

namespace {

void check_labels(const TreeAutomaton& n, const UnrankedTree& t) {
    for (int v = 0; v < t.node_count(); ++v)
        if (std::find(n.alphabet.begin(), n.alphabet.end(), t.alphabet[t.label[v]]) ==
            n.alphabet.end())
            throw input_error("run: tree label " + t.alphabet[t.label[v]] +
                              " outside the automaton alphabet");
}

int letter_of(const TreeAutomaton& n, const UnrankedTree& t, int v) {
    return static_cast<int>(std::find(n.alphabet.begin(), n.alphabet.end(),
                                      t.alphabet[t.label[v]]) -
                            n.alphabet.begin());
}

} // namespace

RunResult run(const TreeAutomaton& n, const UnrankedTree& t, const SiblingOrder& ord) {
    n.validate();
    t.validate();
    check_labels(n, t);
    if (!n.is_deterministic()) throw input_error("run: automaton is not deterministic");
    RunResult res;
    res.states.assign(t.node_count(), -1);
    std::function<bool(int)> go = [&](int v) -> bool {
        std::vector<int> word;
        for (int c : ord.order[v]) {
            if (!go(c)) return false;
            word.push_back(res.states[c]);
        }
        int a = letter_of(n, t, v);
        for (int q = 0; q < n.num_states(); ++q)
            if (n.delta[q][a].accepts(word)) {
                res.states[v] = q;
                return true;
            }
        res.failure_node = v;
        return false;
    };
    if (!go(0)) {
        res.accepted = false;
        return res;
    }
    res.accepted = n.final_states[res.states[0]];
    return res;
}

bool run_nondeterministic(const TreeAutomaton& n, const UnrankedTree& t,
                          const SiblingOrder& ord) {
    n.validate();
    t.validate();
    check_labels(n, t);
    std::function<std::vector<char>(int)> go = [&](int v) -> std::vector<char> {
        std::vector<std::vector<char>> kid_states;
        for (int c : ord.order[v]) kid_states.push_back(go(c));
        int a = letter_of(n, t, v);
        std::vector<char> possible(n.num_states(), 0);
        for (int q = 0; q < n.num_states(); ++q) {
            const Dfa& d = n.delta[q][a];
            std::vector<char> cur(d.num_states, 0);
            cur[d.initial] = 1;
            for (const auto& ks : kid_states) {
                std::vector<char> next(d.num_states, 0);
                for (int s = 0; s < d.num_states; ++s)
                    if (cur[s])
                        for (int l = 0; l < n.num_states(); ++l)
                            if (ks[l]) next[d.trans[s][l]] = 1;
                cur = std::move(next);
            }
            for (int s = 0; s < d.num_states; ++s)
                if (cur[s] && d.accepting[s]) possible[q] = 1;
        }
        return possible;
    };
    std::vector<char> root = go(0);
    for (int q = 0; q < n.num_states(); ++q)
        if (root[q] && n.final_states[q]) return true;
    return false;
}

bool accepts_unordered(const TreeAutomaton& n, const UnrankedTree& t) {
    if (!is_sibling_invariant(n))
        throw input_error("accepts_unordered: automaton is not sibling-invariant");
    SiblingOrder ord = SiblingOrder::text_order(t);
    if (n.is_deterministic()) return run(n, t, ord).accepted;
    return run_nondeterministic(n, t, ord);
}

// ---------------------------------------------------------------------------

std::string CountingTreeAutomaton::to_text() const {
    std::string out = "counting-ta " + (name.empty() ? std::string("C") : name) + "\n";
    out += "alphabet";
    for (const auto& a : alphabet) out += " " + a;
    out += "\nstates";
    for (const auto& s : state_names) out += " " + s;
    out += "\nfinal";
    for (int q = 0; q < num_states(); ++q)
        if (final_states[q]) out += " " + state_names[q];
    out += "\n";
    for (int q = 0; q < num_states(); ++q)
        for (std::size_t a = 0; a < alphabet.size(); ++a)
            out += "delta " + state_names[q] + " " + alphabet[a] + " " +
                   delta[q][a].to_text() + "\n";
    out += "end\n";
    return out;
}

CountingTreeAutomaton to_counting_automaton(const TreeAutomaton& n, const Guards& guards) {
    if (!is_sibling_invariant(n))
        throw input_error("to_counting_automaton: automaton is not sibling-invariant");
    CountingTreeAutomaton c;
    c.name = n.name;
    c.alphabet = n.alphabet;
    c.state_names = n.state_names;
    c.final_states = n.final_states;
    c.delta.resize(n.num_states());
    for (int q = 0; q < n.num_states(); ++q)
        for (std::size_t a = 0; a < n.alphabet.size(); ++a)
            c.delta[q].push_back(parikh_decompose(n.delta[q][a], true, guards));
    return c;
}

bool run_counting(const CountingTreeAutomaton& c, const UnrankedTree& t) {
    t.validate();
    std::vector<int> state(t.node_count(), -1);
    std::function<void(int)> go = [&](int v) {
        std::vector<std::int64_t> counts(c.num_states(), 0);
        for (int ch : t.children[v]) {
            go(ch);
            ++counts[state[ch]];
        }
        auto lab = std::find(c.alphabet.begin(), c.alphabet.end(), t.alphabet[t.label[v]]);
        if (lab == c.alphabet.end())
            throw input_error("counting run: tree label outside the automaton alphabet");
        int a = static_cast<int>(lab - c.alphabet.begin());
        int found = -1;
        for (int q = 0; q < c.num_states(); ++q)
            if (c.delta[q][a].contains(counts)) {
                if (found != -1)
                    throw input_error("counting run: several candidate states at node " +
                                      std::to_string(v));
                found = q;
            }
        if (found == -1)
            throw input_error("counting run: no candidate state at node " + std::to_string(v));
        state[v] = found;
    };
    go(0);
    return c.final_states[state[0]];
}

// ---------------------------------------------------------------------------

namespace {

UnrankedTree subtree_of(const UnrankedTree& t, int v) {
    UnrankedTree s;
    s.alphabet = t.alphabet;
    std::function<int(int, int)> copy = [&](int node, int parent) -> int {
        int id = s.node_count();
        s.label.push_back(t.label[node]);
        s.children.emplace_back();
        s.parent.push_back(parent);
        for (int c : t.children[node]) {
            int child = copy(c, id);
            s.children[id].push_back(child);
        }
        return id;
    };
    copy(v, -1);
    return s;
}

Dfa count_threshold_dfa(const std::vector<std::string>& state_names,
                        const std::vector<std::vector<int>>& accepted) {
    int r = static_cast<int>(state_names.size());
    if (accepted.empty()) return empty_language_dfa(state_names);
    std::vector<int> caps(r, 0);
    for (const auto& v : accepted)
        for (int i = 0; i < r; ++i) caps[i] = std::max(caps[i], v[i] + 1);
    std::int64_t total = 1;
    for (int i = 0; i < r; ++i) {
        total *= caps[i] + 1;
        if (total > 100000) throw guard_error("count-threshold DFA too large");
    }
    auto code = [&](const std::vector<int>& v) {
        std::int64_t c = 0;
        for (int i = r - 1; i >= 0; --i) c = c * (caps[i] + 1) + v[i];
        return static_cast<int>(c);
    };
    Dfa d;
    d.alphabet = state_names;
    d.num_states = static_cast<int>(total);
    d.initial = 0;
    d.accepting.assign(d.num_states, 0);
    d.trans.assign(d.num_states, std::vector<int>(r));
    std::vector<int> v(r, 0);
    for (int s = 0; s < d.num_states; ++s) {
        for (int i = 0; i < r; ++i) {
            std::vector<int> w = v;
            w[i] = std::min(w[i] + 1, caps[i]);
            d.trans[s][i] = code(w);
        }
        int i = 0;
        for (; i < r; ++i) {
            if (++v[i] <= caps[i]) break;
            v[i] = 0;
        }
    }
    for (const auto& a : accepted) d.accepting[code(a)] = 1;
    return d;
}

} // namespace

SynthResult synthesize_invariant_type_ta(const std::vector<std::string>& alphabet, int k,
                                         LogicKind logic, int N, const Guards& guards) {
    if (alphabet.empty() || alphabet.size() > 3)
        throw guard_error("synthesize_invariant_type_ta: alphabet size must be 1..3");
    if (N < 1 || N > 8)
        throw guard_error("synthesize_invariant_type_ta: tree bound must be 1..8");
    SynthResult res;
    res.bound = N;
    FlipPartition partition = build_tree_flip_partition(alphabet, k, logic, N, guards);

    std::vector<UnrankedTree> trees = enumerate_trees_up_to(alphabet, N);
    std::map<std::string, InvariantTypeId> tree_type; // canonical key -> component
    for (const UnrankedTree& t : trees)
        tree_type[t.canonical_key()] = invariant_type_of(t, partition, guards);

    std::set<InvariantTypeId> realized;
    for (const auto& [_, id] : tree_type) realized.insert(id);
    res.state_types.assign(realized.begin(), realized.end());
    std::map<InvariantTypeId, int> state_of;
    for (std::size_t i = 0; i < res.state_types.size(); ++i)
        state_of[res.state_types[i]] = static_cast<int>(i);
    int r = static_cast<int>(res.state_types.size());

    std::map<std::pair<int, std::vector<int>>, std::set<int>> observed;
    for (const UnrankedTree& t : trees) {
        std::vector<int> counts(r, 0);
        for (int c : t.children[0])
            ++counts[state_of.at(tree_type.at(subtree_of(t, c).canonical_key()))];
        int lab = static_cast<int>(std::find(alphabet.begin(), alphabet.end(),
                                             t.alphabet[t.label[0]]) -
                                   alphabet.begin());
        observed[{lab, counts}].insert(state_of.at(tree_type.at(t.canonical_key())));
    }
    for (const auto& [key, states] : observed) {
        res.table[key] = *states.begin();
        if (states.size() > 1) {
            res.diagnostics.functional_consistent = false;
            std::string note = "label " + alphabet[key.first] + " child counts (";
            for (std::size_t i = 0; i < key.second.size(); ++i)
                note += (i ? " " : "") + std::to_string(key.second[i]);
            note += ") maps to " + std::to_string(states.size()) + " states";
            res.diagnostics.conflicts.push_back(note);
        }
    }

    TreeAutomaton& ta = res.automaton;
    ta.name = "synth";
    ta.alphabet = alphabet;
    for (int q = 0; q < r; ++q) ta.state_names.push_back("t" + std::to_string(q));
    ta.final_states.assign(r, 1);
    ta.delta.resize(r);
    for (int q = 0; q < r; ++q)
        for (std::size_t a = 0; a < alphabet.size(); ++a) {
            std::vector<std::vector<int>> accepted;
            for (const auto& [key, target] : res.table)
                if (key.first == static_cast<int>(a) && target == q)
                    accepted.push_back(key.second);
            ta.delta[q].push_back(count_threshold_dfa(ta.state_names, accepted));
        }
    res.diagnostics.permutation_independent = is_sibling_invariant(ta);
    return res;
}

// ---------------------------------------------------------------------------

Formula dfs_order_formula() {
    FormulaBuilder b;
    int x = b.fresh_evar("x");
    int y = b.fresh_evar("y");
    // desc-or-self(u, v): every child-closed set containing u contains v
    auto dos = [&](int u, int v) {
        int X = b.fresh_svar("D");
        int z = b.fresh_evar("z");
        int w = b.fresh_evar("w");
        int closed = b.forall(
            z, b.forall(w, b.implies(b.conj({b.in(z, X), b.rel("child", {z, w})}), b.in(w, X))));
        return b.forall_set(X, b.implies(b.conj({b.in(u, X), closed}), b.in(v, X)));
    };
    int anc = b.conj({b.neg(b.eq(x, y)), dos(x, y)});
    int u = b.fresh_evar("u");
    int v = b.fresh_evar("v");
    int branch = b.exists(
        u, b.exists(v, b.conj({b.rel("sib", {u, v}), dos(u, x), dos(v, y)})));
    return b.finish(b.disj({anc, branch}));
}

Formula with_dfs_order(const Formula& phi) {
    Formula dfs = dfs_order_formula();
    int dx = dfs.free_evars()[0], dy = dfs.free_evars()[1];
    if (dfs.evar_name(dx) != "x") std::swap(dx, dy);
    FormulaBuilder b;
    std::vector<int> emap(phi.num_evars()), smap(phi.num_svars());
    for (int i = 0; i < phi.num_evars(); ++i) emap[i] = b.fresh_evar(phi.evar_name(i));
    for (int i = 0; i < phi.num_svars(); ++i) smap[i] = b.fresh_svar(phi.svar_name(i));
    std::function<int(int)> go = [&](int i) -> int {
        const Formula::Node& n = phi.node(i);
        if (n.kind == FKind::Lt) {
            std::vector<int> m(dfs.num_evars(), -1);
            m[dx] = emap[n.args[0]];
            m[dy] = emap[n.args[1]];
            return b.splice(dfs, dfs.root(), m, {});
        }
        switch (n.kind) {
            case FKind::True: return b.tru();
            case FKind::False: return b.fls();
            case FKind::Rel: {
                std::vector<int> args;
                for (int a : n.args) args.push_back(emap[a]);
                return b.rel(n.rel, args);
            }
            case FKind::Eq: return b.eq(emap[n.args[0]], emap[n.args[1]]);
            case FKind::In: return b.in(emap[n.args[0]], smap[n.svar]);
            case FKind::Not: return b.neg(go(n.kids[0]));
            case FKind::And: {
                std::vector<int> kids;
                for (int c : n.kids) kids.push_back(go(c));
                return b.conj(std::move(kids));
            }
            case FKind::Or: {
                std::vector<int> kids;
                for (int c : n.kids) kids.push_back(go(c));
                return b.disj(std::move(kids));
            }
            case FKind::Implies: {
                int f = go(n.kids[0]);
                return b.implies(f, go(n.kids[1]));
            }
            case FKind::Exists: return b.exists(emap[n.var], go(n.kids[0]));
            case FKind::Forall: return b.forall(emap[n.var], go(n.kids[0]));
            case FKind::ExistsSet: return b.exists_set(smap[n.var], go(n.kids[0]));
            case FKind::ForallSet: return b.forall_set(smap[n.var], go(n.kids[0]));
            case FKind::Count: return b.count(n.p, emap[n.var], go(n.kids[0]));
            default: throw input_error("with_dfs_order: unexpected node");
        }
    };
    return b.finish(go(phi.root()));
}

CourcelleVerdict courcelle_equivalence_check(const Formula& phi_counting,
                                             const Formula& phi_ordered,
                                             const std::vector<std::string>& alphabet, int N,
                                             const Guards& guards) {
    CourcelleVerdict v;
    v.bound = N;
    TreeInvarianceVerdict inv = check_tree_invariance(phi_ordered, alphabet, N, guards);
    if (!inv.invariant) {
        v.equivalent = false;
        v.invariance_failure = inv;
        return v;
    }
    for (const UnrankedTree& t : enumerate_trees_up_to(alphabet, N)) {
        bool lhs = evaluate(tree_to_structure(t), phi_counting, {}, guards);
        bool rhs = evaluate(tree_to_structure(t, SiblingOrder::text_order(t)), phi_ordered, {},
                            guards);
        if (lhs != rhs) {
            v.equivalent = false;
            v.counterexample = t;
            return v;
        }
    }
    return v;
}

} // namespace oi
