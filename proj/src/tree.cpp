#include "oi/tree.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace oi {

void UnrankedTree::validate() const {
    if (label.empty()) throw input_error("tree has no nodes");
    if (label.size() != children.size() || label.size() != parent.size())
        throw input_error("tree: inconsistent node arrays");
    if (parent[0] != -1) throw input_error("tree: node 0 must be the root");
    for (int v = 0; v < node_count(); ++v) {
        if (label[v] < 0 || label[v] >= static_cast<int>(alphabet.size()))
            throw input_error("tree: label out of alphabet");
        for (int c : children[v])
            if (parent[c] != v) throw input_error("tree: parent/children mismatch");
    }
}

namespace {

void text_rec(const UnrankedTree& t, int v, std::string& out) {
    out += t.alphabet[t.label[v]];
    if (!t.children[v].empty()) {
        out += '(';
        for (std::size_t i = 0; i < t.children[v].size(); ++i) {
            if (i) out += ',';
            text_rec(t, t.children[v][i], out);
        }
        out += ')';
    }
}

std::string canon_rec(const UnrankedTree& t, int v) {
    std::vector<std::string> kids;
    for (int c : t.children[v]) kids.push_back(canon_rec(t, c));
    std::sort(kids.begin(), kids.end());
    std::string s = t.alphabet[t.label[v]];
    if (!kids.empty()) {
        s += '(';
        for (std::size_t i = 0; i < kids.size(); ++i) {
            if (i) s += ',';
            s += kids[i];
        }
        s += ')';
    }
    return s;
}

} // namespace

std::string UnrankedTree::to_text() const {
    std::string out;
    text_rec(*this, 0, out);
    return out;
}

std::string UnrankedTree::canonical_key() const {
    std::string s;
    for (const auto& a : alphabet) s += a + ";";
    s += "#" + canon_rec(*this, 0);
    return s;
}

SiblingOrder SiblingOrder::text_order(const UnrankedTree& t) {
    SiblingOrder o;
    o.order = t.children;
    return o;
}

namespace {

struct TreeParser {
    const std::string& text;
    std::size_t pos = 0;

    explicit TreeParser(const std::string& s) : text(s) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (pos == start)
            throw input_error("tree parse error at position " + std::to_string(pos) +
                              ": expected label");
        return text.substr(start, pos - start);
    }

    // returns node id in the growing tree
    int node(UnrankedTree& t, int parent_id) {
        std::string lab = ident();
        int v = t.node_count();
        t.label.push_back(-1);
        t.children.emplace_back();
        t.parent.push_back(parent_id);
        // label index resolved later once the alphabet is known
        pending.emplace_back(v, lab);
        skip_ws();
        if (pos < text.size() && text[pos] == '(') {
            ++pos;
            while (true) {
                int c = node(t, v);
                t.children[v].push_back(c);
                skip_ws();
                if (pos < text.size() && text[pos] == ',') { ++pos; continue; }
                if (pos < text.size() && text[pos] == ')') { ++pos; break; }
                throw input_error("tree parse error at position " + std::to_string(pos) +
                                  ": expected ',' or ')'");
            }
        }
        return v;
    }

    std::vector<std::pair<int, std::string>> pending;
};

} // namespace

UnrankedTree parse_tree(const std::string& text, const std::vector<std::string>& alphabet) {
    UnrankedTree t;
    TreeParser p(text);
    p.node(t, -1);
    p.skip_ws();
    if (p.pos != text.size())
        throw input_error("tree parse error: trailing input at position " + std::to_string(p.pos));
    if (!alphabet.empty()) {
        t.alphabet = alphabet;
    } else {
        std::vector<std::string> labs;
        for (const auto& [_, lab] : p.pending) labs.push_back(lab);
        std::sort(labs.begin(), labs.end());
        labs.erase(std::unique(labs.begin(), labs.end()), labs.end());
        t.alphabet = labs;
    }
    for (const auto& [v, lab] : p.pending) {
        auto it = std::find(t.alphabet.begin(), t.alphabet.end(), lab);
        if (it == t.alphabet.end()) throw input_error("tree label outside alphabet: " + lab);
        t.label[v] = static_cast<int>(it - t.alphabet.begin());
    }
    t.validate();
    return t;
}

namespace {

Vocabulary tree_vocab(const UnrankedTree& t, bool with_sib) {
    Vocabulary v;
    v.relations.emplace_back("child", 2);
    for (const auto& a : t.alphabet) v.relations.emplace_back("P_" + a, 1);
    if (with_sib) v.relations.emplace_back("sib", 2);
    return v;
}

void add_edges(const UnrankedTree& t, Structure& s, EdgeSemantics sem) {
    for (int v = 0; v < t.node_count(); ++v) {
        if (sem == EdgeSemantics::OneStep) {
            for (int c : t.children[v]) { int e[2] = {v, c}; s.set(0, e, true); }
        } else {
            // all proper descendants
            std::vector<int> stack(t.children[v].begin(), t.children[v].end());
            while (!stack.empty()) {
                int d = stack.back();
                stack.pop_back();
                int e[2] = {v, d};
                s.set(0, e, true);
                stack.insert(stack.end(), t.children[d].begin(), t.children[d].end());
            }
        }
        int u[1] = {v};
        s.set(1 + t.label[v], u, true);
    }
}

} // namespace

Structure tree_to_structure(const UnrankedTree& t, EdgeSemantics sem) {
    t.validate();
    Structure s(tree_vocab(t, false), t.node_count());
    add_edges(t, s, sem);
    return s;
}

Structure tree_to_structure(const UnrankedTree& t, const SiblingOrder& ord, EdgeSemantics sem) {
    t.validate();
    if (ord.order.size() != t.children.size())
        throw input_error("sibling order: wrong number of nodes");
    Structure s(tree_vocab(t, true), t.node_count());
    add_edges(t, s, sem);
    int sib = static_cast<int>(s.vocab().relations.size()) - 1;
    for (int v = 0; v < t.node_count(); ++v) {
        const auto& group = ord.order[v];
        std::vector<int> sorted_group = group, expected = t.children[v];
        std::sort(sorted_group.begin(), sorted_group.end());
        std::sort(expected.begin(), expected.end());
        if (sorted_group != expected)
            throw input_error("sibling order: group is not a permutation of the children");
        for (std::size_t i = 0; i < group.size(); ++i)
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                int e[2] = {group[i], group[j]};
                s.set(sib, e, true);
            }
    }
    return s;
}

std::vector<SiblingOrder> enumerate_sibling_orders(const UnrankedTree& t, const Guards& guards) {
    t.validate();
    std::int64_t total = 1;
    for (int v = 0; v < t.node_count(); ++v) {
        std::int64_t f = 1;
        for (std::size_t i = 2; i <= t.children[v].size(); ++i) f *= static_cast<std::int64_t>(i);
        total *= f;
        if (total > guards.order_cap)
            throw guard_error("enumerate_sibling_orders: count exceeds cap");
    }
    std::vector<SiblingOrder> out;
    out.push_back(SiblingOrder::text_order(t));
    for (int v = 0; v < t.node_count(); ++v) {
        // extend existing prefix choices with all permutations at node v
        std::vector<std::vector<int>> perms;
        std::vector<int> g = t.children[v];
        std::sort(g.begin(), g.end());
        do {
            perms.push_back(g);
        } while (std::next_permutation(g.begin(), g.end()));
        std::vector<SiblingOrder> next;
        next.reserve(out.size() * perms.size());
        for (const auto& partial : out)
            for (const auto& p : perms) {
                SiblingOrder o = partial;
                o.order[v] = p;
                next.push_back(std::move(o));
            }
        out = std::move(next);
    }
    return out;
}

namespace {

UnrankedTree attach(const std::vector<std::string>& alphabet, int root_label,
                    const std::vector<const UnrankedTree*>& subtrees) {
    UnrankedTree t;
    t.alphabet = alphabet;
    t.label.push_back(root_label);
    t.children.emplace_back();
    t.parent.push_back(-1);
    for (const UnrankedTree* sub : subtrees) {
        int base = t.node_count();
        t.children[0].push_back(base);
        for (int v = 0; v < sub->node_count(); ++v) {
            t.label.push_back(sub->label[v]);
            std::vector<int> kids = sub->children[v];
            for (int& k : kids) k += base;
            t.children.push_back(std::move(kids));
            t.parent.push_back(v == 0 ? 0 : sub->parent[v] + base);
        }
    }
    return t;
}

// multisets of trees (indices non-decreasing into `pool`, sorted by size then
// canonical key) with sizes summing to `total`
void forests(const std::vector<UnrankedTree>& pool, int total, int min_index,
             std::vector<const UnrankedTree*>& current,
             const std::function<void(const std::vector<const UnrankedTree*>&)>& emit) {
    if (total == 0) {
        emit(current);
        return;
    }
    for (int i = min_index; i < static_cast<int>(pool.size()); ++i) {
        int sz = pool[i].node_count();
        if (sz > total) break; // pool sorted by size
        current.push_back(&pool[i]);
        forests(pool, total - sz, i, current, emit);
        current.pop_back();
    }
}

} // namespace

namespace {

// layers[s] = all trees with exactly s+1 nodes, sorted by canonical key
std::vector<std::vector<UnrankedTree>> tree_layers(const std::vector<std::string>& alphabet,
                                                   int max_n) {
    std::vector<std::vector<UnrankedTree>> layers;
    std::vector<UnrankedTree> pool; // sorted by (size, canonical key)
    for (int n = 1; n <= max_n; ++n) {
        std::vector<UnrankedTree> layer;
        for (int lab = 0; lab < static_cast<int>(alphabet.size()); ++lab) {
            std::vector<const UnrankedTree*> current;
            forests(pool, n - 1, 0, current,
                    [&](const std::vector<const UnrankedTree*>& subs) {
                        layer.push_back(attach(alphabet, lab, subs));
                    });
        }
        std::sort(layer.begin(), layer.end(), [](const UnrankedTree& a, const UnrankedTree& b) {
            return a.canonical_key() < b.canonical_key();
        });
        pool.insert(pool.end(), layer.begin(), layer.end());
        layers.push_back(std::move(layer));
    }
    return layers;
}

} // namespace

std::vector<UnrankedTree> enumerate_trees(const std::vector<std::string>& alphabet, int n) {
    if (n < 1) return {};
    return tree_layers(alphabet, n).back();
}

std::vector<UnrankedTree> enumerate_trees_up_to(const std::vector<std::string>& alphabet,
                                                int max_n) {
    std::vector<UnrankedTree> out;
    for (auto& layer : tree_layers(alphabet, max_n))
        out.insert(out.end(), std::make_move_iterator(layer.begin()),
                   std::make_move_iterator(layer.end()));
    return out;
}

} // namespace oi
