#include "oi/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace oi {

int Vocabulary::relation_index(const std::string& name) const {
    for (std::size_t i = 0; i < relations.size(); ++i)
        if (relations[i].first == name) return static_cast<int>(i);
    return -1;
}

int Vocabulary::constant_index(const std::string& name) const {
    for (std::size_t i = 0; i < constants.size(); ++i)
        if (constants[i] == name) return static_cast<int>(i);
    return -1;
}

bool Vocabulary::reserved_name(const std::string& name) {
    return name == "<" || name == "child" || name == "sib" ||
           name.rfind("P_", 0) == 0;
}

void Vocabulary::validate() const {
    std::set<std::string> seen;
    for (const auto& [name, arity] : relations) {
        if (arity < 1) throw input_error("relation " + name + " has non-positive arity");
        if (!seen.insert(name).second) throw input_error("duplicate symbol " + name);
    }
    for (const auto& c : constants)
        if (!seen.insert(c).second) throw input_error("duplicate symbol " + c);
}

std::string Vocabulary::key() const {
    std::string s;
    for (const auto& [name, arity] : relations)
        s += name + "/" + std::to_string(arity) + ";";
    s += "|";
    for (const auto& c : constants) s += c + ";";
    return s;
}

Structure::Structure(Vocabulary vocab, int size) : vocab_(std::move(vocab)), n_(size) {
    if (size < 0) throw input_error("negative structure size");
    if (size == 0 && !vocab_.constants.empty())
        throw input_error("empty structure with constants");
    interp_.resize(vocab_.relations.size());
    for (std::size_t r = 0; r < interp_.size(); ++r) {
        std::int64_t bits = tuple_count(static_cast<int>(r));
        interp_[r].assign(static_cast<std::size_t>((bits + 63) / 64), 0);
    }
    consts_.assign(vocab_.constants.size(), 0);
}

std::int64_t Structure::tuple_count(int rel) const {
    int arity = vocab_.relations[rel].second;
    std::int64_t c = 1;
    for (int i = 0; i < arity; ++i) c *= n_;
    return c;
}

static std::int64_t tuple_code(std::span<const int> tuple, int n) {
    std::int64_t code = 0;
    for (std::size_t i = tuple.size(); i-- > 0;) code = code * n + tuple[i];
    return code;
}

bool Structure::holds(int rel, std::span<const int> tuple) const {
    for (int v : tuple)
        if (v < 0 || v >= n_) throw input_error("tuple component out of domain");
    return raw_bit(rel, tuple_code(tuple, n_));
}

void Structure::set(int rel, std::span<const int> tuple, bool value) {
    for (int v : tuple)
        if (v < 0 || v >= n_) throw input_error("tuple component out of domain");
    set_raw_bit(rel, tuple_code(tuple, n_), value);
}

bool Structure::raw_bit(int rel, std::int64_t code) const {
    return (interp_[rel][static_cast<std::size_t>(code >> 6)] >> (code & 63)) & 1;
}

void Structure::set_raw_bit(int rel, std::int64_t code, bool value) {
    auto& word = interp_[rel][static_cast<std::size_t>(code >> 6)];
    if (value)
        word |= (std::uint64_t{1} << (code & 63));
    else
        word &= ~(std::uint64_t{1} << (code & 63));
}

void Structure::set_constant(int ci, int value) {
    if (value < 0 || value >= n_) throw input_error("constant value out of domain");
    consts_.at(ci) = value;
}

std::vector<std::vector<int>> Structure::tuples(int rel) const {
    std::vector<std::vector<int>> out;
    int arity = vocab_.relations[rel].second;
    std::int64_t total = tuple_count(rel);
    for (std::int64_t code = 0; code < total; ++code) {
        if (!raw_bit(rel, code)) continue;
        std::vector<int> t(arity);
        std::int64_t c = code;
        for (int i = 0; i < arity; ++i) { t[i] = static_cast<int>(c % n_); c /= n_; }
        out.push_back(std::move(t));
    }
    return out;
}

Structure Structure::relabeled(std::span<const int> perm) const {
    Structure out(vocab_, n_);
    for (std::size_t r = 0; r < interp_.size(); ++r) {
        int arity = vocab_.relations[r].second;
        std::int64_t total = tuple_count(static_cast<int>(r));
        for (std::int64_t code = 0; code < total; ++code) {
            if (!raw_bit(static_cast<int>(r), code)) continue;
            std::vector<int> t(arity);
            std::int64_t c = code;
            for (int i = 0; i < arity; ++i) { t[i] = perm[c % n_]; c /= n_; }
            out.set(static_cast<int>(r), t, true);
        }
    }
    for (std::size_t ci = 0; ci < consts_.size(); ++ci)
        out.consts_[ci] = perm[consts_[ci]];
    out.name_ = name_;
    return out;
}

std::string Structure::serialize() const {
    std::string s = vocab_.key() + "#" + std::to_string(n_) + "#";
    for (std::size_t r = 0; r < interp_.size(); ++r) {
        std::int64_t total = tuple_count(static_cast<int>(r));
        for (std::int64_t code = 0; code < total; ++code)
            s += raw_bit(static_cast<int>(r), code) ? '1' : '0';
        s += '|';
    }
    for (int c : consts_) s += std::to_string(c) + ",";
    return s;
}

std::string Structure::canonical_key() const {
    std::vector<int> perm(n_);
    std::iota(perm.begin(), perm.end(), 0);
    std::string best;
    do {
        std::string s = relabeled(perm).serialize();
        if (best.empty() || s < best) best = std::move(s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (n_ == 0) best = serialize();
    return best;
}

std::string Structure::to_text() const {
    std::ostringstream os;
    os << "structure " << (name_.empty() ? "S" : name_) << "\n";
    os << "domain " << n_ << "\n";
    for (std::size_t r = 0; r < vocab_.relations.size(); ++r) {
        os << "rel " << vocab_.relations[r].first << "/" << vocab_.relations[r].second << ":";
        for (const auto& t : tuples(static_cast<int>(r))) {
            os << " (";
            for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
            os << ")";
        }
        os << "\n";
    }
    for (std::size_t ci = 0; ci < vocab_.constants.size(); ++ci)
        os << "const " << vocab_.constants[ci] << " = " << consts_[ci] << "\n";
    os << "end\n";
    return os.str();
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

} // namespace

Structure parse_structure(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::string name;
    int domain = -1;
    Vocabulary vocab;
    struct RelLine { std::string name; int arity; std::vector<std::vector<int>> tuples; };
    std::vector<RelLine> rels;
    std::vector<std::pair<std::string, int>> consts;
    bool ended = false;
    int lineno = 0;
    auto err = [&](const std::string& m) {
        return input_error("structure parse error at line " + std::to_string(lineno) + ": " + m);
    };
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto words = split_ws(line);
        if (words.empty()) continue;
        if (ended) throw err("content after end");
        if (words[0] == "structure") {
            if (words.size() != 2) throw err("expected: structure <name>");
            name = words[1];
        } else if (words[0] == "domain") {
            if (words.size() != 2) throw err("expected: domain <n>");
            domain = std::stoi(words[1]);
        } else if (words[0] == "rel") {
            // rel E/2: (0,1) (1,2)
            std::string rest;
            for (std::size_t i = 1; i < words.size(); ++i) rest += words[i] + " ";
            auto colon = rest.find(':');
            if (colon == std::string::npos) throw err("missing ':' in rel line");
            std::string head = rest.substr(0, colon);
            auto slash = head.find('/');
            if (slash == std::string::npos) throw err("missing '/' in relation symbol");
            RelLine rl;
            rl.name = head.substr(0, slash);
            while (!rl.name.empty() && rl.name.back() == ' ') rl.name.pop_back();
            rl.arity = std::stoi(head.substr(slash + 1));
            if (Vocabulary::reserved_name(rl.name))
                throw err("reserved relation name " + rl.name);
            std::string tail = rest.substr(colon + 1);
            std::string cur;
            for (char c : tail) {
                if (c == '(') cur.clear();
                else if (c == ')') {
                    std::vector<int> t;
                    std::istringstream ts(cur);
                    std::string num;
                    while (std::getline(ts, num, ',')) t.push_back(std::stoi(num));
                    if (static_cast<int>(t.size()) != rl.arity) throw err("tuple arity mismatch");
                    rl.tuples.push_back(std::move(t));
                } else cur += c;
            }
            rels.push_back(std::move(rl));
        } else if (words[0] == "const") {
            if (words.size() != 4 || words[2] != "=") throw err("expected: const <name> = <v>");
            consts.emplace_back(words[1], std::stoi(words[3]));
        } else if (words[0] == "end") {
            ended = true;
        } else {
            throw err("unknown directive " + words[0]);
        }
    }
    if (!ended) throw input_error("structure parse error: missing end");
    if (domain < 0) throw input_error("structure parse error: missing domain");
    for (const auto& rl : rels) vocab.relations.emplace_back(rl.name, rl.arity);
    for (const auto& [cn, _] : consts) vocab.constants.push_back(cn);
    vocab.validate();
    Structure s(vocab, domain);
    s.set_name(name);
    for (std::size_t r = 0; r < rels.size(); ++r)
        for (const auto& t : rels[r].tuples) s.set(static_cast<int>(r), t, true);
    for (std::size_t ci = 0; ci < consts.size(); ++ci)
        s.set_constant(static_cast<int>(ci), consts[ci].second);
    return s;
}

void LinearOrder::validate() const {
    std::vector<bool> seen(perm.size(), false);
    for (int v : perm) {
        if (v < 0 || v >= static_cast<int>(perm.size()) || seen[v])
            throw input_error("order is not a permutation");
        seen[v] = true;
    }
}

std::vector<int> LinearOrder::positions() const {
    std::vector<int> pos(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) pos[perm[i]] = static_cast<int>(i);
    return pos;
}

LinearOrder LinearOrder::natural(int n) {
    LinearOrder o;
    o.perm.resize(n);
    std::iota(o.perm.begin(), o.perm.end(), 0);
    return o;
}

Structure disjoint_union(const Structure& a, const Structure& b) {
    if (a.vocab() != b.vocab()) throw input_error("disjoint_union: vocabulary mismatch");
    if (!a.vocab().constants.empty())
        throw input_error("disjoint_union: constants are not supported");
    if (a.vocab().relation_index("P_left") >= 0 || a.vocab().relation_index("P_right") >= 0)
        throw input_error("disjoint_union: vocabulary already contains part predicates");
    Vocabulary v = a.vocab();
    v.relations.emplace_back("P_left", 1);
    v.relations.emplace_back("P_right", 1);
    Structure out(v, a.size() + b.size());
    int base_rels = static_cast<int>(a.vocab().relations.size());
    for (int r = 0; r < base_rels; ++r) {
        for (auto t : a.tuples(r)) out.set(r, t, true);
        for (auto t : b.tuples(r)) {
            for (int& x : t) x += a.size();
            out.set(r, t, true);
        }
    }
    for (int i = 0; i < a.size(); ++i) { int t[1] = {i}; out.set(base_rels, t, true); }
    for (int i = 0; i < b.size(); ++i) { int t[1] = {a.size() + i}; out.set(base_rels + 1, t, true); }
    return out;
}

Structure direct_product(const Structure& a, const Structure& b) {
    if (a.vocab() != b.vocab()) throw input_error("direct_product: vocabulary mismatch");
    if (!a.vocab().constants.empty())
        throw input_error("direct_product: constants are not supported");
    if (a.size() == 0 || b.size() == 0) throw input_error("direct_product: empty factor");
    Structure out(a.vocab(), a.size() * b.size());
    for (std::size_t r = 0; r < a.vocab().relations.size(); ++r) {
        int arity = a.vocab().relations[r].second;
        for (const auto& ta : a.tuples(static_cast<int>(r))) {
            for (const auto& tb : b.tuples(static_cast<int>(r))) {
                std::vector<int> t(arity);
                for (int i = 0; i < arity; ++i) t[i] = ta[i] + a.size() * tb[i];
                out.set(static_cast<int>(r), t, true);
            }
        }
    }
    return out;
}

LinearOrder lex_product_order(const LinearOrder& oa, const LinearOrder& ob,
                              int size_a, int size_b) {
    if (oa.size() != size_a || ob.size() != size_b)
        throw input_error("lex_product_order: size mismatch");
    LinearOrder out;
    out.perm.reserve(static_cast<std::size_t>(size_a) * size_b);
    for (int j = 0; j < size_b; ++j)
        for (int i = 0; i < size_a; ++i)
            out.perm.push_back(oa.perm[i] + size_a * ob.perm[j]);
    return out;
}

Structure with_order(const Structure& a, const LinearOrder& ord) {
    if (ord.size() != a.size()) throw input_error("with_order: size mismatch");
    ord.validate();
    if (a.vocab().relation_index("<") >= 0)
        throw input_error("with_order: structure already ordered");
    Vocabulary v = a.vocab();
    v.relations.emplace_back("<", 2);
    Structure out(v, a.size());
    for (std::size_t r = 0; r < a.vocab().relations.size(); ++r)
        for (const auto& t : a.tuples(static_cast<int>(r)))
            out.set(static_cast<int>(r), t, true);
    for (std::size_t ci = 0; ci < a.vocab().constants.size(); ++ci)
        out.set_constant(static_cast<int>(ci), a.constant_value(static_cast<int>(ci)));
    int lt = static_cast<int>(v.relations.size()) - 1;
    for (int i = 0; i < a.size(); ++i)
        for (int j = i + 1; j < a.size(); ++j) {
            int t[2] = {ord.perm[i], ord.perm[j]};
            out.set(lt, t, true);
        }
    out.set_name(a.name());
    return out;
}

std::vector<Structure> enumerate_structures(const Vocabulary& vocab, int n,
                                            bool up_to_iso, const Guards& guards) {
    vocab.validate();
    if (n == 0 && !vocab.constants.empty()) return {};
    std::int64_t bits = 0;
    for (const auto& [_, arity] : vocab.relations) {
        std::int64_t c = 1;
        for (int i = 0; i < arity; ++i) c *= n;
        bits += c;
    }
    if (bits > guards.enum_bits_cap)
        throw guard_error("enumerate_structures: relation-bit count " + std::to_string(bits) +
                          " exceeds cap " + std::to_string(guards.enum_bits_cap));
    std::int64_t const_choices = 1;
    for (std::size_t i = 0; i < vocab.constants.size(); ++i) const_choices *= n;

    std::vector<Structure> out;
    std::set<std::string> seen; // canonical keys when up_to_iso
    for (std::int64_t assign = 0; assign < (std::int64_t{1} << bits); ++assign) {
        for (std::int64_t cc = 0; cc < const_choices; ++cc) {
            Structure s(vocab, n);
            std::int64_t a = assign;
            for (std::size_t r = 0; r < vocab.relations.size(); ++r) {
                std::int64_t total = s.tuple_count(static_cast<int>(r));
                for (std::int64_t code = 0; code < total; ++code) {
                    s.set_raw_bit(static_cast<int>(r), code, a & 1);
                    a >>= 1;
                }
            }
            std::int64_t c = cc;
            for (std::size_t ci = 0; ci < vocab.constants.size(); ++ci) {
                s.set_constant(static_cast<int>(ci), static_cast<int>(c % n));
                c /= n;
            }
            if (up_to_iso) {
                std::string key = s.canonical_key();
                if (!seen.insert(key).second) continue;
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<Structure> enumerate_structures_up_to(const Vocabulary& vocab, int max_n,
                                                  bool up_to_iso, const Guards& guards) {
    std::vector<Structure> out;
    for (int n = 0; n <= max_n; ++n) {
        auto v = enumerate_structures(vocab, n, up_to_iso, guards);
        out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    }
    return out;
}

std::vector<LinearOrder> enumerate_orders(int n, const Guards& guards) {
    std::int64_t fact = 1;
    for (int i = 2; i <= n; ++i) {
        fact *= i;
        if (fact > guards.order_cap)
            throw guard_error("enumerate_orders: " + std::to_string(n) + "! exceeds cap");
    }
    std::vector<LinearOrder> out;
    LinearOrder o = LinearOrder::natural(n);
    do {
        out.push_back(o);
    } while (std::next_permutation(o.perm.begin(), o.perm.end()));
    return out;
}

} // namespace oi
