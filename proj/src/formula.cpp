#include "oi/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace oi {

namespace {

std::vector<int> merge_sorted(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

void erase_value(std::vector<int>& v, int x) {
    v.erase(std::remove(v.begin(), v.end(), x), v.end());
}

bool is_quantifier(FKind k) {
    return k == FKind::Exists || k == FKind::Forall || k == FKind::ExistsSet ||
           k == FKind::ForallSet || k == FKind::Count;
}

} // namespace

int FormulaBuilder::add(Formula::Node n) {
    // free-variable bookkeeping
    for (int k : n.kids) {
        n.free_e = merge_sorted(std::move(n.free_e), f_.nodes_[k].free_e);
        n.free_s = merge_sorted(std::move(n.free_s), f_.nodes_[k].free_s);
    }
    n.free_e = merge_sorted(std::move(n.free_e), n.args);
    if (n.svar >= 0) n.free_s = merge_sorted(std::move(n.free_s), {n.svar});
    if (n.kind == FKind::Exists || n.kind == FKind::Forall || n.kind == FKind::Count)
        erase_value(n.free_e, n.var);
    if (n.kind == FKind::ExistsSet || n.kind == FKind::ForallSet)
        erase_value(n.free_s, n.var);
    f_.nodes_.push_back(std::move(n));
    return static_cast<int>(f_.nodes_.size()) - 1;
}

int FormulaBuilder::fresh_evar(const std::string& name) {
    f_.evar_names_.push_back(name);
    return static_cast<int>(f_.evar_names_.size()) - 1;
}

int FormulaBuilder::fresh_svar(const std::string& name) {
    f_.svar_names_.push_back(name);
    return static_cast<int>(f_.svar_names_.size()) - 1;
}

int FormulaBuilder::tru() { return add({.kind = FKind::True}); }
int FormulaBuilder::fls() { return add({.kind = FKind::False}); }

int FormulaBuilder::rel(const std::string& name, std::vector<int> evars) {
    Formula::Node n{.kind = FKind::Rel, .rel = name};
    n.args = std::move(evars);
    return add(std::move(n));
}

int FormulaBuilder::eq(int x, int y) {
    Formula::Node n{.kind = FKind::Eq};
    n.args = {x, y};
    return add(std::move(n));
}

int FormulaBuilder::lt(int x, int y) {
    Formula::Node n{.kind = FKind::Lt};
    n.args = {x, y};
    return add(std::move(n));
}

int FormulaBuilder::in(int x, int X) {
    Formula::Node n{.kind = FKind::In};
    n.args = {x};
    n.svar = X;
    return add(std::move(n));
}

int FormulaBuilder::neg(int f) {
    Formula::Node n{.kind = FKind::Not};
    n.kids = {f};
    return add(std::move(n));
}

int FormulaBuilder::conj(std::vector<int> fs) {
    if (fs.empty()) return tru();
    if (fs.size() == 1) return fs[0];
    Formula::Node n{.kind = FKind::And};
    n.kids = std::move(fs);
    return add(std::move(n));
}

int FormulaBuilder::disj(std::vector<int> fs) {
    if (fs.empty()) return fls();
    if (fs.size() == 1) return fs[0];
    Formula::Node n{.kind = FKind::Or};
    n.kids = std::move(fs);
    return add(std::move(n));
}

int FormulaBuilder::implies(int f, int g) {
    Formula::Node n{.kind = FKind::Implies};
    n.kids = {f, g};
    return add(std::move(n));
}

namespace {
Formula::Node quant(FKind k, int var, int f) {
    Formula::Node n{.kind = k};
    n.var = var;
    n.kids = {f};
    return n;
}
} // namespace

int FormulaBuilder::exists(int var, int f) { return add(quant(FKind::Exists, var, f)); }
int FormulaBuilder::forall(int var, int f) { return add(quant(FKind::Forall, var, f)); }
int FormulaBuilder::exists_set(int var, int f) { return add(quant(FKind::ExistsSet, var, f)); }
int FormulaBuilder::forall_set(int var, int f) { return add(quant(FKind::ForallSet, var, f)); }

int FormulaBuilder::count(int p, int var, int f) {
    if (p < 1) throw input_error("counting quantifier requires p >= 1");
    Formula::Node n = quant(FKind::Count, var, f);
    n.p = p;
    return add(std::move(n));
}

int FormulaBuilder::splice(const Formula& src, int src_node,
                           const std::vector<int>& evar_map, const std::vector<int>& svar_map) {
    std::vector<int> emap = evar_map, smap = svar_map;
    emap.resize(src.num_evars(), -1);
    smap.resize(src.num_svars(), -1);
    // check all free variables are mapped
    for (int v : src.node(src_node).free_e)
        if (emap[v] < 0) throw input_error("splice: unmapped free variable " + src.evar_name(v));
    for (int v : src.node(src_node).free_s)
        if (smap[v] < 0) throw input_error("splice: unmapped free set variable " + src.svar_name(v));

    std::function<int(int)> go = [&](int i) -> int {
        const Formula::Node& n = src.node(i);
        Formula::Node copy{.kind = n.kind, .rel = n.rel, .p = n.p};
        if (is_quantifier(n.kind)) {
            bool set_q = n.kind == FKind::ExistsSet || n.kind == FKind::ForallSet;
            int fresh = set_q ? fresh_svar(src.svar_name(n.var)) : fresh_evar(src.evar_name(n.var));
            (set_q ? smap : emap)[n.var] = fresh;
            copy.var = fresh;
        }
        for (int a : n.args) copy.args.push_back(emap[a]);
        if (n.svar >= 0) copy.svar = smap[n.svar];
        for (int k : n.kids) copy.kids.push_back(go(k));
        return add(std::move(copy));
    };
    return go(src_node);
}

Formula FormulaBuilder::finish(int root) {
    f_.root_ = root;
    return std::move(f_);
}

// ---------------------------------------------------------------------------

namespace {

void text_rec(const Formula& f, int i, std::string& out) {
    const Formula::Node& n = f.node(i);
    switch (n.kind) {
        case FKind::True: out += "true"; return;
        case FKind::False: out += "false"; return;
        case FKind::Rel:
            out += "(" + n.rel;
            for (int a : n.args) out += " " + f.evar_name(a);
            out += ")";
            return;
        case FKind::Eq:
            out += "(= " + f.evar_name(n.args[0]) + " " + f.evar_name(n.args[1]) + ")";
            return;
        case FKind::Lt:
            out += "(lt " + f.evar_name(n.args[0]) + " " + f.evar_name(n.args[1]) + ")";
            return;
        case FKind::In:
            out += "(in " + f.evar_name(n.args[0]) + " " + f.svar_name(n.svar) + ")";
            return;
        case FKind::Not:
            out += "(not ";
            text_rec(f, n.kids[0], out);
            out += ")";
            return;
        case FKind::And:
        case FKind::Or: {
            out += n.kind == FKind::And ? "(and" : "(or";
            for (int k : n.kids) {
                out += " ";
                text_rec(f, k, out);
            }
            out += ")";
            return;
        }
        case FKind::Implies:
            out += "(implies ";
            text_rec(f, n.kids[0], out);
            out += " ";
            text_rec(f, n.kids[1], out);
            out += ")";
            return;
        case FKind::Exists:
        case FKind::Forall:
            out += n.kind == FKind::Exists ? "(exists " : "(forall ";
            out += f.evar_name(n.var) + " ";
            text_rec(f, n.kids[0], out);
            out += ")";
            return;
        case FKind::ExistsSet:
        case FKind::ForallSet:
            out += n.kind == FKind::ExistsSet ? "(existsS " : "(forallS ";
            out += f.svar_name(n.var) + " ";
            text_rec(f, n.kids[0], out);
            out += ")";
            return;
        case FKind::Count:
            out += "(count " + std::to_string(n.p) + " " + f.evar_name(n.var) + " ";
            text_rec(f, n.kids[0], out);
            out += ")";
            return;
    }
}

} // namespace

std::string Formula::to_text() const {
    std::string out;
    text_rec(*this, root_, out);
    return out;
}

void Formula::check_vocabulary(const Vocabulary& vocab) const {
    for (const Node& n : nodes_) {
        if (n.kind == FKind::Rel) {
            int r = vocab.relation_index(n.rel);
            if (r < 0) throw input_error("unknown relation symbol " + n.rel);
            if (vocab.relations[r].second != static_cast<int>(n.args.size()))
                throw input_error("arity mismatch for relation " + n.rel);
        } else if (n.kind == FKind::Lt) {
            if (vocab.relation_index("<") < 0)
                throw input_error("formula uses lt but vocabulary has no order relation");
        }
    }
}

int quantifier_rank(const Formula& f) {
    std::function<int(int)> go = [&](int i) -> int {
        const Formula::Node& n = f.node(i);
        int m = 0;
        for (int k : n.kids) m = std::max(m, go(k));
        return m + (is_quantifier(n.kind) ? 1 : 0);
    };
    return f.root() >= 0 ? go(f.root()) : 0;
}

// -- parser -----------------------------------------------------------------

namespace {

struct SexprParser {
    const std::string& text;
    std::size_t pos = 0;
    FormulaBuilder b;
    // lexical scope: name -> (slot, is_set)
    std::vector<std::pair<std::string, std::pair<int, bool>>> scope;
    std::unordered_map<std::string, std::pair<int, bool>> free_vars;

    explicit SexprParser(const std::string& s) : text(s) {}

    [[noreturn]] void fail(const std::string& m) const {
        throw input_error("formula parse error at position " + std::to_string(pos) + ": " + m);
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    std::string token() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')')
            ++pos;
        if (pos == start) fail("expected token");
        return text.substr(start, pos - start);
    }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    std::pair<int, bool>* lookup(const std::string& name) {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == name) return &it->second;
        auto fit = free_vars.find(name);
        return fit == free_vars.end() ? nullptr : &fit->second;
    }

    int var_use(const std::string& name, bool want_set) {
        if (auto* entry = lookup(name)) {
            if (entry->second != want_set)
                fail("variable " + name + (want_set ? " used as set variable" : " used as element variable"));
            return entry->first;
        }
        int slot = want_set ? b.fresh_svar(name) : b.fresh_evar(name);
        free_vars[name] = {slot, want_set};
        return slot;
    }

    int formula() {
        skip_ws();
        if (!peek('(')) {
            std::string t = token();
            if (t == "true") return b.tru();
            if (t == "false") return b.fls();
            fail("expected '(' or true/false");
        }
        expect('(');
        std::string head = token();
        int result;
        if (head == "and" || head == "or") {
            std::vector<int> kids;
            while (!peek(')')) kids.push_back(formula());
            if (kids.empty()) fail(head + " needs at least one argument");
            result = head == "and" ? b.conj(std::move(kids)) : b.disj(std::move(kids));
        } else if (head == "not") {
            result = b.neg(formula());
        } else if (head == "implies") {
            int f = formula();
            int g = formula();
            result = b.implies(f, g);
        } else if (head == "exists" || head == "forall" || head == "existsS" ||
                   head == "forallS") {
            bool set_q = head == "existsS" || head == "forallS";
            std::string name = token();
            int slot = set_q ? b.fresh_svar(name) : b.fresh_evar(name);
            scope.push_back({name, {slot, set_q}});
            int body = formula();
            scope.pop_back();
            if (head == "exists") result = b.exists(slot, body);
            else if (head == "forall") result = b.forall(slot, body);
            else if (head == "existsS") result = b.exists_set(slot, body);
            else result = b.forall_set(slot, body);
        } else if (head == "count") {
            std::string pt = token();
            int p = 0;
            try { p = std::stoi(pt); } catch (...) { fail("count needs a numeric divisor"); }
            if (p < 1) fail("count divisor must be >= 1");
            std::string name = token();
            int slot = b.fresh_evar(name);
            scope.push_back({name, {slot, false}});
            int body = formula();
            scope.pop_back();
            result = b.count(p, slot, body);
        } else if (head == "=") {
            int x = var_use(token(), false);
            int y = var_use(token(), false);
            result = b.eq(x, y);
        } else if (head == "lt") {
            int x = var_use(token(), false);
            int y = var_use(token(), false);
            result = b.lt(x, y);
        } else if (head == "in") {
            int x = var_use(token(), false);
            int X = var_use(token(), true);
            result = b.in(x, X);
        } else {
            // relation atom
            std::vector<int> args;
            while (!peek(')')) args.push_back(var_use(token(), false));
            result = b.rel(head, std::move(args));
        }
        expect(')');
        return result;
    }
};

} // namespace

Formula parse_formula(const std::string& text) {
    SexprParser p(text);
    int root = p.formula();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return p.b.finish(root);
}

// -- evaluation -------------------------------------------------------------

namespace {

class Evaluator {
public:
    Evaluator(const Structure& a, const Formula& f, const Guards& g)
        : a_(a), f_(f), g_(g) {
        elems_.assign(std::max(f.num_evars(), 1), -1);
        sets_.assign(std::max(f.num_svars(), 1), 0);
        sdef_.assign(std::max(f.num_svars(), 1), false);
        lt_rel_ = a.vocab().relation_index("<");
    }

    void load(const Assignment& alpha) {
        for (std::size_t i = 0; i < alpha.elems.size() && i < elems_.size(); ++i)
            elems_[i] = alpha.elems[i];
        for (std::size_t i = 0; i < alpha.sets.size() && i < sets_.size(); ++i) {
            sets_[i] = alpha.sets[i];
            sdef_[i] = i < alpha.set_defined.size() ? static_cast<bool>(alpha.set_defined[i]) : true;
        }
    }

    bool eval(int i) {
        const Formula::Node& n = f_.node(i);
        bool cacheable = n.free_s.empty() && n.free_e.size() <= 3 &&
                         n.kind != FKind::Rel && n.kind != FKind::Eq &&
                         n.kind != FKind::Lt && n.kind != FKind::In &&
                         n.kind != FKind::True && n.kind != FKind::False;
        std::uint64_t key = 0;
        if (cacheable) {
            key = static_cast<std::uint64_t>(i);
            for (int v : n.free_e) key = (key << 8) | static_cast<std::uint64_t>(elems_[v] + 1);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        bool result = eval_raw(n);
        if (cacheable) memo_[key] = result;
        return result;
    }

private:
    bool eval_raw(const Formula::Node& n) {
        switch (n.kind) {
            case FKind::True: return true;
            case FKind::False: return false;
            case FKind::Rel: {
                int r = a_.vocab().relation_index(n.rel);
                if (r < 0) throw input_error("unknown relation symbol " + n.rel);
                if (a_.vocab().relations[r].second != static_cast<int>(n.args.size()))
                    throw input_error("arity mismatch for relation " + n.rel);
                std::vector<int> t;
                t.reserve(n.args.size());
                for (int v : n.args) t.push_back(value(v));
                return a_.holds(r, t);
            }
            case FKind::Eq: return value(n.args[0]) == value(n.args[1]);
            case FKind::Lt: {
                if (lt_rel_ < 0)
                    throw input_error("formula uses lt but structure has no order relation");
                int t[2] = {value(n.args[0]), value(n.args[1])};
                return a_.holds(lt_rel_, t);
            }
            case FKind::In: {
                if (!sdef_[n.svar])
                    throw input_error("unbound set variable " + f_.svar_name(n.svar));
                return (sets_[n.svar] >> value(n.args[0])) & 1;
            }
            case FKind::Not: return !eval(n.kids[0]);
            case FKind::And:
                for (int k : n.kids)
                    if (!eval(k)) return false;
                return true;
            case FKind::Or:
                for (int k : n.kids)
                    if (eval(k)) return true;
                return false;
            case FKind::Implies: return !eval(n.kids[0]) || eval(n.kids[1]);
            case FKind::Exists:
            case FKind::Forall: {
                bool want = n.kind == FKind::Exists;
                for (int e = 0; e < a_.size(); ++e) {
                    elems_[n.var] = e;
                    if (eval(n.kids[0]) == want) {
                        elems_[n.var] = -1;
                        return want;
                    }
                }
                elems_[n.var] = -1;
                return !want;
            }
            case FKind::ExistsSet:
            case FKind::ForallSet: {
                if (a_.size() > g_.eval_max_set_domain)
                    throw guard_error("set quantification over domain of size " +
                                      std::to_string(a_.size()) + " exceeds cap");
                bool want = n.kind == FKind::ExistsSet;
                std::uint64_t top = std::uint64_t{1} << a_.size();
                sdef_[n.var] = true;
                for (std::uint64_t m = 0; m < top; ++m) {
                    sets_[n.var] = m;
                    if (eval(n.kids[0]) == want) {
                        sdef_[n.var] = false;
                        return want;
                    }
                }
                sdef_[n.var] = false;
                return !want;
            }
            case FKind::Count: {
                int c = 0;
                for (int e = 0; e < a_.size(); ++e) {
                    elems_[n.var] = e;
                    if (eval(n.kids[0])) ++c;
                }
                elems_[n.var] = -1;
                return c % n.p == 0;
            }
        }
        return false; // unreachable
    }

    int value(int slot) const {
        if (elems_[slot] < 0) throw input_error("unbound variable " + f_.evar_name(slot));
        if (elems_[slot] >= a_.size()) throw input_error("assignment value out of domain");
        return elems_[slot];
    }

    const Structure& a_;
    const Formula& f_;
    Guards g_;
    std::vector<int> elems_;
    std::vector<std::uint64_t> sets_;
    std::vector<bool> sdef_;
    int lt_rel_;
    std::unordered_map<std::uint64_t, bool> memo_;
};

} // namespace

bool evaluate(const Structure& a, const Formula& f, const Assignment& alpha,
              const Guards& guards) {
    if (a.size() > 64) throw guard_error("evaluation limited to domains of size <= 64");
    Evaluator ev(a, f, guards);
    ev.load(alpha);
    return ev.eval(f.root());
}

// -- divisibility sentences -------------------------------------------------

Formula order_divisibility_sentence(int p, const Formula& psi) {
    if (p < 2) throw input_error("order_divisibility_sentence requires p >= 2");
    if (psi.free_evars().size() != 1 || !psi.free_svars().empty())
        throw input_error("psi must have exactly one free element variable");
    int psi_var = psi.free_evars()[0];

    FormulaBuilder b;
    std::vector<int> markers; // set slots S_1 .. S_{p-1}
    for (int j = 1; j < p; ++j) markers.push_back(b.fresh_svar("S" + std::to_string(j)));

    auto sat = [&](int v) {
        std::vector<int> emap(psi.num_evars(), -1);
        emap[psi_var] = v;
        return b.splice(psi, psi.root(), emap, {});
    };
    auto residue0 = [&](int v) { // in no marker set
        std::vector<int> cs;
        for (int m : markers) cs.push_back(b.neg(b.in(v, m)));
        return b.conj(std::move(cs));
    };

    std::vector<int> conjuncts;

    {   // markers contain only satisfiers, pairwise disjoint
        int x = b.fresh_evar("x");
        std::vector<int> body;
        for (int m : markers) body.push_back(b.implies(b.in(x, m), sat(x)));
        for (std::size_t i = 0; i < markers.size(); ++i)
            for (std::size_t j = i + 1; j < markers.size(); ++j)
                body.push_back(b.neg(b.conj({b.in(x, markers[i]), b.in(x, markers[j])})));
        conjuncts.push_back(b.forall(x, b.conj(std::move(body))));
    }
    {   // the <-least satisfier is in S_1
        int x = b.fresh_evar("x");
        int y = b.fresh_evar("y");
        int is_first = b.conj({sat(x), b.neg(b.exists(y, b.conj({sat(y), b.lt(y, x)})))});
        conjuncts.push_back(b.forall(x, b.implies(is_first, b.in(x, markers[0]))));
    }
    {   // residue increments along <-successorship among satisfiers
        int x = b.fresh_evar("x");
        int y = b.fresh_evar("y");
        int z = b.fresh_evar("z");
        int between = b.exists(z, b.conj({sat(z), b.lt(x, z), b.lt(z, y)}));
        int succ = b.conj({sat(x), sat(y), b.lt(x, y), b.neg(between)});
        std::vector<int> steps;
        // residue j -> residue j+1; residue p-1 -> residue 0; residue 0 -> S_1
        for (int j = 1; j <= p - 2; ++j)
            steps.push_back(b.implies(b.in(x, markers[j - 1]), b.in(y, markers[j])));
        steps.push_back(b.implies(b.in(x, markers[p - 2]), residue0(y)));
        steps.push_back(b.implies(residue0(x), b.in(y, markers[0])));
        conjuncts.push_back(b.forall(x, b.forall(y, b.implies(succ, b.conj(std::move(steps))))));
    }
    {   // the <-greatest satisfier has residue 0
        int x = b.fresh_evar("x");
        int y = b.fresh_evar("y");
        int is_last = b.conj({sat(x), b.neg(b.exists(y, b.conj({sat(y), b.lt(x, y)})))});
        conjuncts.push_back(b.forall(x, b.implies(is_last, residue0(x))));
    }

    int body = b.conj(std::move(conjuncts));
    for (auto it = markers.rbegin(); it != markers.rend(); ++it)
        body = b.exists_set(*it, body);
    return b.finish(body);
}

Formula phi_even() {
    FormulaBuilder b;
    int x = b.fresh_evar("x");
    Formula triv = [&] {
        FormulaBuilder tb;
        int v = tb.fresh_evar("x");
        return tb.finish(tb.eq(v, v));
    }();
    (void)x;
    return order_divisibility_sentence(2, triv);
}

} // namespace oi
