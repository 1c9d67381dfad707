#include "oi/types.hpp"

#include <algorithm>
#include <bit>

namespace oi {

TypeId TypeRegistry::intern(Entry e) {
    std::string key;
    key.reserve(64 + e.diagram.size() + 8 * (e.elem_exts.size() + e.set_exts.size()));
    key += logic_name(e.logic);
    key += '/';
    key += std::to_string(e.rank);
    key += '/';
    key += std::to_string(e.vocab);
    key += '/';
    key += std::to_string(e.n_elem_pins);
    key += ',';
    key += std::to_string(e.n_set_pins);
    key += ':';
    key += e.diagram;
    key += '|';
    for (TypeId t : e.elem_exts) {
        key += std::to_string(t);
        key += ' ';
    }
    key += ';';
    for (TypeId t : e.set_exts) {
        key += std::to_string(t);
        key += ' ';
    }
    auto [it, inserted] = index_.try_emplace(std::move(key), size());
    if (inserted) entries_.push_back(std::move(e));
    return it->second;
}

int TypeRegistry::intern_vocab(const Vocabulary& v) {
    auto [it, inserted] = vocab_index_.try_emplace(v.key(), static_cast<int>(vocabs_.size()));
    if (inserted) vocabs_.push_back(v);
    return it->second;
}

const std::string& TypeRegistry::serialize(TypeId t) const {
    if (serialized_.size() < entries_.size()) serialized_.resize(entries_.size());
    std::string& out = serialized_[t];
    if (!out.empty()) return out;
    const Entry& e = entries_[t];
    std::string s = "(";
    s += logic_name(e.logic);
    s += ' ';
    s += std::to_string(e.rank);
    s += ' ';
    s += vocabs_[e.vocab].key();
    s += ' ';
    s += std::to_string(e.n_elem_pins);
    s += ',';
    s += std::to_string(e.n_set_pins);
    s += ' ';
    s += e.diagram;
    auto children = [&](const std::vector<TypeId>& ids) {
        std::vector<std::string> kids;
        for (TypeId c : ids) kids.push_back(serialize(c));
        std::sort(kids.begin(), kids.end());
        std::string part;
        for (const std::string& k : kids) part += k;
        return part;
    };
    s += " [" + children(e.elem_exts) + "]";
    if (e.logic == LogicKind::MSO && e.rank > 0) s += " {" + children(e.set_exts) + "}";
    s += ")";
    out = std::move(s);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Atomic diagram of (constants, pinned elements, pinned sets): relation atoms
// and equalities over the element list, memberships in the pinned sets.
std::string diagram_of(const Structure& a, const Pins& pins) {
    std::vector<int> d;
    for (std::size_t c = 0; c < a.vocab().constants.size(); ++c)
        d.push_back(a.constant_value(static_cast<int>(c)));
    d.insert(d.end(), pins.elems.begin(), pins.elems.end());
    int m = static_cast<int>(d.size());

    std::string out;
    std::vector<int> idx, tup;
    for (std::size_t r = 0; r < a.vocab().relations.size(); ++r) {
        int ar = a.vocab().relations[r].second;
        if (m == 0) continue;
        idx.assign(ar, 0);
        tup.resize(ar);
        while (true) {
            for (int i = 0; i < ar; ++i) tup[i] = d[idx[i]];
            out += a.holds(static_cast<int>(r), tup) ? '1' : '0';
            int i = 0;
            for (; i < ar; ++i) {
                if (++idx[i] < m) break;
                idx[i] = 0;
            }
            if (i == ar) break;
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) out += d[i] == d[j] ? '1' : '0';
    for (std::uint64_t s : pins.sets)
        for (int i = 0; i < m; ++i) out += (s >> d[i]) & 1 ? '1' : '0';
    return out;
}

TypeId rank_type_rec(const Structure& a, Pins& pins, int k, LogicKind logic,
                     TypeRegistry& reg, int vocab_id) {
    TypeRegistry::Entry e{logic, k, vocab_id,
                          static_cast<int>(pins.elems.size()),
                          static_cast<int>(pins.sets.size()),
                          diagram_of(a, pins), {}, {}};
    if (k > 0) {
        for (int x = 0; x < a.size(); ++x) {
            pins.elems.push_back(x);
            e.elem_exts.push_back(rank_type_rec(a, pins, k - 1, logic, reg, vocab_id));
            pins.elems.pop_back();
        }
        std::sort(e.elem_exts.begin(), e.elem_exts.end());
        e.elem_exts.erase(std::unique(e.elem_exts.begin(), e.elem_exts.end()),
                          e.elem_exts.end());
        if (logic == LogicKind::MSO) {
            std::uint64_t top = std::uint64_t{1} << a.size();
            for (std::uint64_t s = 0; s < top; ++s) {
                pins.sets.push_back(s);
                e.set_exts.push_back(rank_type_rec(a, pins, k - 1, logic, reg, vocab_id));
                pins.sets.pop_back();
            }
            std::sort(e.set_exts.begin(), e.set_exts.end());
            e.set_exts.erase(std::unique(e.set_exts.begin(), e.set_exts.end()),
                             e.set_exts.end());
        }
    }
    return reg.intern(std::move(e));
}

} // namespace

TypeId rank_type(const Structure& a, const Pins& pins, int k, LogicKind logic,
                 TypeRegistry& reg, const Guards& guards) {
    if (k < 0) throw input_error("rank_type: negative rank");
    int max_n = logic == LogicKind::FO ? guards.max_size_fo : guards.max_size_mso;
    int max_k = logic == LogicKind::FO ? guards.max_rank_fo : guards.max_rank_mso;
    if (a.size() > max_n)
        throw guard_error("rank_type: structure size " + std::to_string(a.size()) +
                          " exceeds cap " + std::to_string(max_n));
    if (k > max_k)
        throw guard_error("rank_type: rank " + std::to_string(k) + " exceeds cap " +
                          std::to_string(max_k));
    for (int x : pins.elems)
        if (x < 0 || x >= a.size()) throw input_error("rank_type: pinned element out of domain");
    for (std::uint64_t s : pins.sets)
        if (a.size() < 64 && (s >> a.size()) != 0)
            throw input_error("rank_type: pinned set out of domain");
    Pins work = pins;
    int vid = reg.intern_vocab(a.vocab());
    return rank_type_rec(a, work, k, logic, reg, vid);
}

TypeId rank_type(const Structure& a, int k, LogicKind logic, TypeRegistry& reg,
                 const Guards& guards) {
    return rank_type(a, Pins{}, k, logic, reg, guards);
}

// -- EF game ----------------------------------------------------------------

namespace {

struct ElemProfile {
    std::vector<int> bits; // per relation: loop, out-count, in-count (arity 2); member (arity 1)
    bool operator==(const ElemProfile&) const = default;
};

std::vector<ElemProfile> profiles(const Structure& s) {
    std::vector<ElemProfile> out(s.size());
    for (std::size_t r = 0; r < s.vocab().relations.size(); ++r) {
        int ar = s.vocab().relations[r].second;
        for (int x = 0; x < s.size(); ++x) {
            ElemProfile& p = out[x];
            if (ar == 1) {
                int t[1] = {x};
                p.bits.push_back(s.holds(static_cast<int>(r), t) ? 1 : 0);
            } else if (ar == 2) {
                int loop[2] = {x, x};
                int outc = 0, inc = 0;
                for (int y = 0; y < s.size(); ++y) {
                    int t1[2] = {x, y}, t2[2] = {y, x};
                    outc += s.holds(static_cast<int>(r), t1);
                    inc += s.holds(static_cast<int>(r), t2);
                }
                p.bits.push_back(s.holds(static_cast<int>(r), loop) ? 1 : 0);
                p.bits.push_back(outc);
                p.bits.push_back(inc);
            }
        }
    }
    return out;
}

class EfGame {
public:
    EfGame(const Structure& a, const Structure& b, bool mso)
        : a_(a), b_(b), mso_(mso), prof_a_(profiles(a)), prof_b_(profiles(b)) {
        for (std::size_t c = 0; c < a.vocab().constants.size(); ++c) {
            pa_.push_back(a.constant_value(static_cast<int>(c)));
            pb_.push_back(b.constant_value(static_cast<int>(c)));
        }
        // spoiler prefers elements whose local profile is unmatched across
        order_a_ = spoiler_order(prof_a_, prof_b_);
        order_b_ = spoiler_order(prof_b_, prof_a_);
    }

    bool partial_iso() const {
        int m = static_cast<int>(pa_.size());
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if ((pa_[i] == pa_[j]) != (pb_[i] == pb_[j])) return false;
        std::vector<int> ta, tb, idx;
        for (std::size_t r = 0; r < a_.vocab().relations.size(); ++r) {
            int ar = a_.vocab().relations[r].second;
            if (m == 0) continue;
            idx.assign(ar, 0);
            ta.resize(ar);
            tb.resize(ar);
            while (true) {
                for (int i = 0; i < ar; ++i) {
                    ta[i] = pa_[idx[i]];
                    tb[i] = pb_[idx[i]];
                }
                if (a_.holds(static_cast<int>(r), ta) != b_.holds(static_cast<int>(r), tb))
                    return false;
                int i = 0;
                for (; i < ar; ++i) {
                    if (++idx[i] < m) break;
                    idx[i] = 0;
                }
                if (i == ar) break;
            }
        }
        for (std::size_t j = 0; j < sa_.size(); ++j)
            for (int i = 0; i < m; ++i)
                if (((sa_[j] >> pa_[i]) & 1) != ((sb_[j] >> pb_[i]) & 1)) return false;
        return true;
    }

    bool duplicator_wins(int rounds) {
        if (!partial_iso()) return false;
        return search(rounds);
    }

private:
    static std::vector<int> spoiler_order(const std::vector<ElemProfile>& mine,
                                          const std::vector<ElemProfile>& theirs) {
        std::vector<int> order(mine.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            auto matched = [&](int e) {
                for (const ElemProfile& p : theirs)
                    if (p == mine[e]) return 1;
                return 0;
            };
            return matched(x) < matched(y);
        });
        return order;
    }

    // responses with an equal profile first
    std::vector<int> response_order(int spoiler_elem, bool spoiler_in_a) const {
        const auto& sp = spoiler_in_a ? prof_a_ : prof_b_;
        const auto& rp = spoiler_in_a ? prof_b_ : prof_a_;
        std::vector<int> order(rp.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            return (rp[x] == sp[spoiler_elem]) > (rp[y] == sp[spoiler_elem]);
        });
        return order;
    }

    bool elem_round_ok(bool spoiler_in_a, int rounds) {
        auto& sp = spoiler_in_a ? pa_ : pb_;
        auto& rp = spoiler_in_a ? pb_ : pa_;
        const auto& order = spoiler_in_a ? order_a_ : order_b_;
        int rn = spoiler_in_a ? b_.size() : a_.size();
        for (int x : order) {
            sp.push_back(x);
            bool found = false;
            for (int y : response_order(x, spoiler_in_a)) {
                if (y >= rn) continue;
                rp.push_back(y);
                if (partial_iso() && search(rounds - 1)) found = true;
                rp.pop_back();
                if (found) break;
            }
            sp.pop_back();
            if (!found) return false;
        }
        return true;
    }

    bool set_round_ok(bool spoiler_in_a, int rounds) {
        auto& sp = spoiler_in_a ? sa_ : sb_;
        auto& rp = spoiler_in_a ? sb_ : sa_;
        int sn = spoiler_in_a ? a_.size() : b_.size();
        int rn = spoiler_in_a ? b_.size() : a_.size();
        std::uint64_t stop = std::uint64_t{1} << sn;
        std::uint64_t rtop = std::uint64_t{1} << rn;
        std::vector<std::uint64_t> responses;
        responses.reserve(rtop);
        for (std::uint64_t s = 0; s < stop; ++s) {
            sp.push_back(s);
            responses.clear();
            for (std::uint64_t t = 0; t < rtop; ++t) responses.push_back(t);
            int want = std::popcount(s);
            std::stable_sort(responses.begin(), responses.end(),
                             [&](std::uint64_t x, std::uint64_t y) {
                                 return std::abs(std::popcount(x) - want) <
                                        std::abs(std::popcount(y) - want);
                             });
            bool found = false;
            for (std::uint64_t t : responses) {
                rp.push_back(t);
                if (partial_iso() && search(rounds - 1)) found = true;
                rp.pop_back();
                if (found) break;
            }
            sp.pop_back();
            if (!found) return false;
        }
        return true;
    }

    // position is consistent on entry
    bool search(int rounds) {
        if (rounds == 0) return true;
        if (!elem_round_ok(true, rounds)) return false;
        if (!elem_round_ok(false, rounds)) return false;
        if (mso_) {
            if (!set_round_ok(true, rounds)) return false;
            if (!set_round_ok(false, rounds)) return false;
        }
        return true;
    }

    const Structure &a_, &b_;
    bool mso_;
    std::vector<ElemProfile> prof_a_, prof_b_;
    std::vector<int> order_a_, order_b_;
    std::vector<int> pa_, pb_;
    std::vector<std::uint64_t> sa_, sb_;
};

} // namespace

bool ef_equivalent(const Structure& a, const Structure& b, int k, LogicKind logic,
                   const Guards& guards) {
    if (!(a.vocab() == b.vocab())) throw input_error("ef_equivalent: vocabulary mismatch");
    if (k < 0) throw input_error("ef_equivalent: negative round count");
    if (a.size() > guards.ef_max_size || b.size() > guards.ef_max_size)
        throw guard_error("ef_equivalent: structure size exceeds cap " +
                          std::to_string(guards.ef_max_size));
    int max_k = logic == LogicKind::FO ? guards.max_rank_fo : guards.ef_max_rank_mso;
    if (k > max_k)
        throw guard_error("ef_equivalent: round count " + std::to_string(k) +
                          " exceeds cap " + std::to_string(max_k));
    EfGame game(a, b, logic == LogicKind::MSO);
    return game.duplicator_wins(k);
}

// ---------------------------------------------------------------------------

std::vector<RealizedType> realized_types(const Vocabulary& vocab, int k, LogicKind logic,
                                         int max_n, TypeRegistry& reg,
                                         const Guards& guards) {
    std::vector<RealizedType> out;
    std::vector<char> seen;
    for (const Structure& s : enumerate_structures_up_to(vocab, max_n, true, guards)) {
        TypeId t = rank_type(s, k, logic, reg, guards);
        if (t >= static_cast<int>(seen.size())) seen.resize(t + 1, 0);
        if (!seen[t]) {
            seen[t] = 1;
            out.push_back({t, s});
        }
    }
    std::sort(out.begin(), out.end(), [&](const RealizedType& x, const RealizedType& y) {
        return reg.serialize(x.type) < reg.serialize(y.type);
    });
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// rebuild literal ASTs from the diagram layout of diagram_of()
int diagram_literals(const TypeRegistry::Entry& e, const Vocabulary& vocab,
                     FormulaBuilder& b, const std::vector<int>& vars,
                     std::vector<int>& out) {
    int m = static_cast<int>(vars.size());
    std::size_t bit = 0;
    std::vector<int> idx;
    for (const auto& [name, ar] : vocab.relations) {
        if (m == 0) continue;
        idx.assign(ar, 0);
        while (true) {
            std::vector<int> args;
            for (int i = 0; i < ar; ++i) args.push_back(vars[idx[i]]);
            int atom = name == "<" ? b.lt(args[0], args[1]) : b.rel(name, args);
            out.push_back(e.diagram[bit++] == '1' ? atom : b.neg(atom));
            int i = 0;
            for (; i < ar; ++i) {
                if (++idx[i] < m) break;
                idx[i] = 0;
            }
            if (i == ar) break;
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            int atom = b.eq(vars[i], vars[j]);
            out.push_back(e.diagram[bit++] == '1' ? atom : b.neg(atom));
        }
    return static_cast<int>(bit);
}

int hintikka(const TypeRegistry& reg, TypeId t, FormulaBuilder& b,
             const std::vector<int>& vars) {
    const TypeRegistry::Entry& e = reg.entry(t);
    const Vocabulary& vocab = reg.vocab(e.vocab);
    std::vector<int> parts;
    diagram_literals(e, vocab, b, vars, parts);
    if (e.rank > 0) {
        for (TypeId c : e.elem_exts) {
            int x = b.fresh_evar("x" + std::to_string(vars.size()));
            std::vector<int> nvars = vars;
            nvars.push_back(x);
            parts.push_back(b.exists(x, hintikka(reg, c, b, nvars)));
        }
        int x = b.fresh_evar("x" + std::to_string(vars.size()));
        std::vector<int> nvars = vars;
        nvars.push_back(x);
        std::vector<int> cases;
        for (TypeId c : e.elem_exts) cases.push_back(hintikka(reg, c, b, nvars));
        parts.push_back(b.forall(x, b.disj(std::move(cases))));
    }
    return b.conj(std::move(parts));
}

} // namespace

Formula materialize_type_sentence(TypeId t, const TypeRegistry& reg, const Guards& guards) {
    const TypeRegistry::Entry& e = reg.entry(t);
    if (e.logic != LogicKind::FO)
        throw input_error("materialize_type_sentence: FO types only");
    if (e.n_elem_pins != 0 || e.n_set_pins != 0)
        throw input_error("materialize_type_sentence: sentence types only");
    const Vocabulary& vocab = reg.vocab(e.vocab);
    if (!vocab.constants.empty())
        throw input_error("materialize_type_sentence: constant-free vocabularies only");
    if (e.rank > guards.materialize_max_rank)
        throw guard_error("materialize_type_sentence: rank exceeds cap " +
                          std::to_string(guards.materialize_max_rank));
    if (static_cast<int>(vocab.relations.size()) > guards.materialize_max_relations)
        throw guard_error("materialize_type_sentence: relation count exceeds cap " +
                          std::to_string(guards.materialize_max_relations));
    FormulaBuilder b;
    return b.finish(hintikka(reg, t, b, {}));
}

} // namespace oi
