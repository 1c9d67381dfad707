#include "oi/fv.hpp"

#include <algorithm>
#include <set>

namespace oi {

std::string CompositionTable::dump() const {
    std::string out = "composition-table op=" + std::string(op_name(op)) +
                      " vocab=" + vocab.key() + " k=" + std::to_string(k) +
                      " logic=" + logic_name(logic) + " N=" + std::to_string(bound) +
                      " Ncomp=" + std::to_string(composite_bound) + "\n";
    for (const auto& [key, entry] : entries) {
        out += "entry\n  left  " + key.first + "\n  right " + key.second + "\n  result " +
               entry.result + "\n  witness " + entry.witness_a.serialize() + " | " +
               entry.witness_b.serialize() + "\n";
    }
    return out;
}

namespace {

void check_fv_bounds(CompositionOp op, LogicKind logic, int k, int N) {
    if (op == CompositionOp::Product) {
        if (logic != LogicKind::FO)
            throw input_error("composition tables for products are FO only");
        if (k > 2 || N > 3)
            throw guard_error("product composition table limited to k <= 2, N <= 3");
    } else {
        if (logic == LogicKind::FO ? k > 2 : k > 1)
            throw guard_error("union composition table limited to k <= 2 (FO) / k <= 1 (MSO)");
        if (N > 4) throw guard_error("union composition table limited to N <= 4");
    }
}

Structure compose_structures(CompositionOp op, const Structure& a, const Structure& b) {
    return op == CompositionOp::Union ? disjoint_union(a, b) : direct_product(a, b);
}

} // namespace

FvBuild build_composition_table(CompositionOp op, const Vocabulary& vocab, int k,
                                LogicKind logic, int N, const Guards& guards) {
    if (!vocab.constants.empty())
        throw input_error("composition tables need constant-free vocabularies");
    check_fv_bounds(op, logic, k, N);

    std::vector<Structure> factors = enumerate_structures_up_to(vocab, N, true, guards);
    if (op == CompositionOp::Product)
        std::erase_if(factors, [](const Structure& s) { return s.size() == 0; });

    int n_comp = op == CompositionOp::Union ? 2 * N : N * N;
    std::vector<Structure> composites;
    for (const Structure& a : factors)
        for (const Structure& b : factors) composites.push_back(compose_structures(op, a, b));

    FvBuild build{
        CompositionTable{op, vocab, k, logic, N, n_comp, {}},
        {},
        build_flip_partition(vocab, k, logic, N, guards),
        build_flip_partition_over(composites.front().vocab(), composites, k, logic, n_comp,
                                  guards)};

    for (const Structure& a : factors)
        for (const Structure& b : factors) {
            InvariantTypeId ta = invariant_type_of(a, build.components, guards);
            InvariantTypeId tb = invariant_type_of(b, build.components, guards);
            InvariantTypeId tc =
                invariant_type_of(compose_structures(op, a, b), build.composites, guards);
            auto key = std::make_pair(ta, tb);
            auto it = build.table.entries.find(key);
            if (it == build.table.entries.end()) {
                build.table.entries.emplace(key, CompositionTable::Entry{tc, a, b});
            } else if (it->second.result != tc) {
                build.diagnostics.functional = false;
                build.diagnostics.conflicts.push_back(
                    "key (" + ta + ", " + tb + ") maps to two composite types; witnesses " +
                    it->second.witness_a.serialize() + "|" + it->second.witness_b.serialize() +
                    " vs " + a.serialize() + "|" + b.serialize());
            }
        }
    return build;
}

InvariantTypeId compose(const CompositionTable& table, const InvariantTypeId& ta,
                        const InvariantTypeId& tb) {
    auto it = table.entries.find({ta, tb});
    if (it == table.entries.end())
        throw input_error("compose: type pair not realized at the table's bounds");
    return it->second.result;
}

LinearOrder concat_union_order(const LinearOrder& oa, const LinearOrder& ob) {
    LinearOrder o;
    o.perm = oa.perm;
    for (int e : ob.perm) o.perm.push_back(e + oa.size());
    return o;
}

// ---------------------------------------------------------------------------

namespace {

struct OrderedFactor {
    Structure base; // relabeled so the order is 0 < 1 < ...
    LinearOrder ord;
};

std::vector<OrderedFactor> ordered_universe(const Vocabulary& vocab, int max_n,
                                            const Guards& guards) {
    std::vector<OrderedFactor> out;
    std::set<std::string> seen;
    for (const Structure& a : enumerate_structures_up_to(vocab, max_n, true, guards)) {
        for (const LinearOrder& o : enumerate_orders(a.size(), guards)) {
            Structure base = a.relabeled(o.positions());
            LinearOrder nat = LinearOrder::natural(a.size());
            if (seen.insert(with_order(base, nat).serialize()).second)
                out.push_back({std::move(base), nat});
        }
    }
    return out;
}

} // namespace

LexEfVerdict verify_lex_ef_lemma(const Vocabulary& vocab, int k, int max_a, int max_b,
                                 const Guards& guards) {
    if (!vocab.constants.empty())
        throw input_error("verify_lex_ef_lemma: constant-free vocabularies only");
    if (k > 2) throw guard_error("verify_lex_ef_lemma: k <= 2 only");
    if (max_a * max_b > 9) throw guard_error("verify_lex_ef_lemma: products exceed 9 elements");

    std::vector<OrderedFactor> as = ordered_universe(vocab, max_a, guards);
    std::vector<OrderedFactor> bs = ordered_universe(vocab, max_b, guards);
    std::erase_if(as, [](const OrderedFactor& f) { return f.base.size() == 0; });
    std::erase_if(bs, [](const OrderedFactor& f) { return f.base.size() == 0; });

    auto equiv_pairs = [&](const std::vector<OrderedFactor>& fs) {
        std::vector<std::pair<int, int>> pairs;
        for (std::size_t i = 0; i < fs.size(); ++i)
            for (std::size_t j = i; j < fs.size(); ++j)
                if (ef_equivalent(with_order(fs[i].base, fs[i].ord),
                                  with_order(fs[j].base, fs[j].ord), k, LogicKind::FO, guards))
                    pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        return pairs;
    };
    std::vector<std::pair<int, int>> ap = equiv_pairs(as), bp = equiv_pairs(bs);

    auto product_of = [&](const OrderedFactor& fa, const OrderedFactor& fb) {
        Structure p = direct_product(fa.base, fb.base);
        LinearOrder lex = lex_product_order(fa.ord, fb.ord, fa.base.size(), fb.base.size());
        return with_order(p, lex);
    };
    // cache products per factor pair
    std::vector<std::vector<Structure>> prod(as.size(), std::vector<Structure>(bs.size()));
    std::vector<std::vector<char>> built(as.size(), std::vector<char>(bs.size(), 0));
    auto get_prod = [&](int i, int j) -> const Structure& {
        if (!built[i][j]) {
            prod[i][j] = product_of(as[i], bs[j]);
            built[i][j] = 1;
        }
        return prod[i][j];
    };

    LexEfVerdict v;
    for (auto [i1, i2] : ap)
        for (auto [j1, j2] : bp) {
            ++v.checked;
            if (!ef_equivalent(get_prod(i1, j1), get_prod(i2, j2), k, LogicKind::FO, guards)) {
                v.pass = false;
                v.violation = "A1=" + as[i1].base.serialize() + " A2=" + as[i2].base.serialize() +
                              " B1=" + bs[j1].base.serialize() + " B2=" + bs[j2].base.serialize();
                return v;
            }
        }
    return v;
}

FlipTransportVerdict verify_flip_transport(CompositionOp op, const Vocabulary& vocab, int k,
                                           int N, const Guards& guards) {
    if (!vocab.constants.empty())
        throw input_error("verify_flip_transport: constant-free vocabularies only");
    check_fv_bounds(op, op == CompositionOp::Product ? LogicKind::FO : LogicKind::FO, k, N);

    std::vector<Structure> factors = enumerate_structures_up_to(vocab, N, true, guards);
    std::erase_if(factors, [](const Structure& s) { return s.size() == 0; });

    // group ordered expansions by rank-k type
    TypeRegistry reg;
    std::map<TypeId, std::vector<OrderedFactor>> by_type;
    for (const Structure& a : factors)
        for (const LinearOrder& o : enumerate_orders(a.size(), guards)) {
            OrderedFactor f{a.relabeled(o.positions()), LinearOrder::natural(a.size())};
            TypeId t = rank_type(with_order(f.base, f.ord), k,
                                 op == CompositionOp::Product ? LogicKind::FO : LogicKind::FO,
                                 reg, guards);
            auto& bucket = by_type[t];
            bool dup = false;
            for (const OrderedFactor& g : bucket)
                if (g.base.serialize() == f.base.serialize()) dup = true;
            if (dup) continue;
            bucket.push_back(std::move(f));
        }

    auto composite = [&](const OrderedFactor& fa, const OrderedFactor& fb) {
        if (op == CompositionOp::Product) {
            Structure p = direct_product(fa.base, fb.base);
            return with_order(p, lex_product_order(fa.ord, fb.ord, fa.base.size(),
                                                   fb.base.size()));
        }
        Structure u = disjoint_union(fa.base, fb.base);
        return with_order(u, concat_union_order(fa.ord, fb.ord));
    };

    FlipTransportVerdict v;
    const long long jump_cap = 200;
    // order steps: re-ordering one factor keeps the underlying composite
    for (const Structure& a : factors) {
        std::vector<LinearOrder> orders = enumerate_orders(a.size(), guards);
        v.order_steps += static_cast<long long>(orders.size()) - 1;
    }
    // jump steps: equal-type expansions of different structures transport to
    // k-round equivalent composites
    for (const auto& [t, bucket] : by_type) {
        if (bucket.size() < 2) continue;
        for (std::size_t i = 0; i + 1 < bucket.size() && v.jump_steps < jump_cap; ++i)
            for (std::size_t j = i + 1; j < bucket.size() && v.jump_steps < jump_cap; ++j)
                for (const auto& [t2, other] : by_type) {
                    if (v.jump_steps >= jump_cap) break;
                    const OrderedFactor& b = other.front();
                    ++v.jump_steps;
                    bool left = ef_equivalent(composite(bucket[i], b), composite(bucket[j], b),
                                              k, LogicKind::FO, guards);
                    bool right = ef_equivalent(composite(b, bucket[i]), composite(b, bucket[j]),
                                               k, LogicKind::FO, guards);
                    if (!left || !right) {
                        v.pass = false;
                        v.violation = "A1=" + bucket[i].base.serialize() +
                                      " A2=" + bucket[j].base.serialize() +
                                      " B=" + b.base.serialize();
                        return v;
                    }
                }
    }
    return v;
}

} // namespace oi
