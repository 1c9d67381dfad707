#include "oi/invariance.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace oi {

void FlipPartition::add_node(TypeId t, const Structure& witness) {
    if (t >= static_cast<int>(parent_.size())) {
        parent_.resize(t + 1, -1);
        witness_.resize(t + 1);
    }
    if (parent_[t] == -1) {
        parent_[t] = t;
        witness_[t] = witness;
    }
}

int FlipPartition::find(TypeId t) const {
    int r = t;
    while (parent_[r] != r) r = parent_[r];
    while (parent_[t] != r) {
        int next = parent_[t];
        parent_[t] = r;
        t = next;
    }
    return r;
}

void FlipPartition::merge(TypeId a, TypeId b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
}

bool FlipPartition::contains(TypeId t) const {
    return t >= 0 && t < static_cast<int>(parent_.size()) && parent_[t] != -1;
}

void FlipPartition::finalize() {
    root_id_.assign(parent_.size(), "");
    for (int t = 0; t < static_cast<int>(parent_.size()); ++t) {
        if (parent_[t] == -1) continue;
        int r = find(t);
        const std::string& s = reg_.serialize(t);
        if (root_id_[r].empty() || s < root_id_[r]) root_id_[r] = s;
    }
    components_.clear();
    for (int t = 0; t < static_cast<int>(parent_.size()); ++t)
        if (parent_[t] == t) components_.push_back(root_id_[t]);
    std::sort(components_.begin(), components_.end());
}

const InvariantTypeId& FlipPartition::component_of(TypeId t) const {
    if (!contains(t)) throw input_error("type outside the partition universe");
    return root_id_[find(t)];
}

const Structure& FlipPartition::witness_of(TypeId t) const {
    if (!contains(t)) throw input_error("type outside the partition universe");
    return witness_[t];
}

std::vector<TypeId> FlipPartition::members(const InvariantTypeId& id) const {
    std::vector<TypeId> out;
    for (int t = 0; t < static_cast<int>(parent_.size()); ++t)
        if (parent_[t] != -1 && root_id_[find(t)] == id) out.push_back(t);
    return out;
}

std::string FlipPartition::dump() const {
    std::map<InvariantTypeId, std::vector<std::string>> comp;
    for (int t = 0; t < static_cast<int>(parent_.size()); ++t)
        if (parent_[t] != -1) comp[root_id_[find(t)]].push_back(reg_.serialize(t));
    std::string out = "flip-partition vocab=" + base_.key() + " k=" + std::to_string(k_) +
                      " logic=" + logic_name(logic_) +
                      " aux=" + (aux_ == AuxClass::LinearOrders ? "orders" : "sibling-orders") +
                      " bound=" + std::to_string(bound_) + "\n";
    int i = 0;
    for (auto& [id, types] : comp) {
        std::sort(types.begin(), types.end());
        out += "component " + std::to_string(i++) + "\n";
        for (const std::string& s : types) out += "  " + s + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<Structure> aux_expansions(const Structure& a, int k, const Guards& guards) {
    if (k <= 1 || a.size() <= 1) return {with_order(a, LinearOrder::natural(a.size()))};
    // two ordered expansions are isomorphic iff relabeling each by order rank
    // yields identical structures, so dedup needs no canonical-form search
    std::vector<Structure> out;
    std::set<std::string> seen;
    for (const LinearOrder& o : enumerate_orders(a.size(), guards)) {
        Structure exp = with_order(a, o).relabeled(o.positions());
        if (seen.insert(exp.serialize()).second) out.push_back(std::move(exp));
    }
    return out;
}

std::vector<Structure> aux_expansions(const UnrankedTree& t, int k, const Guards& guards) {
    if (k <= 1) return {tree_to_structure(t, SiblingOrder::text_order(t))};
    std::vector<Structure> out;
    std::set<std::string> seen;
    for (const SiblingOrder& o : enumerate_sibling_orders(t, guards)) {
        Structure exp = tree_to_structure(t, o);
        if (seen.insert(exp.canonical_key()).second) out.push_back(std::move(exp));
    }
    return out;
}

namespace {

void absorb(FlipPartition& p, const std::vector<Structure>& expansions,
            const Guards& guards) {
    TypeId first = -1;
    for (const Structure& exp : expansions) {
        TypeId t = rank_type(exp, p.rank(), p.logic(), p.registry(), guards);
        p.add_node(t, exp);
        if (first == -1) first = t;
        else p.merge(first, t);
    }
}

} // namespace

FlipPartition build_flip_partition_over(const Vocabulary& vocab,
                                        const std::vector<Structure>& structures, int k,
                                        LogicKind logic, int N, const Guards& guards) {
    FlipPartition p(vocab, k, logic, AuxClass::LinearOrders, N);
    for (const Structure& a : structures) {
        if (!(a.vocab() == vocab)) throw input_error("flip partition: vocabulary mismatch");
        if (a.size() > N) throw input_error("flip partition: structure exceeds the bound");
        absorb(p, aux_expansions(a, k, guards), guards);
    }
    p.finalize();
    return p;
}

FlipPartition build_flip_partition(const Vocabulary& vocab, int k, LogicKind logic, int N,
                                   const Guards& guards) {
    return build_flip_partition_over(vocab, enumerate_structures_up_to(vocab, N, true, guards),
                                     k, logic, N, guards);
}

FlipPartition build_tree_flip_partition(const std::vector<std::string>& alphabet, int k,
                                        LogicKind logic, int N, const Guards& guards) {
    std::vector<UnrankedTree> trees = enumerate_trees_up_to(alphabet, N);
    if (trees.empty()) throw input_error("tree flip partition: empty universe");
    Vocabulary vocab = tree_to_structure(trees.front(), SiblingOrder::text_order(trees.front()))
                           .vocab();
    FlipPartition p(vocab, k, logic, AuxClass::SiblingOrders, N);
    for (const UnrankedTree& t : trees) absorb(p, aux_expansions(t, k, guards), guards);
    p.finalize();
    return p;
}

InvariantTypeId invariant_type_of(const Structure& a, FlipPartition& p, const Guards& guards) {
    if (!(a.vocab() == p.base_vocab()))
        throw input_error("invariant_type_of: vocabulary mismatch");
    if (a.size() > p.bound())
        throw input_error("invariant_type_of: structure exceeds the partition bound");
    Structure exp = with_order(a, LinearOrder::natural(a.size()));
    TypeId t = rank_type(exp, p.rank(), p.logic(), p.registry(), guards);
    return p.component_of(t);
}

InvariantTypeId invariant_type_of(const UnrankedTree& t, FlipPartition& p,
                                  const Guards& guards) {
    if (t.node_count() > p.bound())
        throw input_error("invariant_type_of: tree exceeds the partition bound");
    Structure exp = tree_to_structure(t, SiblingOrder::text_order(t));
    if (!(exp.vocab() == p.base_vocab()))
        throw input_error("invariant_type_of: alphabet mismatch");
    TypeId type = rank_type(exp, p.rank(), p.logic(), p.registry(), guards);
    return p.component_of(type);
}

// ---------------------------------------------------------------------------

InvarianceVerdict check_invariance(const Formula& phi, const Vocabulary& base, int N,
                                   const Guards& guards) {
    InvarianceVerdict v;
    v.bound = N;
    for (const Structure& a : enumerate_structures_up_to(base, N, true, guards)) {
        std::vector<LinearOrder> orders = enumerate_orders(a.size(), guards);
        bool ref = evaluate(with_order(a, orders.front()), phi, {}, guards);
        for (std::size_t i = 1; i < orders.size(); ++i) {
            if (evaluate(with_order(a, orders[i]), phi, {}, guards) != ref) {
                v.invariant = false;
                v.structure = a;
                v.order1 = orders.front();
                v.order2 = orders[i];
                return v;
            }
        }
    }
    return v;
}

TreeInvarianceVerdict check_tree_invariance(const Formula& phi,
                                            const std::vector<std::string>& alphabet, int N,
                                            const Guards& guards) {
    TreeInvarianceVerdict v;
    v.bound = N;
    for (const UnrankedTree& t : enumerate_trees_up_to(alphabet, N)) {
        std::vector<SiblingOrder> orders = enumerate_sibling_orders(t, guards);
        bool ref = evaluate(tree_to_structure(t, orders.front()), phi, {}, guards);
        for (std::size_t i = 1; i < orders.size(); ++i) {
            if (evaluate(tree_to_structure(t, orders[i]), phi, {}, guards) != ref) {
                v.invariant = false;
                v.tree = t;
                v.order1 = orders.front();
                v.order2 = orders[i];
                return v;
            }
        }
    }
    return v;
}

bool query_membership(const Formula& phi, const Structure& a, const Guards& guards) {
    return evaluate(with_order(a, LinearOrder::natural(a.size())), phi, {}, guards);
}

} // namespace oi
