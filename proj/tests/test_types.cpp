#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oi/types.hpp"

using namespace oi;

namespace {

Structure pure_set(int n) { return Structure(Vocabulary{}, n); }

Vocabulary binary_vocab() { return Vocabulary{{{"E", 2}}, {}}; }

Structure linear_order(int n) {
    return with_order(pure_set(n), LinearOrder::natural(n));
}

bool same_type(const Structure& a, const Structure& b, int k, LogicKind logic,
               const Guards& g = {}) {
    TypeRegistry reg;
    return rank_type(a, k, logic, reg, g) == rank_type(b, k, logic, reg, g);
}

} // namespace

TEST_CASE("rank 0 sentences see nothing") {
    CHECK(same_type(pure_set(1), pure_set(5), 0, LogicKind::FO));
    Structure e(binary_vocab(), 2);
    int t[2] = {0, 1};
    e.set(0, t);
    CHECK(same_type(e, Structure(binary_vocab(), 3), 0, LogicKind::FO));
}

TEST_CASE("rank 1 counts only emptiness") {
    CHECK(same_type(pure_set(2), pure_set(3), 1, LogicKind::FO));
    CHECK(!same_type(pure_set(0), pure_set(1), 1, LogicKind::FO));
    // one more set round does not help at this rank
    CHECK(same_type(pure_set(2), pure_set(3), 1, LogicKind::MSO));
}

TEST_CASE("rank 2 separates one from two") {
    CHECK(!same_type(pure_set(1), pure_set(2), 2, LogicKind::FO));
}

TEST_CASE("MSO rank 4 separates even from odd linear orders") {
    Guards g;
    g.raise_rank(4);
    CHECK(!same_type(linear_order(4), linear_order(5), 4, LogicKind::MSO, g));
}

TEST_CASE("type ids are isomorphism invariant") {
    std::mt19937 rng(7);
    TypeRegistry reg;
    for (int trial = 0; trial < 30; ++trial) {
        int n = static_cast<int>(rng() % 4) + 1;
        Structure a(binary_vocab(), n);
        for (std::int64_t c = 0; c < a.tuple_count(0); ++c)
            a.set_raw_bit(0, c, rng() & 1);
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        Structure b = a.relabeled(perm);
        for (int k = 0; k <= 2; ++k)
            for (LogicKind logic : {LogicKind::FO, LogicKind::MSO})
                CHECK(rank_type(a, k, logic, reg) == rank_type(b, k, logic, reg));
    }
}

TEST_CASE("serialization is registry independent") {
    TypeRegistry r1, r2;
    Structure a(binary_vocab(), 3);
    int t[2] = {0, 1};
    a.set(0, t);
    // warm r2 with other junk first so raw ids differ
    rank_type(pure_set(2), 2, LogicKind::MSO, r2);
    TypeId t1 = rank_type(a, 2, LogicKind::FO, r1);
    TypeId t2 = rank_type(a, 2, LogicKind::FO, r2);
    CHECK(r1.serialize(t1) == r2.serialize(t2));
    CHECK(t1 != t2); // distinct interning histories
}

TEST_CASE("pins distinguish otherwise equal structures") {
    TypeRegistry reg;
    Structure e(binary_vocab(), 2);
    int t[2] = {0, 1};
    e.set(0, t);
    Pins source{{0}, {}}, sink{{1}, {}};
    CHECK(rank_type(e, source, 1, LogicKind::FO, reg) !=
          rank_type(e, sink, 1, LogicKind::FO, reg));
}

TEST_CASE("type guards") {
    Guards g;
    g.max_size_fo = 3;
    TypeRegistry reg;
    CHECK_THROWS_AS(rank_type(pure_set(4), 1, LogicKind::FO, reg, g), Error);
    g = Guards{};
    g.max_rank_mso = 2;
    CHECK_THROWS_AS(rank_type(pure_set(2), 3, LogicKind::MSO, reg, g), Error);
}

TEST_CASE("game oracle basics") {
    // chains of length 3 and 4 survive 2 rounds, 2 and 3 do not
    auto chain = [](int n) {
        Structure s(binary_vocab(), n);
        for (int i = 0; i + 1 < n; ++i) {
            int t[2] = {i, i + 1};
            s.set(0, t);
        }
        return s;
    };
    // the 3-chain's midpoint has no unrelated partner, so 2 rounds separate
    // it from the 4-chain; 4 vs 5 survive
    CHECK(!ef_equivalent(chain(3), chain(4), 2, LogicKind::FO));
    CHECK(ef_equivalent(chain(4), chain(5), 2, LogicKind::FO));
    CHECK(!ef_equivalent(chain(2), chain(3), 2, LogicKind::FO));
    CHECK(ef_equivalent(pure_set(2), pure_set(3), 2, LogicKind::MSO));
    CHECK(!ef_equivalent(pure_set(2), pure_set(3), 3, LogicKind::MSO));
    CHECK(ef_equivalent(pure_set(3), pure_set(3), 3, LogicKind::MSO));
}

TEST_CASE("game oracle on linear orders") {
    CHECK(ef_equivalent(linear_order(3), linear_order(4), 2, LogicKind::FO));
    CHECK(!ef_equivalent(linear_order(2), linear_order(3), 2, LogicKind::FO));
    Guards g;
    g.raise_rank(4);
    CHECK(!ef_equivalent(linear_order(4), linear_order(5), 4, LogicKind::MSO, g));
}

TEST_CASE("types agree with the game, small sweep") {
    // one binary relation, sizes <= 3, both logics, k <= 2
    std::vector<Structure> all = enumerate_structures_up_to(binary_vocab(), 3, true);
    TypeRegistry reg;
    for (LogicKind logic : {LogicKind::FO, LogicKind::MSO})
        for (int k = 0; k <= 2; ++k)
            for (std::size_t i = 0; i < all.size(); ++i)
                for (std::size_t j = i; j < all.size(); ++j) {
                    bool by_type =
                        rank_type(all[i], k, logic, reg) == rank_type(all[j], k, logic, reg);
                    bool by_game = ef_equivalent(all[i], all[j], k, logic);
                    CHECK(by_type == by_game);
                }
}

TEST_CASE("refinement: higher rank never merges types") {
    std::vector<Structure> all = enumerate_structures_up_to(binary_vocab(), 3, true);
    TypeRegistry reg;
    for (LogicKind logic : {LogicKind::FO, LogicKind::MSO})
        for (int k = 0; k < 2; ++k)
            for (std::size_t i = 0; i < all.size(); ++i)
                for (std::size_t j = i + 1; j < all.size(); ++j) {
                    bool coarse =
                        rank_type(all[i], k, logic, reg) == rank_type(all[j], k, logic, reg);
                    bool fine = rank_type(all[i], k + 1, logic, reg) ==
                                rank_type(all[j], k + 1, logic, reg);
                    if (!coarse) CHECK(!fine);
                }
}

TEST_CASE("realized type counts") {
    TypeRegistry reg;
    CHECK(realized_types(Vocabulary{}, 0, LogicKind::FO, 1, reg).size() == 1);
    CHECK(realized_types(Vocabulary{}, 1, LogicKind::FO, 3, reg).size() == 2);
    // one unary predicate, rank 1: empty structure / P empty / P full / mixed
    CHECK(realized_types(Vocabulary{{{"P", 1}}, {}}, 1, LogicKind::FO, 2, reg).size() == 4);
    // rank 2 on pure sets separates 0, 1, >=2
    auto rt = realized_types(Vocabulary{}, 2, LogicKind::FO, 3, reg);
    CHECK(rt.size() == 3);
    for (const RealizedType& r : rt) CHECK(r.witness.size() <= 3);
}

TEST_CASE("realized types are sorted and witnessed") {
    TypeRegistry reg;
    auto rt = realized_types(binary_vocab(), 1, LogicKind::FO, 2, reg);
    for (std::size_t i = 0; i + 1 < rt.size(); ++i)
        CHECK(reg.serialize(rt[i].type) < reg.serialize(rt[i + 1].type));
    for (const RealizedType& r : rt)
        CHECK(rank_type(r.witness, 1, LogicKind::FO, reg) == r.type);
}

TEST_CASE("materialized sentences define their types") {
    TypeRegistry reg;
    for (LogicKind logic : {LogicKind::FO}) {
        for (int k = 0; k <= 2; ++k) {
            auto rt = realized_types(binary_vocab(), k, logic, 2, reg);
            for (const RealizedType& r : rt) {
                Formula phi = materialize_type_sentence(r.type, reg);
                CHECK(quantifier_rank(phi) <= k);
                for (const Structure& b : enumerate_structures_up_to(binary_vocab(), 3, true)) {
                    bool defined = evaluate(b, phi);
                    bool same = rank_type(b, k, logic, reg) == r.type;
                    CHECK(defined == same);
                }
            }
        }
    }
}

TEST_CASE("materialize guards") {
    TypeRegistry reg;
    Guards g;
    TypeId t = rank_type(pure_set(2), 3, LogicKind::FO, reg);
    g.materialize_max_rank = 2;
    CHECK_THROWS_AS(materialize_type_sentence(t, reg, g), Error);
    TypeId m = rank_type(pure_set(2), 1, LogicKind::MSO, reg);
    CHECK_THROWS_AS(materialize_type_sentence(m, reg), Error);
}
