#pragma once

#include <cstdint>
#include <string>

namespace oi {

// Resource guards. Every limit is a knob; exceeding one raises a Guard error,
// never a silent truncation. Defaults match the documented operating range.
struct Guards {
    // type computation
    int max_size_fo = 8;
    int max_rank_fo = 4;
    int max_size_mso = 8;
    int max_rank_mso = 3;

    // EF game solver
    int ef_max_size = 6;
    int ef_max_rank_mso = 3;

    // enumeration
    int enum_bits_cap = 30;           // total relation-bit count for structure enumeration
    std::int64_t order_cap = 3628800; // 10!

    // type sentence materialization
    int materialize_max_rank = 2;
    int materialize_max_relations = 2;

    // Parikh decomposition
    std::int64_t parikh_seq_cap = 20736; // |Q|^r, 12^4

    // naive evaluation
    int eval_max_set_domain = 20; // 2^n subset enumeration bound

    void raise_rank(int k) {
        if (max_rank_fo < k) max_rank_fo = k;
        if (max_rank_mso < k) max_rank_mso = k;
        if (ef_max_rank_mso < k) ef_max_rank_mso = k;
    }
};

} // namespace oi
