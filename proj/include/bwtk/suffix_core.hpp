#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "bwtk/common.hpp"
#include "bwtk/io_util.hpp"
#include "bwtk/seqio.hpp"

namespace bwtk {

// Suffix order of one document range, computed in RAM by prefix doubling over
// the concatenation. Each marker gets a distinct initial key ordered by
// position, which realizes the tie-break by document index.
inline std::vector<uint32_t> build_suffix_order(const Collection& c, const DocRange& range) {
    uint64_t base = c.doc_start[range.first];
    uint64_t n = range.symbols;
    const uint8_t* s = c.data.data() + base;

    std::vector<uint32_t> rank(n), tmp(n), order(n);
    uint32_t marker_seen = 0;
    for (uint64_t i = 0; i < n; ++i)
        rank[i] = s[i] == kMarker ? marker_seen++ : uint32_t(range.count) + s[i];
    std::iota(order.begin(), order.end(), 0);

    for (uint64_t h = 1;; h *= 2) {
        auto key2 = [&](uint32_t i) -> uint32_t {
            return i + h < n ? rank[i + h] + 1 : 0;
        };
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            if (rank[a] != rank[b]) return rank[a] < rank[b];
            return key2(a) < key2(b);
        });
        tmp[order[0]] = 0;
        bool all_distinct = true;
        for (uint64_t i = 1; i < n; ++i) {
            uint32_t a = order[i - 1], b = order[i];
            bool same = rank[a] == rank[b] && key2(a) == key2(b);
            tmp[b] = tmp[a] + (same ? 0 : 1);
            all_distinct &= !same;
        }
        rank.swap(tmp);
        if (all_distinct || h >= n) break;
    }
    return order;
}

inline std::vector<uint8_t> derive_bwt(const Collection& c, const DocRange& range,
                                       const std::vector<uint32_t>& order) {
    uint64_t base = c.doc_start[range.first];
    const uint8_t* s = c.data.data() + base;
    std::vector<bool> is_start(range.symbols, false);
    for (uint64_t d = range.first; d < range.first + range.count; ++d)
        is_start[c.doc_start[d] - base] = true;
    std::vector<uint8_t> bwt(order.size());
    for (uint64_t i = 0; i < order.size(); ++i)
        bwt[i] = is_start[order[i]] ? kMarker : s[order[i] - 1];
    return bwt;
}

// Document values are global indices so merged arrays refer to the whole
// collection.
inline std::vector<uint32_t> derive_da(const Collection& c, const DocRange& range,
                                       const std::vector<uint32_t>& order) {
    uint64_t base = c.doc_start[range.first];
    std::vector<uint32_t> doc(range.symbols);
    for (uint64_t d = range.first; d < range.first + range.count; ++d) {
        uint64_t lo = c.doc_start[d] - base;
        for (uint64_t p = lo; p <= lo + c.doc_len[d]; ++p) doc[p] = uint32_t(d);
    }
    std::vector<uint32_t> da(order.size());
    for (uint64_t i = 0; i < order.size(); ++i) da[i] = doc[order[i]];
    return da;
}

struct PartialArtifact {
    std::string bwt_path;
    std::string da_path;
    uint64_t size = 0;
    uint64_t markers = 0; // number of documents in this partial
};

inline PartialArtifact write_partial(const std::string& prefix, const std::vector<uint8_t>& bwt,
                                     const std::vector<uint32_t>& da) {
    PartialArtifact p;
    p.bwt_path = prefix + ".bwt";
    p.da_path = prefix + ".da";
    p.size = bwt.size();
    for (uint8_t b : bwt)
        if (b == kMarker) ++p.markers;
    write_all(p.bwt_path, bwt.data(), bwt.size());
    ByteWriter w(p.da_path);
    for (uint32_t v : da) w.put_u32(v);
    w.close();
    return p;
}

} // namespace bwtk
