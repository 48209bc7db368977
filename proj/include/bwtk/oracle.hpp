#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "bwtk/common.hpp"
#include "bwtk/seqio.hpp"

// Reference implementations, deliberately naive. Everything here works from
// first principles on the in-memory collection so the streaming machinery can
// be checked against it.

namespace bwtk::oracle {

struct Arrays {
    std::vector<uint64_t> sa;   // global text positions in suffix order
    std::vector<uint8_t> bwt;   // end-marker stored as 0x00
    std::vector<uint32_t> da;
    std::vector<int32_t> lcp;   // lcp[0] == -1
    std::vector<uint8_t> xlcp;  // 0/1 per rank
    std::vector<uint32_t> slen; // suffix length including the marker
};

inline std::vector<uint32_t> doc_of_positions(const Collection& c) {
    std::vector<uint32_t> doc(c.total_size());
    for (uint64_t d = 0; d < c.num_docs(); ++d)
        for (uint64_t p = c.doc_start[d]; p <= c.doc_start[d] + c.doc_len[d]; ++p)
            doc[p] = uint32_t(d);
    return doc;
}

// Marker ties are broken by text position, which orders them by document.
inline bool suffix_less(const Collection& c, uint64_t p, uint64_t q) {
    const uint8_t* s = c.data.data();
    for (;;) {
        uint8_t a = s[p], b = s[q];
        if (a == kMarker || b == kMarker) {
            if (a != b) return a == kMarker;
            return p < q;
        }
        if (a != b) return a < b;
        ++p;
        ++q;
    }
}

inline Arrays naive_arrays(const Collection& c) {
    uint64_t n = c.total_size();
    Arrays r;
    r.sa.resize(n);
    std::iota(r.sa.begin(), r.sa.end(), 0);
    std::sort(r.sa.begin(), r.sa.end(),
              [&](uint64_t a, uint64_t b) { return suffix_less(c, a, b); });

    std::vector<uint32_t> doc = doc_of_positions(c);
    std::vector<bool> is_start(n, false);
    for (uint64_t d = 0; d < c.num_docs(); ++d) is_start[c.doc_start[d]] = true;

    r.bwt.resize(n);
    r.da.resize(n);
    r.lcp.assign(n, 0);
    r.xlcp.assign(n, 0);
    r.slen.resize(n);
    const uint8_t* s = c.data.data();
    for (uint64_t i = 0; i < n; ++i) {
        uint64_t p = r.sa[i];
        uint32_t d = doc[p];
        r.da[i] = d;
        r.bwt[i] = is_start[p] ? kMarker : s[p - 1];
        r.slen[i] = uint32_t(c.doc_start[d] + c.doc_len[d] - p + 1);
    }
    r.lcp[0] = -1;
    for (uint64_t i = 1; i < n; ++i) {
        uint64_t p = r.sa[i - 1], q = r.sa[i];
        int32_t l = 0;
        while (s[p] != kMarker && s[p] == s[q]) {
            ++l;
            ++p;
            ++q;
        }
        r.lcp[i] = l;
    }
    for (uint64_t i = 0; i + 1 < n; ++i)
        r.xlcp[i] = (uint32_t(r.lcp[i + 1]) == r.slen[i] - 1) ? 1 : 0;
    return r;
}

struct RepeatRec {
    uint32_t length;
    uint64_t lo, hi; // rank interval, inclusive
    uint32_t distinct_docs;
    bool operator==(const RepeatRec&) const = default;
    auto operator<=>(const RepeatRec&) const = default;
};

struct OccInfo {
    std::vector<std::pair<uint32_t, uint64_t>> occ; // (doc, offset)
};

inline std::map<std::string, OccInfo> substring_occurrences(const Collection& c) {
    std::map<std::string, OccInfo> m;
    for (uint64_t d = 0; d < c.num_docs(); ++d) {
        const char* doc = reinterpret_cast<const char*>(c.data.data() + c.doc_start[d]);
        uint64_t len = c.doc_len[d];
        for (uint64_t i = 0; i < len; ++i)
            for (uint64_t l = 1; i + l <= len; ++l)
                m[std::string(doc + i, l)].occ.push_back({uint32_t(d), i});
    }
    return m;
}

namespace detail {

// Rank interval of the suffixes having this exact occurrence set as prefix.
inline std::pair<uint64_t, uint64_t> rank_interval(const Collection& c, const Arrays& a,
                                                   const std::string& alpha,
                                                   const OccInfo& info) {
    std::set<uint64_t> positions;
    for (auto [d, off] : info.occ) positions.insert(c.doc_start[d] + off);
    uint64_t lo = UINT64_MAX, hi = 0;
    for (uint64_t i = 0; i < a.sa.size(); ++i) {
        if (positions.count(a.sa[i])) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    (void)alpha;
    return {lo, hi};
}

struct ExtProfile {
    bool all_same_follower = false;    // one real symbol follows every occurrence
    bool followers_distinct = true;    // every real follower appears at most once
    uint32_t distinct_preceders = 0;   // boundary occurrences collapse to one value
    bool preceders_distinct = true;    // ditto, collapsed
    uint32_t distinct_docs = 0;
};

inline ExtProfile profile(const Collection& c, const std::string& alpha, const OccInfo& info) {
    ExtProfile p;
    std::map<int, int> pre, post;
    std::set<uint32_t> docs;
    for (auto [d, off] : info.occ) {
        docs.insert(d);
        int before = off > 0 ? c.data[c.doc_start[d] + off - 1] : 0;
        ++pre[before];
        uint64_t end = off + alpha.size();
        if (end < c.doc_len[d])
            ++post[c.data[c.doc_start[d] + end]];
        // occurrences ending at the document boundary never share a follower
    }
    p.distinct_docs = uint32_t(docs.size());
    p.distinct_preceders = uint32_t(pre.size());
    for (auto& [sym, cnt] : pre)
        if (cnt > 1) p.preceders_distinct = false;
    for (auto& [sym, cnt] : post) {
        if (cnt > 1) p.followers_distinct = false;
        if (uint64_t(cnt) == info.occ.size()) p.all_same_follower = true;
    }
    return p;
}

} // namespace detail

struct RepeatParams {
    uint32_t min_length = 1;
    uint64_t min_occ = 2;
};

// Type 1: every one-symbol extension occurs strictly fewer times. Occurrences
// at a document boundary count as a marker extension on the left, so a repeat
// whose occurrences all sit at document starts is not left-maximal here.
inline std::vector<RepeatRec> naive_type1(const Collection& c, const RepeatParams& prm = {}) {
    Arrays a = naive_arrays(c);
    std::vector<RepeatRec> out;
    for (auto& [alpha, info] : substring_occurrences(c)) {
        if (info.occ.size() < std::max<uint64_t>(prm.min_occ, 2)) continue;
        if (alpha.size() < prm.min_length) continue;
        auto p = detail::profile(c, alpha, info);
        if (p.all_same_follower) continue;
        if (p.distinct_preceders < 2) continue;
        auto [lo, hi] = detail::rank_interval(c, a, alpha, info);
        out.push_back({uint32_t(alpha.size()), lo, hi, p.distinct_docs});
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Type 2: every one-symbol extension occurs at most once.
inline std::vector<RepeatRec> naive_type2(const Collection& c, const RepeatParams& prm = {}) {
    Arrays a = naive_arrays(c);
    std::vector<RepeatRec> out;
    for (auto& [alpha, info] : substring_occurrences(c)) {
        if (info.occ.size() < std::max<uint64_t>(prm.min_occ, 2)) continue;
        if (alpha.size() < prm.min_length) continue;
        auto p = detail::profile(c, alpha, info);
        if (!p.followers_distinct) continue;
        if (!p.preceders_distinct) continue;
        auto [lo, hi] = detail::rank_interval(c, a, alpha, info);
        out.push_back({uint32_t(alpha.size()), lo, hi, p.distinct_docs});
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct OverlapRec {
    uint32_t src, dst, length;
    bool operator==(const OverlapRec&) const = default;
    auto operator<=>(const OverlapRec&) const = default;
};

// Longest overlap per ordered pair, testing lengths in descending order.
// Default convention keeps overlaps strictly shorter than the destination;
// containment mode also admits an overlap equal to the whole destination.
inline std::vector<OverlapRec> naive_overlaps(const Collection& c, uint32_t tau,
                                              bool include_self, bool containment) {
    std::vector<OverlapRec> out;
    uint64_t m = c.num_docs();
    for (uint64_t a = 0; a < m; ++a) {
        for (uint64_t b = 0; b < m; ++b) {
            if (a == b && !include_self) continue;
            uint64_t la = c.doc_len[a], lb = c.doc_len[b];
            uint64_t top = std::min(la, containment ? lb : lb - 1);
            for (uint64_t l = top; l > tau; --l) {
                const uint8_t* suf = c.data.data() + c.doc_start[a] + la - l;
                const uint8_t* pre = c.data.data() + c.doc_start[b];
                if (std::equal(suf, suf + l, pre)) {
                    out.push_back({uint32_t(a), uint32_t(b), uint32_t(l)});
                    break;
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct BossGraph {
    std::vector<uint8_t> w;      // edge symbols, 0x00 for marker edges
    std::vector<uint8_t> last;   // 1 closes a node's edge group
    std::vector<uint8_t> wminus; // 1 when the symbol is new within the (k-1)-group
    std::vector<std::pair<uint64_t, uint32_t>> colors; // (edge index, doc)
    uint64_t num_nodes = 0;

    bool operator==(const BossGraph&) const = default;
};

inline BossGraph naive_boss(const Collection& c, uint32_t k, bool with_colors) {
    if (k < 1) throw Error("k must be positive");
    // kmer -> pred symbol -> docs
    std::map<std::string, std::map<uint8_t, std::set<uint32_t>>> nodes;
    for (uint64_t d = 0; d < c.num_docs(); ++d) {
        const char* doc = reinterpret_cast<const char*>(c.data.data() + c.doc_start[d]);
        uint64_t len = c.doc_len[d];
        for (uint64_t i = 0; i + k <= len; ++i) {
            uint8_t pred = i > 0 ? uint8_t(doc[i - 1]) : kMarker;
            nodes[std::string(doc + i, k)][pred].insert(uint32_t(d));
        }
    }
    if (nodes.empty()) throw Error("empty graph: no context of length k survives");
    BossGraph g;
    g.num_nodes = nodes.size();
    std::string prev_group;
    std::set<uint8_t> seen;
    for (auto& [kmer, preds] : nodes) {
        std::string group = kmer.substr(0, k - 1);
        if (group != prev_group || g.w.empty()) {
            seen.clear();
            prev_group = group;
        }
        size_t idx = 0;
        for (auto& [sym, docs] : preds) {
            g.w.push_back(sym);
            g.last.push_back(++idx == preds.size() ? 1 : 0);
            g.wminus.push_back(seen.insert(sym).second ? 1 : 0);
            if (with_colors)
                for (uint32_t d : docs) g.colors.push_back({g.w.size() - 1, d});
        }
    }
    std::sort(g.colors.begin(), g.colors.end());
    return g;
}

} // namespace bwtk::oracle
