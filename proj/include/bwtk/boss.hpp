#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "bwtk/common.hpp"
#include "bwtk/io_util.hpp"
#include "bwtk/oracle.hpp"
#include "bwtk/pipeline.hpp"

namespace bwtk {

// Builds (W, last, wminus) and optional colors in one pass. Nodes are the
// maximal groups of kept ranks whose pairwise lcp reaches k; lcp values of
// masked-out short rows fold into the gap minimum, so a mask aligned with
// [suffix length <= k] cannot join two groups that differ in their k-mer.
// next_da is consulted only when with_colors is set. next_lcp is called once
// per rank starting at rank 1 and may be depth-capped as long as comparisons
// against k-1 and k stay exact (cap >= k+1).
template <class BwtIn, class LcpIn, class ShortIn, class DaIn>
oracle::BossGraph build_boss(uint64_t n, uint32_t k, BwtIn&& next_bwt, LcpIn&& next_lcp,
                             ShortIn&& next_short, DaIn&& next_da, bool with_colors) {
    if (k < 1) throw Error("k must be positive");
    oracle::BossGraph g;

    std::vector<uint8_t> block_syms; // sorted on emit; marker byte sorts first
    bool block_present[256] = {};
    std::set<uint32_t> block_docs[256];
    bool seen[256] = {}; // symbols already used inside the current (k-1)-group

    auto emit_block = [&] {
        if (block_syms.empty()) return;
        std::sort(block_syms.begin(), block_syms.end());
        for (size_t j = 0; j < block_syms.size(); ++j) {
            uint8_t c = block_syms[j];
            g.w.push_back(c);
            g.last.push_back(j + 1 == block_syms.size() ? 1 : 0);
            g.wminus.push_back(seen[c] ? 0 : 1);
            seen[c] = true;
            if (with_colors) {
                for (uint32_t d : block_docs[c]) g.colors.push_back({g.w.size() - 1, d});
                block_docs[c].clear();
            }
            block_present[c] = false;
        }
        block_syms.clear();
        ++g.num_nodes;
    };

    constexpr int64_t kNoGap = std::numeric_limits<int64_t>::max();
    int64_t gap_min = kNoGap;
    bool any_kept = false;

    for (uint64_t i = 0; i < n; ++i) {
        uint8_t b = next_bwt();
        uint32_t d = with_colors ? next_da() : 0;
        bool short_row = next_short();
        if (i > 0) gap_min = std::min(gap_min, int64_t(next_lcp()));
        if (short_row) continue;

        if (any_kept) {
            if (gap_min < int64_t(k)) emit_block();
            if (gap_min < int64_t(k) - 1) std::fill(std::begin(seen), std::end(seen), false);
        }
        any_kept = true;
        gap_min = kNoGap;

        if (!block_present[b]) {
            block_present[b] = true;
            block_syms.push_back(b);
        }
        if (with_colors) block_docs[b].insert(d);
    }
    emit_block();
    if (g.w.empty()) throw Error("empty graph: no context of length k survives");
    std::sort(g.colors.begin(), g.colors.end());
    return g;
}

inline oracle::BossGraph build_boss(const std::vector<uint8_t>& bwt,
                                    const std::vector<int32_t>& lcp,
                                    const std::vector<uint32_t>& slen,
                                    const std::vector<uint32_t>& da, uint32_t k,
                                    bool with_colors) {
    uint64_t bi = 0, li = 1, si = 0, di = 0;
    return build_boss(
        bwt.size(), k, [&] { return bwt[bi++]; }, [&] { return uint32_t(lcp[li++]); },
        [&] { return slen[si++] <= k; }, [&] { return da[di++]; }, with_colors);
}

struct BossFiles {
    std::string w_path, last_path, wm_path, meta_path, colors_path;
    uint64_t nodes = 0, edges = 0;
};

// Reads <prefix>.bwt/.lcp (+ .da for colors). Uses <prefix>.shortrow when
// present (early-stop runs), otherwise derives the mask from suffix lengths.
inline BossFiles write_boss_files(const std::string& prefix, const std::string& out_prefix,
                                  uint32_t k, bool with_colors) {
    uint64_t n = file_size(prefix + ".bwt");
    std::vector<uint8_t> shortrow;
    bool have_mask = std::filesystem::exists(prefix + ".shortrow");
    std::vector<uint32_t> slen;
    if (!have_mask) {
        uint64_t m = 0;
        ByteReader r(prefix + ".bwt");
        for (uint64_t i = 0; i < n; ++i)
            if (r.get_or_throw() == kMarker) ++m;
        slen = derive_suffix_lengths(prefix + ".bwt", m);
    }

    ByteReader bwt(prefix + ".bwt");
    U32Reader lcp(prefix + ".lcp");
    lcp.next_or_throw(); // rank 0
    U32Reader da(prefix + ".da");
    BitFileReader mask_in(have_mask ? prefix + ".shortrow" : prefix + ".bwt");
    uint64_t si = 0;

    oracle::BossGraph g = build_boss(
        n, k, [&] { return bwt.get_or_throw(); }, [&] { return lcp.next_or_throw(); },
        [&] { return have_mask ? mask_in.next_or_throw() : slen[si++] <= k; },
        [&] { return da.next_or_throw(); }, with_colors);

    BossFiles out;
    out.nodes = g.num_nodes;
    out.edges = g.w.size();
    out.w_path = out_prefix + ".boss.w";
    out.last_path = out_prefix + ".boss.last";
    out.wm_path = out_prefix + ".boss.wm";
    out.meta_path = out_prefix + ".boss.meta";
    write_all(out.w_path, g.w.data(), g.w.size());
    {
        BitFileWriter last(out.last_path), wm(out.wm_path);
        for (size_t i = 0; i < g.w.size(); ++i) {
            last.put(g.last[i]);
            wm.put(g.wminus[i]);
        }
        last.close();
        wm.close();
    }
    {
        ByteWriter meta(out.meta_path);
        std::string text = "k=" + std::to_string(k) + "\nnodes=" + std::to_string(out.nodes) +
                           "\nedges=" + std::to_string(out.edges) + "\n";
        meta.write(text.data(), text.size());
        meta.close();
    }
    if (with_colors) {
        out.colors_path = out_prefix + ".boss.colors";
        ByteWriter w(out.colors_path);
        for (auto [e, d] : g.colors) {
            w.put_u64(e);
            w.put_u32(d);
        }
        w.close();
    }
    return out;
}

} // namespace bwtk
