#pragma once

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bwtk/common.hpp"
#include "bwtk/io_util.hpp"
#include "bwtk/oracle.hpp"

namespace bwtk {

enum class RepeatType { Type1, Type2 };

// One left-open lcp interval. `chars` collects the symbols preceding the
// suffixes seen so far (all markers share byte 0x00, so they collapse for
// free). `pure` stays true while every child of the interval is a single
// suffix; a composite child means some real follower occurs twice.
namespace repeat_detail {

struct Entry {
    int64_t v = 0;
    uint64_t lb = 0;
    std::bitset<256> chars;
    std::set<uint32_t> docs;
    bool pure = true;
};

} // namespace repeat_detail

// Streams ranks 0..n-1 once. next_bwt/next_lcp/next_da are called exactly n
// times each, in rank order; lcp(0) is ignored. sink receives each matching
// interval as RepeatRec{length, lo, hi, distinct_docs}.
template <class BwtIn, class LcpIn, class DaIn, class Sink>
void scan_repeats(uint64_t n, BwtIn&& next_bwt, LcpIn&& next_lcp, DaIn&& next_da,
                  const oracle::RepeatParams& params, RepeatType type, Sink&& sink) {
    using repeat_detail::Entry;
    if (n == 0) return;
    std::vector<Entry> stack;
    uint8_t prev_char = next_bwt();
    uint32_t prev_doc = next_da();
    (void)next_lcp();

    for (uint64_t i = 1; i <= n; ++i) {
        int64_t cut = i < n ? int64_t(next_lcp()) : -1;

        std::bitset<256> pending;
        pending.set(prev_char);
        std::set<uint32_t> pending_docs{prev_doc};
        uint64_t lb = i - 1;
        bool popped = false;

        while (!stack.empty() && stack.back().v > cut) {
            Entry e = std::move(stack.back());
            stack.pop_back();
            e.chars |= pending;
            if (e.docs.size() < pending_docs.size()) e.docs.swap(pending_docs);
            e.docs.insert(pending_docs.begin(), pending_docs.end());
            if (popped) e.pure = false;

            uint64_t occ = i - e.lb;
            if (e.v >= int64_t(params.min_length) && e.v > 0 && occ >= params.min_occ) {
                size_t distinct = e.chars.count();
                bool left_ok = type == RepeatType::Type1 ? distinct >= 2 : distinct == occ;
                bool right_ok = type == RepeatType::Type1 || e.pure;
                if (left_ok && right_ok)
                    sink(oracle::RepeatRec{uint32_t(e.v), e.lb, i - 1, uint32_t(e.docs.size())});
            }

            pending = e.chars;
            pending_docs = std::move(e.docs);
            lb = e.lb;
            popped = true;
        }

        if (cut >= 0) {
            if (!stack.empty() && stack.back().v == cut) {
                Entry& top = stack.back();
                top.chars |= pending;
                if (top.docs.size() < pending_docs.size()) top.docs.swap(pending_docs);
                top.docs.insert(pending_docs.begin(), pending_docs.end());
                if (popped) top.pure = false;
            } else {
                Entry e;
                e.v = cut;
                e.lb = lb;
                e.chars = pending;
                e.docs = std::move(pending_docs);
                e.pure = !popped;
                stack.push_back(std::move(e));
            }
        }

        if (i < n) {
            prev_char = next_bwt();
            prev_doc = next_da();
        }
    }
}

inline std::vector<oracle::RepeatRec> find_repeats(const std::vector<uint8_t>& bwt,
                                                   const std::vector<int32_t>& lcp,
                                                   const std::vector<uint32_t>& da,
                                                   const oracle::RepeatParams& params,
                                                   RepeatType type) {
    std::vector<oracle::RepeatRec> out;
    uint64_t n = bwt.size();
    uint64_t bi = 0, li = 0, di = 0;
    scan_repeats(
        n, [&] { return bwt[bi++]; }, [&] { return li == 0 ? (++li, int64_t(0)) : lcp[li++]; },
        [&] { return da[di++]; }, params, type, [&](const oracle::RepeatRec& r) { out.push_back(r); });
    std::sort(out.begin(), out.end());
    return out;
}

// File based variant: reads <prefix>.bwt, <prefix>.lcp, <prefix>.da and
// writes matching records to out_path (u32 len, u64 lo, u64 hi, u32 docs).
inline uint64_t find_repeats_files(const std::string& prefix, const std::string& out_path,
                                   const oracle::RepeatParams& params, RepeatType type) {
    uint64_t n = file_size(prefix + ".bwt");
    ByteReader bwt(prefix + ".bwt");
    U32Reader lcp(prefix + ".lcp");
    U32Reader da(prefix + ".da");
    std::vector<oracle::RepeatRec> out;
    scan_repeats(
        n, [&] { return bwt.get_or_throw(); }, [&] { return int64_t(lcp.next_or_throw()); },
        [&] { return da.next_or_throw(); }, params, type,
        [&](const oracle::RepeatRec& r) { out.push_back(r); });
    std::sort(out.begin(), out.end());
    ByteWriter w(out_path);
    for (const auto& r : out) {
        w.put_u32(r.length);
        w.put_u64(r.lo);
        w.put_u64(r.hi);
        w.put_u32(r.distinct_docs);
    }
    w.close();
    return out.size();
}

} // namespace bwtk
