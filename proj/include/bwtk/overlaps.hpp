#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bwtk/common.hpp"
#include "bwtk/io_util.hpp"
#include "bwtk/oracle.hpp"
#include "bwtk/pipeline.hpp"

namespace bwtk {

struct OverlapParams {
    uint32_t tau = 0;
    bool include_self = false;
    bool containment = false;
};

struct OverlapStats {
    uint64_t pushes = 0;
    uint64_t evictions = 0;
    uint64_t reported = 0;
};

// One pass over the aligned bwt/lcp/da/xlcp streams. Per-document stacks hold
// the lengths of document suffixes that still match a prefix of the row being
// scanned; top lists group documents by stack-top value so a report costs
// O(1) per record. At an end-marker row every stack top is the longest live
// match against that document's prefix.
//
// Entries whose value equals the whole destination are containment overlaps.
// Default mode replaces them with the entry below (the longest proper
// overlap). Containment mode reports them from runs of equal-content rows
// instead: rows with the same slen joined by full-length lcp values carry
// identical content, and the sources of a whole-document match sit exactly in
// the run around its marker row (before it as live stack tops, after it as
// rows not yet scanned), so one cross product at run close covers both sides.
//
// next_lcp is called once per rank starting at rank 1; next_slen only in
// containment mode; doc_len only in default mode.
template <class BwtIn, class LcpIn, class DaIn, class XIn, class SlenIn, class Sink>
OverlapStats scan_overlaps(uint64_t n, uint64_t m, BwtIn&& next_bwt, LcpIn&& next_lcp,
                           DaIn&& next_da, XIn&& next_xlcp, SlenIn&& next_slen,
                           const std::vector<uint64_t>& doc_len, const OverlapParams& prm,
                           Sink&& sink) {
    OverlapStats st;
    std::vector<std::vector<uint32_t>> stacks(m);
    std::vector<std::vector<uint32_t>> top;
    std::vector<uint32_t> top_pos(m, 0);
    std::vector<int64_t> values; // live stack values, ascending

    auto top_add = [&](uint32_t k, uint32_t v) {
        if (top.size() <= v) top.resize(v + 1);
        top_pos[k] = uint32_t(top[v].size());
        top[v].push_back(k);
    };
    auto top_remove = [&](uint32_t k, uint32_t v) {
        auto& list = top[v];
        uint32_t pos = top_pos[k];
        list[pos] = list.back();
        top_pos[list[pos]] = pos;
        list.pop_back();
    };
    auto report = [&](uint32_t src, uint32_t dst, uint32_t len) {
        if (src == dst && !prm.include_self) return;
        sink(oracle::OverlapRec{src, dst, len});
        ++st.reported;
    };

    struct RunRow {
        uint32_t doc;
        bool is_dst;
    };
    std::vector<RunRow> run;
    uint64_t run_len = 0;
    // proper overlaps seen at marker rows inside the current run; a source
    // that turns out to sit in the run is superseded by its containment
    std::vector<oracle::OverlapRec> run_pending;
    auto close_run = [&] {
        if (run.size() >= 2 && run_len > prm.tau) {
            for (size_t a = 0; a < run.size(); ++a) {
                if (!run[a].is_dst) continue;
                for (size_t b = 0; b < run.size(); ++b)
                    if (b != a) report(run[b].doc, run[a].doc, uint32_t(run_len));
            }
        }
        for (const auto& r : run_pending) {
            bool contained = false;
            for (const auto& row : run) contained |= row.doc == r.src;
            if (!contained) report(r.src, r.dst, r.length);
        }
        run_pending.clear();
        run.clear();
    };

    int64_t lcp_i = 0; // lcp between ranks i-1 and i
    for (uint64_t i = 0; i < n; ++i) {
        uint8_t b = next_bwt();
        uint32_t d = next_da();
        bool x = next_xlcp();
        uint64_t s = prm.containment ? next_slen() : 0;
        int64_t cut = i + 1 < n ? int64_t(next_lcp()) : -1;

        if (prm.containment) {
            if (!run.empty() && lcp_i == int64_t(run_len) && s == run_len + 1) {
                run.push_back({d, b == kMarker});
            } else {
                close_run();
                run_len = s - 1;
                run.push_back({d, b == kMarker});
            }
        }

        if (b == kMarker) {
            uint64_t whole = prm.containment ? s - 1 : doc_len[d];
            // a document always covers itself; the run pairs distinct rows only
            if (prm.containment && prm.include_self && whole > prm.tau)
                report(d, d, uint32_t(whole));
            for (size_t vi = values.size(); vi-- > 0;) {
                uint32_t v = uint32_t(values[vi]);
                if (v >= top.size()) continue;
                if (prm.containment && uint64_t(v) == whole) continue; // run handles these
                for (uint32_t k : top[v]) {
                    if (prm.containment && k == d) continue; // superseded by self containment
                    if (!prm.containment && uint64_t(v) == whole) {
                        const auto& sk = stacks[k];
                        if (sk.size() >= 2) report(k, d, sk[sk.size() - 2]);
                    } else if (prm.containment) {
                        run_pending.push_back({k, d, uint32_t(v)});
                    } else {
                        report(k, d, v);
                    }
                }
            }
        }

        while (!values.empty() && values.back() > cut) {
            uint32_t v = uint32_t(values.back());
            values.pop_back();
            if (v < top.size()) {
                for (uint32_t k : top[v]) {
                    stacks[k].pop_back();
                    ++st.evictions;
                    if (!stacks[k].empty()) top_add(k, stacks[k].back());
                }
                top[v].clear();
            }
        }

        if (x && cut > int64_t(prm.tau)) {
            if (!stacks[d].empty()) top_remove(d, stacks[d].back());
            stacks[d].push_back(uint32_t(cut));
            top_add(d, uint32_t(cut));
            if (values.empty() || values.back() < cut) values.push_back(cut);
            ++st.pushes;
        }

        lcp_i = cut;
    }
    if (prm.containment) close_run();
    return st;
}

inline std::vector<oracle::OverlapRec>
find_overlaps(const std::vector<uint8_t>& bwt, const std::vector<int32_t>& lcp,
              const std::vector<uint32_t>& da, const std::vector<uint8_t>& xlcp,
              const std::vector<uint32_t>& slen, uint64_t num_docs, const OverlapParams& prm) {
    std::vector<uint64_t> doc_len(num_docs, 0);
    for (uint32_t d : da) ++doc_len[d];
    for (auto& l : doc_len) --l;
    std::vector<oracle::OverlapRec> out;
    uint64_t bi = 0, li = 1, di = 0, xi = 0, si = 0;
    scan_overlaps(
        bwt.size(), num_docs, [&] { return bwt[bi++]; }, [&] { return uint32_t(lcp[li++]); },
        [&] { return da[di++]; }, [&] { return xlcp[xi++] != 0; }, [&] { return slen[si++]; },
        doc_len, prm, [&](const oracle::OverlapRec& r) { out.push_back(r); });
    std::sort(out.begin(), out.end());
    return out;
}

// Reads <prefix>.bwt/.lcp/.da/.xlcp; containment mode derives suffix lengths
// from the bwt and materializes them as <prefix>.slen. Records go to out_path
// as u32 src, u32 dst, u32 length.
inline OverlapStats find_overlaps_files(const std::string& prefix, const std::string& out_path,
                                        const OverlapParams& prm) {
    uint64_t n = file_size(prefix + ".bwt");
    uint64_t m = 0;
    {
        ByteReader r(prefix + ".bwt");
        for (uint64_t i = 0; i < n; ++i)
            if (r.get_or_throw() == kMarker) ++m;
    }
    std::vector<uint64_t> doc_len;
    std::vector<uint32_t> slen;
    if (prm.containment) {
        slen = derive_suffix_lengths(prefix + ".bwt", m);
        write_slen(prefix + ".slen", slen);
    } else {
        doc_len.assign(m, 0);
        U32Reader da(prefix + ".da");
        for (uint64_t i = 0; i < n; ++i) ++doc_len[da.next_or_throw()];
        for (auto& l : doc_len) --l;
    }

    ByteReader bwt(prefix + ".bwt");
    U32Reader lcp(prefix + ".lcp");
    U32Reader da(prefix + ".da");
    BitFileReader xlcp(prefix + ".xlcp");
    lcp.next_or_throw(); // rank 0

    std::vector<oracle::OverlapRec> out;
    uint64_t si = 0;
    OverlapStats st = scan_overlaps(
        n, m, [&] { return bwt.get_or_throw(); }, [&] { return lcp.next_or_throw(); },
        [&] { return da.next_or_throw(); }, [&] { return xlcp.next_or_throw(); },
        [&] { return slen[si++]; }, doc_len, prm,
        [&](const oracle::OverlapRec& r) { out.push_back(r); });
    std::sort(out.begin(), out.end());
    ByteWriter w(out_path);
    for (const auto& r : out) {
        w.put_u32(r.src);
        w.put_u32(r.dst);
        w.put_u32(r.length);
    }
    w.close();
    return st;
}

} // namespace bwtk
