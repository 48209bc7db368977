#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "bwtk/common.hpp"
#include "bwtk/io_util.hpp"

namespace bwtk {

struct PairFileInfo {
    std::string path;
    uint32_t value = 0; // lcp value carried by every record in the file
};

inline std::vector<PairFileInfo> list_pair_files(const std::string& pairs_prefix) {
    namespace fs = std::filesystem;
    fs::path p(pairs_prefix);
    fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
    std::string stem = p.filename().string() + ".pairs.";
    std::vector<PairFileInfo> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::string name = e.path().filename().string();
        if (name.rfind(stem, 0) != 0) continue;
        out.push_back({e.path().string(), uint32_t(std::stoul(name.substr(stem.size())))});
    }
    std::sort(out.begin(), out.end(),
              [](const PairFileInfo& a, const PairFileInfo& b) { return a.value < b.value; });
    return out;
}

struct PairFileCheck {
    uint64_t records = 0;
    uint64_t maxlcp = 0;
    double avelcp = 0.0;
};

// Structural check: per-file positions strictly increase and the union of all
// files covers each rank 1..n-1 exactly once.
inline PairFileCheck validate_pair_files(const std::string& pairs_prefix, uint64_t n) {
    auto files = list_pair_files(pairs_prefix);
    std::vector<uint8_t> seen((n + 7) / 8, 0);
    PairFileCheck chk;
    double sum = 0;
    for (const auto& f : files) {
        ByteReader r(f.path, 1 << 18);
        uint8_t b[8];
        uint64_t prev = 0;
        bool first = true;
        while (r.read_exact(b, 8)) {
            uint64_t pos = get_u64(b) & ~(uint64_t(1) << 63);
            if (pos == 0 || pos >= n) throw VerifyError("pair position out of range");
            if (!first && pos <= prev) throw VerifyError("pair positions not increasing");
            first = false;
            prev = pos;
            if (BitSpan{seen.data()}.get(pos)) throw VerifyError("rank covered twice");
            BitSpan{seen.data()}.set(pos);
            ++chk.records;
            chk.maxlcp = std::max<uint64_t>(chk.maxlcp, f.value);
            sum += f.value;
        }
    }
    if (chk.records != n - 1) throw VerifyError("pair files do not cover every rank once");
    chk.avelcp = n > 1 ? sum / double(n - 1) : 0.0;
    return chk;
}

namespace lcp_detail {

struct Cursor {
    std::unique_ptr<ByteReader> r;
    bool carries_value = false; // intermediate runs store an explicit value
    uint32_t fixed_value = 0;
    uint64_t prev_pos = 0;
    bool first = true;

    bool next(uint64_t& pos, bool& flag, uint32_t& value) {
        uint8_t b[8];
        if (!r->read_exact(b, 8)) return false;
        uint64_t raw = get_u64(b);
        pos = raw & ~(uint64_t(1) << 63);
        flag = raw >> 63;
        if (carries_value) {
            uint8_t v[4];
            if (!r->read_exact(v, 4)) throw IoError("truncated run file");
            value = get_u32(v);
        } else {
            value = fixed_value;
        }
        if (!first && pos <= prev_pos) throw VerifyError("pair positions not increasing");
        first = false;
        prev_pos = pos;
        return true;
    }
};

struct HeapItem {
    uint64_t pos;
    uint32_t src;
    bool operator>(const HeapItem& o) const { return pos > o.pos; }
};

} // namespace lcp_detail

struct LcpMergeResult {
    std::string lcp_path;
    std::string xlcp_path; // empty under a cap
    uint64_t rounds = 0;
    uint64_t maxlcp = 0;
    double avelcp = 0.0;
};

// K-way external merge of the per-value pair files into the final lcp array
// (and xlcp bits unless capped). Intermediate rounds write combined runs.
inline LcpMergeResult merge_pair_files(const std::string& pairs_prefix, uint64_t n,
                                       const std::string& out_prefix, uint32_t fan_in = 256,
                                       bool write_xlcp = true) {
    if (fan_in < 2) throw Error("lcp merge fan-in must be at least 2");
    struct Src {
        std::string path;
        bool carries_value;
        uint32_t value;
        bool temp;
    };
    std::vector<Src> srcs;
    for (const auto& f : list_pair_files(pairs_prefix))
        srcs.push_back({f.path, false, f.value, false});
    if (srcs.empty()) throw Error("no pair files under " + pairs_prefix);

    LcpMergeResult res;
    res.lcp_path = out_prefix + ".lcp";
    uint64_t tmp_id = 0;

    auto open_group = [&](size_t lo, size_t hi) {
        std::vector<lcp_detail::Cursor> cur(hi - lo);
        for (size_t j = lo; j < hi; ++j) {
            cur[j - lo].r = std::make_unique<ByteReader>(srcs[j].path, 1 << 18);
            cur[j - lo].carries_value = srcs[j].carries_value;
            cur[j - lo].fixed_value = srcs[j].value;
        }
        return cur;
    };

    while (srcs.size() > fan_in) {
        ++res.rounds;
        std::vector<Src> next;
        for (size_t lo = 0; lo < srcs.size(); lo += fan_in) {
            size_t hi = std::min(srcs.size(), lo + fan_in);
            auto cur = open_group(lo, hi);
            std::string path = out_prefix + ".runs." + std::to_string(tmp_id++);
            ByteWriter w(path, false, 1 << 18);
            std::priority_queue<lcp_detail::HeapItem, std::vector<lcp_detail::HeapItem>,
                                std::greater<>>
                heap;
            std::vector<std::pair<bool, uint32_t>> pend(cur.size());
            for (uint32_t s = 0; s < cur.size(); ++s) {
                uint64_t pos;
                bool flag;
                uint32_t val;
                if (cur[s].next(pos, flag, val)) {
                    pend[s] = {flag, val};
                    heap.push({pos, s});
                }
            }
            while (!heap.empty()) {
                auto top = heap.top();
                heap.pop();
                w.put_u64(top.pos | (pend[top.src].first ? uint64_t(1) << 63 : 0));
                w.put_u32(pend[top.src].second);
                uint64_t pos;
                bool flag;
                uint32_t val;
                if (cur[top.src].next(pos, flag, val)) {
                    pend[top.src] = {flag, val};
                    heap.push({pos, top.src});
                }
            }
            w.close();
            next.push_back({path, true, 0, true});
        }
        for (size_t j = 0; j < srcs.size(); ++j)
            if (srcs[j].temp) std::filesystem::remove(srcs[j].path);
        srcs = std::move(next);
    }

    ++res.rounds;
    auto cur = open_group(0, srcs.size());
    ByteWriter lw(res.lcp_path, false, 1 << 20);
    std::unique_ptr<BitFileWriter> xw;
    if (write_xlcp) {
        res.xlcp_path = out_prefix + ".xlcp";
        xw = std::make_unique<BitFileWriter>(res.xlcp_path);
    }
    std::priority_queue<lcp_detail::HeapItem, std::vector<lcp_detail::HeapItem>, std::greater<>>
        heap;
    std::vector<std::pair<bool, uint32_t>> pend(cur.size());
    for (uint32_t s = 0; s < cur.size(); ++s) {
        uint64_t pos;
        bool flag;
        uint32_t val;
        if (cur[s].next(pos, flag, val)) {
            pend[s] = {flag, val};
            heap.push({pos, s});
        }
    }
    lw.put_u32(0); // rank 0 precedes nothing
    double sum = 0;
    for (uint64_t expect = 1; expect < n; ++expect) {
        if (heap.empty()) throw VerifyError("pair files missing rank " + std::to_string(expect));
        auto top = heap.top();
        heap.pop();
        if (top.pos != expect)
            throw VerifyError(top.pos < expect ? "rank covered twice" : "rank not covered");
        lw.put_u32(pend[top.src].second);
        res.maxlcp = std::max<uint64_t>(res.maxlcp, pend[top.src].second);
        sum += pend[top.src].second;
        if (xw) xw->put(pend[top.src].first);
        uint64_t pos;
        bool flag;
        uint32_t val;
        if (cur[top.src].next(pos, flag, val)) {
            pend[top.src] = {flag, val};
            heap.push({pos, top.src});
        }
    }
    if (!heap.empty()) throw VerifyError("pair records beyond last rank");
    if (xw) {
        xw->put(false); // rank n-1 never prefixes a successor
        xw->close();
    }
    lw.close();
    for (auto& s : srcs)
        if (s.temp) std::filesystem::remove(s.path);
    res.avelcp = n > 1 ? sum / double(n - 1) : 0.0;
    return res;
}

// Capped variant: records carry values clamped at the cap already; no xlcp.
inline LcpMergeResult cap_aware_merge(const std::string& pairs_prefix, uint64_t n,
                                      const std::string& out_prefix, uint32_t fan_in = 256) {
    return merge_pair_files(pairs_prefix, n, out_prefix, fan_in, false);
}

} // namespace bwtk
