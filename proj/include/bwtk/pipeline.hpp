#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bwtk/common.hpp"
#include "bwtk/gap_merge.hpp"
#include "bwtk/io_util.hpp"
#include "bwtk/lcp_merge.hpp"
#include "bwtk/oracle.hpp"
#include "bwtk/seqio.hpp"
#include "bwtk/suffix_core.hpp"

namespace bwtk {

struct IndexConfig {
    std::string out_prefix;
    uint64_t mem_budget = uint64_t(256) << 20; // phase 1 budget, 9 bytes per symbol
    bool semi_external = false;
    bool skipping = true;
    uint64_t skip_threshold = 0;
    uint32_t fan_in = 128;
    uint32_t lcp_fan_in = 256;
    bool want_lcp = true;
    bool want_xlcp = true;
    uint32_t prefix_depth = 0; // >0 builds depth-capped lcp plus the short-row mask
    bool keep_tmp = false;
    std::string tmp_dir; // defaults to <out_prefix>.tmp
};

struct IndexResult {
    std::string bwt_path, da_path, lcp_path, xlcp_path, shortrow_path, stats_path;
    uint64_t n = 0, m = 0;
    uint32_t sigma = 0;
    uint32_t subcollections = 0;
    uint32_t tree_rounds = 0;
    MergeResult final_merge;
    PairFileCheck pair_check;
    LcpMergeResult lcp_merge;
    uint64_t bytes_read = 0, bytes_written = 0;
};

inline IndexResult run_index(const Collection& coll, const IndexConfig& cfg) {
    namespace fs = std::filesystem;
    IndexResult res;
    res.n = coll.total_size();
    res.m = coll.num_docs();

    uint32_t fan_in = cfg.fan_in;
    if (cfg.semi_external) fan_in = std::min<uint32_t>(fan_in, 8);
    if (fan_in < 2) throw Error("fan-in must be at least 2");
    if (fan_in > 128) throw Error("fan-in limited to 128");

    std::string tmp = cfg.tmp_dir.empty() ? cfg.out_prefix + ".tmp" : cfg.tmp_dir;
    fs::create_directories(tmp);

    AlphabetMap alpha = build_alphabet(coll);
    res.sigma = alpha.sigma;

    auto ranges = plan_subcollections(coll, cfg.mem_budget);
    res.subcollections = uint32_t(ranges.size());

    std::vector<PartialArtifact> parts;
    for (size_t i = 0; i < ranges.size(); ++i) {
        auto order = build_suffix_order(coll, ranges[i]);
        auto bwt = derive_bwt(coll, ranges[i], order);
        auto da = derive_da(coll, ranges[i], order);
        parts.push_back(write_partial(tmp + "/part" + std::to_string(i), bwt, da));
        res.bytes_written += parts.back().size * 5;
    }

    MergeConfig mc;
    mc.semi_external = cfg.semi_external;
    mc.skipping = cfg.skipping;
    mc.skip_threshold = cfg.skip_threshold;

    // Reduce with full-depth internal merges until one final merge remains.
    uint32_t round = 0;
    while (parts.size() > fan_in) {
        ++round;
        std::vector<PartialArtifact> next;
        for (size_t lo = 0; lo < parts.size(); lo += fan_in) {
            size_t hi = std::min(parts.size(), lo + fan_in);
            std::vector<PartialArtifact> group(parts.begin() + lo, parts.begin() + hi);
            if (group.size() == 1) {
                next.push_back(group[0]);
                continue;
            }
            MergeConfig c = mc;
            c.prefix = tmp + "/m" + std::to_string(round) + "_" + std::to_string(lo / fan_in);
            c.track_xlcp = false;
            c.emit_pairs = false;
            MergeResult r = run_merge(group, alpha, c);
            res.bytes_read += r.bytes_read;
            res.bytes_written += r.bytes_written;
            PartialArtifact merged;
            merged.bwt_path = r.bwt_path;
            merged.da_path = r.da_path;
            merged.size = r.n;
            merged.markers = r.markers;
            next.push_back(merged);
        }
        parts = std::move(next);
    }
    res.tree_rounds = round + 1;

    MergeConfig fc = mc;
    fc.prefix = tmp + "/final";
    fc.track_xlcp = cfg.want_xlcp;
    fc.prefix_depth = cfg.prefix_depth;
    fc.emit_pairs = cfg.want_lcp || cfg.prefix_depth > 0;
    res.final_merge = run_merge(parts, alpha, fc);
    res.bytes_read += res.final_merge.bytes_read;
    res.bytes_written += res.final_merge.bytes_written;

    res.bwt_path = cfg.out_prefix + ".bwt";
    res.da_path = cfg.out_prefix + ".da";
    fs::rename(res.final_merge.bwt_path, res.bwt_path);
    fs::rename(res.final_merge.da_path, res.da_path);
    if (!res.final_merge.shortrow_path.empty()) {
        res.shortrow_path = cfg.out_prefix + ".shortrow";
        fs::rename(res.final_merge.shortrow_path, res.shortrow_path);
    }

    if (fc.emit_pairs) {
        res.pair_check = validate_pair_files(fc.prefix, res.n);
        if (cfg.prefix_depth > 0) {
            res.lcp_merge = cap_aware_merge(fc.prefix, res.n, cfg.out_prefix, cfg.lcp_fan_in);
        } else {
            res.lcp_merge =
                merge_pair_files(fc.prefix, res.n, cfg.out_prefix, cfg.lcp_fan_in, cfg.want_xlcp);
        }
        res.lcp_path = res.lcp_merge.lcp_path;
        res.xlcp_path = res.lcp_merge.xlcp_path;
    }

    res.stats_path = cfg.out_prefix + ".stats";
    {
        ByteWriter w(res.stats_path);
        auto kv = [&](const std::string& key, const std::string& val) {
            std::string line = key + "=" + val + "\n";
            w.write(line.data(), line.size());
        };
        kv("n", std::to_string(res.n));
        kv("docs", std::to_string(res.m));
        kv("sigma", std::to_string(res.sigma));
        kv("subcollections", std::to_string(res.subcollections));
        kv("tree_rounds", std::to_string(res.tree_rounds));
        kv("iterations", std::to_string(res.final_merge.iterations));
        kv("maxlcp", std::to_string(res.lcp_merge.maxlcp));
        kv("avelcp", std::to_string(res.lcp_merge.avelcp));
        kv("bytes_read", std::to_string(res.bytes_read));
        kv("bytes_written", std::to_string(res.bytes_written));
        uint64_t skipped = 0, consumed = 0;
        for (const auto& s : res.final_merge.stats) {
            skipped += s.skipped;
            consumed += s.ranges_consumed;
        }
        kv("skipped_positions", std::to_string(skipped));
        kv("ranges_consumed", std::to_string(consumed));
        w.close();
    }

    if (!cfg.keep_tmp) {
        std::error_code ec;
        fs::remove_all(tmp, ec);
    }
    return res;
}

// Recomputes everything naively and compares byte-for-byte.
inline void verify_outputs(const Collection& coll, const std::string& prefix, bool check_lcp,
                           bool check_xlcp) {
    oracle::Arrays a = oracle::naive_arrays(coll);
    uint64_t n = a.bwt.size();

    auto bwt = read_all(prefix + ".bwt");
    if (bwt != a.bwt) throw VerifyError("bwt mismatch");

    {
        U32Reader da(prefix + ".da");
        for (uint64_t i = 0; i < n; ++i)
            if (da.next_or_throw() != a.da[i]) throw VerifyError("da mismatch");
    }
    if (check_lcp) {
        U32Reader lcp(prefix + ".lcp");
        for (uint64_t i = 0; i < n; ++i) {
            uint32_t want = i == 0 ? 0 : uint32_t(a.lcp[i]);
            if (lcp.next_or_throw() != want) throw VerifyError("lcp mismatch");
        }
    }
    if (check_xlcp) {
        BitFileReader xr(prefix + ".xlcp");
        for (uint64_t i = 0; i < n; ++i)
            if (xr.next_or_throw() != bool(a.xlcp[i])) throw VerifyError("xlcp mismatch");
    }
}

// Suffix lengths per rank, recovered by walking each document backwards
// through the merged index.
inline std::vector<uint32_t> derive_suffix_lengths(const std::string& bwt_path,
                                                   uint64_t num_docs) {
    std::vector<uint8_t> bwt = read_all(bwt_path);
    uint64_t n = bwt.size();
    std::vector<uint64_t> count(256, 0);
    for (uint8_t b : bwt) ++count[b];
    std::vector<uint64_t> F(257, 0);
    for (int c = 0; c < 256; ++c) F[c + 1] = F[c] + count[c];
    std::vector<uint64_t> lf(n);
    std::vector<uint64_t> occ(256, 0);
    for (uint64_t i = 0; i < n; ++i) {
        lf[i] = F[bwt[i]] + occ[bwt[i]];
        ++occ[bwt[i]];
    }
    std::vector<uint32_t> slen(n, 0);
    for (uint64_t d = 0; d < num_docs; ++d) {
        uint64_t r = d; // marker suffixes occupy the first ranks in document order
        uint32_t len = 1;
        for (;;) {
            slen[r] = len;
            if (bwt[r] == kMarker) break;
            r = lf[r];
            ++len;
        }
    }
    return slen;
}

inline void write_slen(const std::string& path, const std::vector<uint32_t>& slen) {
    ByteWriter w(path);
    for (uint32_t v : slen) w.put_u32(v);
    w.close();
}

} // namespace bwtk
