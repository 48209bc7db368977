#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

#include "bwtk/common.hpp"
#include "bwtk/io_util.hpp"
#include "bwtk/seqio.hpp"
#include "bwtk/suffix_core.hpp"

namespace bwtk {

// Rebuilds the shared alphabet from partial bwt files, for merges that start
// from artifacts on disk rather than a loaded collection.
inline AlphabetMap alphabet_from_bwts(const std::vector<PartialArtifact>& parts) {
    std::array<bool, 256> seen{};
    for (const auto& p : parts) {
        ByteReader r(p.bwt_path);
        for (uint64_t i = 0; i < p.size; ++i) {
            uint8_t b = r.get_or_throw();
            if (b != kMarker) seen[b] = true;
        }
    }
    AlphabetMap a;
    a.code_of.fill(-1);
    a.code_of[kMarker] = 0;
    for (int b = 1; b < 256; ++b) {
        if (seen[b]) {
            a.byte_of.push_back(uint8_t(b));
            a.code_of[b] = int16_t(a.byte_of.size());
        }
    }
    a.sigma = uint32_t(a.byte_of.size());
    return a;
}

struct MergeConfig {
    std::string prefix;            // working-file prefix, caller owns the directory
    bool semi_external = false;    // per-position state in RAM (at most 8 inputs)
    bool skipping = true;          // skip finalized ranges
    uint64_t skip_threshold = 0;   // 0 picks max(256, inputs + sigma)
    bool track_xlcp = true;
    uint32_t prefix_depth = 0;     // 0 = full depth; >0 stops after depth+2 iterations
    bool emit_pairs = true;        // tree-internal rounds only need the merged bwt/da
};

struct IterationStats {
    uint32_t iteration = 0;
    uint64_t emitted = 0;           // pairs emitted this iteration
    uint64_t scanned = 0;           // positions read
    uint64_t skipped = 0;           // positions covered by consumed ranges
    uint64_t ranges_consumed = 0;
    uint64_t ranges_recorded = 0;
    uint64_t bytes_read = 0;
    uint64_t bytes_written = 0;
    bool done = false;
};

struct MergeResult {
    std::string bwt_path;
    std::string da_path;
    std::string pairs_prefix;   // records live in <pairs_prefix>.pairs.<value>
    std::string shortrow_path;  // set when prefix_depth > 0
    uint64_t n = 0;
    uint64_t markers = 0;
    uint32_t iterations = 0;
    uint64_t maxlcp = 0;        // max emitted value; meaningless under a prefix cap
    bool capped = false;
    std::vector<IterationStats> stats;
    uint64_t bytes_read = 0;
    uint64_t bytes_written = 0;
};

struct Buckets {
    uint64_t n = 0;
    std::vector<uint64_t> F;          // F[c] = first rank of symbol-code c
    std::vector<uint64_t> sub0_base;  // first marker rank owned by each input
    std::vector<uint64_t> input_size;
    std::vector<uint64_t> input_markers;
};

inline Buckets compute_buckets(const std::vector<PartialArtifact>& inputs,
                               const AlphabetMap& alpha) {
    Buckets b;
    std::vector<uint64_t> counts(alpha.sigma + 1, 0);
    for (const auto& in : inputs) {
        ByteReader r(in.bwt_path, 1 << 20);
        uint64_t sz = 0, mk = 0;
        for (int c; (c = r.get()) >= 0; ++sz) {
            int16_t code = alpha.code_of[c];
            if (code < 0) throw Error("input byte outside alphabet in " + in.bwt_path);
            ++counts[code];
            if (code == 0) ++mk;
        }
        b.input_size.push_back(sz);
        b.input_markers.push_back(mk);
        b.n += sz;
    }
    b.F.resize(alpha.sigma + 2, 0);
    for (uint32_t c = 0; c <= alpha.sigma; ++c) b.F[c + 1] = b.F[c] + counts[c];
    uint64_t acc = 0;
    for (uint64_t mk : b.input_markers) {
        b.sub0_base.push_back(acc);
        acc += mk;
    }
    return b;
}

// Fan-in groups per round until a single output remains.
inline std::vector<std::vector<uint32_t>> plan_merge_tree(uint32_t num_inputs, uint32_t fan_in) {
    if (fan_in < 2) throw Error("fan-in must be at least 2");
    std::vector<std::vector<uint32_t>> rounds;
    uint32_t cur = num_inputs;
    while (cur > 1) {
        std::vector<uint32_t> sizes;
        for (uint32_t i = 0; i < cur; i += fan_in) sizes.push_back(std::min(fan_in, cur - i));
        rounds.push_back(sizes);
        cur = uint32_t(rounds.back().size());
    }
    return rounds;
}

namespace gap_detail {

// One skip-range record: a finalized stretch of positions plus the cursor
// advances needed to jump over it. per_marker splits the symbol-0 advance by
// input so the per-input marker sub-buckets stay aligned.
struct Range {
    uint64_t start = 0, end = 0;
    std::vector<uint64_t> per_input;
    std::vector<uint64_t> per_symbol;
    std::vector<uint64_t> per_marker;
};

class RangeWriter {
public:
    void open(const std::string& path) { w_ = std::make_unique<ByteWriter>(path); }
    void put(const Range& r) {
        w_->put_u64(r.start);
        w_->put_u64(r.end);
        for (uint64_t v : r.per_input) w_->put_u64(v);
        for (uint64_t v : r.per_symbol) w_->put_u64(v);
        for (uint64_t v : r.per_marker) w_->put_u64(v);
        ++count_;
    }
    uint64_t close() {
        if (w_) w_->close();
        w_.reset();
        return count_;
    }
    uint64_t bytes() const { return w_ ? w_->bytes_written() : 0; }

private:
    std::unique_ptr<ByteWriter> w_;
    uint64_t count_ = 0;
};

class RangeReader {
public:
    RangeReader(const std::string& path, uint32_t k, uint32_t sigma) : k_(k), sigma_(sigma) {
        if (std::filesystem::exists(path)) r_ = std::make_unique<ByteReader>(path);
    }
    bool next(Range& out) {
        if (!r_) return false;
        uint8_t b[8];
        if (!r_->read_exact(b, 8)) return false;
        out.start = get_u64(b);
        auto u64 = [&] {
            uint8_t t[8];
            if (!r_->read_exact(t, 8)) throw IoError("truncated range file");
            return get_u64(t);
        };
        out.end = u64();
        out.per_input.resize(k_);
        out.per_symbol.resize(sigma_ + 1);
        out.per_marker.resize(k_);
        for (auto& v : out.per_input) v = u64();
        for (auto& v : out.per_symbol) v = u64();
        for (auto& v : out.per_marker) v = u64();
        return true;
    }
    uint64_t bytes() const { return r_ ? r_->bytes_read() : 0; }

private:
    std::unique_ptr<ByteReader> r_;
    uint32_t k_, sigma_;
};

// File-backed per-position state: two ordinal arrays with a boundary bit each,
// an emitted bitmap, and two suffix-length bitmaps.
class ExternalStore {
public:
    void init(const std::string& prefix, uint64_t n,
              const std::vector<uint64_t>& input_size, bool with_ts) {
        n_ = n;
        z_[0].open(prefix + ".z0", n);
        z_[1].open(prefix + ".z1", n);
        bx_.open(prefix + ".bx", (n + 7) / 8);
        if (with_ts) {
            ts_[0].open(prefix + ".ts0", (n + 7) / 8);
            ts_[1].open(prefix + ".ts1", (n + 7) / 8);
            std::memset(ts_[0].data(), 0, ts_[0].size());
            std::memset(ts_[1].data(), 0, ts_[1].size());
        }
        with_ts_ = with_ts;
        std::memset(bx_.data(), 0, bx_.size());
        uint64_t pos = 0;
        for (uint32_t lam = 0; lam < input_size.size(); ++lam)
            for (uint64_t j = 0; j < input_size[lam]; ++j) z_[0].data()[pos++] = uint8_t(lam);
        z_[0].data()[0] |= 0x80;
        BitSpan{bx_.data()}.set(0);
    }

    struct Entry {
        uint8_t lambda;
        bool boundary;
        bool bx;
    };
    Entry read(uint64_t i, uint32_t h) const {
        uint8_t b = z_[(h + 1) & 1].data()[i];
        return {uint8_t(b & 0x7f), bool(b >> 7), BitSpan{bx_.data()}.get(i)};
    }
    void mark_emitted(uint64_t i) { BitSpan{bx_.data()}.set(i); }
    bool emitted(uint64_t i) const { return BitSpan{bx_.data()}.get(i); }
    void write(uint64_t d, uint8_t lambda, bool bnew, uint32_t h) {
        z_[h & 1].data()[d] = uint8_t(lambda | (bnew ? 0x80 : 0));
    }
    uint8_t final_ordinal(uint64_t i, uint32_t last_h) const {
        return z_[last_h & 1].data()[i] & 0x7f;
    }
    bool ts_old(uint64_t i, uint32_t h) const {
        return BitSpan{ts_[(h + 1) & 1].data()}.get(i);
    }
    void ts_new_set(uint64_t d, uint32_t h) { BitSpan{ts_[h & 1].data()}.set(d); }
    void dump_ts(const std::string& path, uint32_t h) const {
        write_all(path, ts_[h & 1].data(), (n_ + 7) / 8);
    }

private:
    mutable MappedFile z_[2], bx_, ts_[2];
    uint64_t n_ = 0;
    bool with_ts_ = false;
};

// RAM-resident variant: one byte per position holds both ordinal fields plus a
// two-state-bit lifecycle (unset / set at odd / set at even / emitted), which
// stands in for the boundary and emitted bits without a second copy.
class SemiStore {
public:
    void init(const std::string&, uint64_t n, const std::vector<uint64_t>& input_size,
              bool with_ts) {
        if (input_size.size() > 8) throw Error("semi-external merge supports at most 8 inputs");
        state_.assign(n, 0);
        uint64_t pos = 0;
        for (uint32_t lam = 0; lam < input_size.size(); ++lam)
            for (uint64_t j = 0; j < input_size[lam]; ++j) state_[pos++] = uint8_t(lam);
        state_[0] |= uint8_t(3u << 6); // sentinel: boundary and emitted
        if (with_ts) {
            ts_[0].assign((n + 63) / 64, 0);
            ts_[1].assign((n + 63) / 64, 0);
        }
    }

    using Entry = ExternalStore::Entry;
    Entry read(uint64_t i, uint32_t h) const {
        uint8_t b = state_[i];
        uint8_t lam = (h & 1) ? (b & 7) : ((b >> 3) & 7);
        uint8_t st = b >> 6;
        uint8_t prev_parity = ((h - 1) & 1) ? 1 : 2;
        bool boundary = st == 3 || st == prev_parity;
        return {lam, boundary, st == 3};
    }
    void mark_emitted(uint64_t i) { state_[i] |= uint8_t(3u << 6); }
    bool emitted(uint64_t i) const { return (state_[i] >> 6) == 3; }
    void write(uint64_t d, uint8_t lambda, bool bnew, uint32_t h) {
        uint8_t b = state_[d];
        if (h & 1)
            b = uint8_t((b & ~(7u << 3)) | (lambda << 3));
        else
            b = uint8_t((b & ~7u) | lambda);
        if (bnew && (b >> 6) == 0) b |= uint8_t(((h & 1) ? 1u : 2u) << 6);
        state_[d] = b;
    }
    uint8_t final_ordinal(uint64_t i, uint32_t last_h) const {
        uint8_t b = state_[i];
        return (last_h & 1) ? ((b >> 3) & 7) : (b & 7);
    }
    bool ts_old(uint64_t i, uint32_t h) const {
        const auto& v = ts_[(h + 1) & 1];
        return (v[i >> 6] >> (i & 63)) & 1;
    }
    void ts_new_set(uint64_t d, uint32_t h) { ts_[h & 1][d >> 6] |= uint64_t(1) << (d & 63); }
    void dump_ts(const std::string& path, uint32_t h) const {
        const auto& v = ts_[h & 1];
        uint64_t bytes = (n_bytes_ + 7) / 8;
        std::vector<uint8_t> out(bytes, 0);
        std::memcpy(out.data(), v.data(), std::min<uint64_t>(bytes, v.size() * 8));
        write_all(path, out.data(), out.size());
    }
    void set_n(uint64_t n) { n_bytes_ = n; }

private:
    std::vector<uint8_t> state_;
    std::vector<uint64_t> ts_[2];
    uint64_t n_bytes_ = 0;
};

struct RunAcc {
    bool active = false;
    uint64_t start = 0, len = 0;
    std::vector<uint64_t> per_input, per_symbol, per_marker;
    uint8_t last_lambda = 0, last_code = 0;
    bool last_from_scan = false;

    void reset(uint32_t k, uint32_t sigma) {
        active = false;
        len = 0;
        per_input.assign(k, 0);
        per_symbol.assign(sigma + 1, 0);
        per_marker.assign(k, 0);
        last_from_scan = false;
    }
    void begin(uint64_t at, uint32_t k, uint32_t sigma) {
        reset(k, sigma);
        active = true;
        start = at;
    }
    void add_scanned(uint8_t lambda, uint8_t code) {
        ++len;
        ++per_input[lambda];
        ++per_symbol[code];
        if (code == 0) ++per_marker[lambda];
        last_lambda = lambda;
        last_code = code;
        last_from_scan = true;
    }
    void add_range(const Range& r) {
        len += r.end - r.start + 1;
        for (size_t i = 0; i < per_input.size(); ++i) per_input[i] += r.per_input[i];
        for (size_t i = 0; i < per_symbol.size(); ++i) per_symbol[i] += r.per_symbol[i];
        for (size_t i = 0; i < per_marker.size(); ++i) per_marker[i] += r.per_marker[i];
        last_from_scan = false;
    }
};

template <class Store>
inline MergeResult run_merge_impl(const std::vector<PartialArtifact>& inputs,
                                  const AlphabetMap& alpha, const MergeConfig& cfg,
                                  const Buckets& bk) {
    const uint32_t k = uint32_t(inputs.size());
    const uint32_t sigma = alpha.sigma;
    const uint64_t n = bk.n;
    const bool cap_mode = cfg.prefix_depth > 0;
    const bool skipping = cfg.skipping && !cap_mode;
    const bool with_ts = cfg.track_xlcp || cap_mode;
    const uint64_t threshold =
        cfg.skip_threshold ? cfg.skip_threshold : std::max<uint64_t>(256, uint64_t(k) + sigma + 1);

    MergeResult res;
    res.n = n;
    res.markers = bk.F[1];
    res.pairs_prefix = cfg.prefix;
    res.bwt_path = cfg.prefix + ".bwt";
    res.da_path = cfg.prefix + ".da";
    res.capped = cap_mode;

    for (const char* suffix : {".ranges.0", ".ranges.1"}) {
        std::error_code ec;
        std::filesystem::remove(cfg.prefix + suffix, ec);
    }

    Store store;
    store.init(cfg.prefix, n, bk.input_size, with_ts);
    if constexpr (std::is_same_v<Store, SemiStore>) store.set_n(n);

    std::vector<std::unique_ptr<ByteReader>> in;
    for (const auto& a : inputs) in.push_back(std::make_unique<ByteReader>(a.bwt_path, 1 << 18));

    std::vector<uint64_t> cursor(sigma + 1), sub0(k);
    std::vector<uint64_t> last_block(sigma + 1);
    uint64_t emitted_total = 0;
    uint32_t h = 0;
    uint32_t last_emit_h = 0;
    bool done = false;

    while (true) {
        bool need_more = cap_mode ? (h < cfg.prefix_depth + 2 && (!done || h < cfg.prefix_depth))
                                  : !done;
        if (!need_more) break;
        ++h;
        if (h > n + 2) throw Error("merge failed to converge");

        IterationStats st;
        st.iteration = h;
        for (uint32_t c = 1; c <= sigma; ++c) cursor[c] = bk.F[c];
        for (uint32_t lam = 0; lam < k; ++lam) sub0[lam] = bk.sub0_base[lam];
        std::fill(last_block.begin(), last_block.end(), UINT64_MAX);
        for (auto& r : in) r->rewind();

        std::unique_ptr<ByteWriter> pair_out;
        auto emit = [&](uint64_t pos, bool flag) {
            if (cfg.emit_pairs) {
                if (!pair_out)
                    pair_out = std::make_unique<ByteWriter>(
                        cfg.prefix + ".pairs." + std::to_string(h - 2));
                pair_out->put_u64(pos | (flag ? uint64_t(1) << 63 : 0));
                st.bytes_written += 8;
            }
            ++st.emitted;
            ++emitted_total;
            last_emit_h = h;
        };

        RangeReader skip_in(skipping ? cfg.prefix + ".ranges." + std::to_string(h & 1) : "",
                            k, sigma);
        RangeWriter skip_out;
        if (skipping) skip_out.open(cfg.prefix + ".ranges." + std::to_string((h + 1) & 1));

        RunAcc run;
        run.reset(k, sigma);
        auto close_run = [&] {
            if (!run.active) return;
            if (run.len >= 1 && run.len - 1 > threshold && run.last_from_scan) {
                Range r;
                r.start = run.start;
                r.end = run.start + run.len - 2;
                r.per_input = run.per_input;
                r.per_symbol = run.per_symbol;
                r.per_marker = run.per_marker;
                --r.per_input[run.last_lambda];
                --r.per_symbol[run.last_code];
                if (run.last_code == 0) --r.per_marker[run.last_lambda];
                skip_out.put(r);
                ++st.ranges_recorded;
            }
            run.reset(k, sigma);
        };
        auto close_run_at_end = [&] {
            // Trailing run: the implicit emitted sentinel at position n is the
            // dropped final element, so the accumulated counts stay whole.
            if (!run.active) return;
            if (run.len > threshold) {
                Range r;
                r.start = run.start;
                r.end = run.start + run.len - 1;
                r.per_input = run.per_input;
                r.per_symbol = run.per_symbol;
                r.per_marker = run.per_marker;
                skip_out.put(r);
                ++st.ranges_recorded;
            }
            run.reset(k, sigma);
        };

        uint64_t block_counter = 0;
        bool prev_ts = false;
        Range pending;
        bool have_pending = skipping && skip_in.next(pending);

        uint64_t i = 0;
        while (i < n) {
            if (have_pending && pending.start == i) {
                for (uint32_t lam = 0; lam < k; ++lam) {
                    in[lam]->skip(pending.per_input[lam]);
                    sub0[lam] += pending.per_marker[lam];
                }
                for (uint32_t c = 1; c <= sigma; ++c) cursor[c] += pending.per_symbol[c];
                block_counter += 1;
                if (!run.active) run.begin(i, k, sigma);
                run.add_range(pending);
                if (with_ts) prev_ts = store.ts_old(pending.end, h);
                st.skipped += pending.end - pending.start + 1;
                ++st.ranges_consumed;
                i = pending.end + 1;
                have_pending = skip_in.next(pending);
                continue;
            }

            auto e = store.read(i, h);
            ++st.scanned;
            if (e.boundary) ++block_counter;
            if (e.boundary && !e.bx) {
                emit(i, with_ts && prev_ts);
                store.mark_emitted(i);
            }

            uint8_t byte = in[e.lambda]->get_or_throw();
            int16_t code16 = alpha.code_of[byte];
            if (code16 < 0) throw Error("input byte outside alphabet");
            uint8_t code = uint8_t(code16);

            if (skipping) {
                if (e.bx) {
                    if (!run.active) run.begin(i, k, sigma);
                    run.add_scanned(e.lambda, code);
                } else {
                    close_run();
                }
            }

            uint64_t d = code == 0 ? sub0[e.lambda]++ : cursor[code]++;
            bool bnew = code == 0 || last_block[code] != block_counter;
            last_block[code] = block_counter;
            store.write(d, e.lambda, bnew, h);
            if (with_ts) {
                bool cur_ts = store.ts_old(i, h);
                if (code == 0 || cur_ts) store.ts_new_set(d, h);
                prev_ts = cur_ts;
            }
            ++i;
        }
        if (skipping) close_run_at_end();

        st.bytes_read += st.scanned * 2 + skip_in.bytes() + (with_ts ? st.scanned / 8 : 0) +
                         st.scanned / 8;
        st.bytes_written += st.scanned + skip_out.bytes() + (with_ts ? st.scanned / 8 : 0);
        if (pair_out) pair_out->close();
        skip_out.close();

        done = emitted_total == n - 1;
        st.done = done;
        res.stats.push_back(st);
        res.bytes_read += st.bytes_read;
        res.bytes_written += st.bytes_written;

        if (cap_mode && h == cfg.prefix_depth) {
            res.shortrow_path = cfg.prefix + ".shortrow";
            store.dump_ts(res.shortrow_path, h);
        }
    }
    res.iterations = h;
    res.maxlcp = last_emit_h >= 2 ? last_emit_h - 2 : 0;

    if (cap_mode && emitted_total < n - 1 && cfg.emit_pairs) {
        ByteWriter w(cfg.prefix + ".pairs." + std::to_string(cfg.prefix_depth + 1));
        for (uint64_t i = 1; i < n; ++i)
            if (!store.emitted(i)) w.put_u64(i);
        w.close();
        res.bytes_written += w.bytes_written();
    }

    // Final interleave: the ordinal array now lists, in merged rank order,
    // which input supplies each row.
    {
        for (auto& r : in) r->rewind();
        std::vector<std::unique_ptr<U32Reader>> din;
        for (const auto& a : inputs) din.push_back(std::make_unique<U32Reader>(a.da_path));
        ByteWriter bw(res.bwt_path, false, 1 << 20);
        ByteWriter dw(res.da_path, false, 1 << 20);
        for (uint64_t i = 0; i < n; ++i) {
            uint8_t lam = store.final_ordinal(i, h);
            bw.put(in[lam]->get_or_throw());
            dw.put_u32(din[lam]->next_or_throw());
        }
        bw.close();
        dw.close();
        res.bytes_read += n * 5;
        res.bytes_written += n * 5;
    }
    return res;
}

} // namespace gap_detail

inline MergeResult run_merge(const std::vector<PartialArtifact>& inputs, const AlphabetMap& alpha,
                             const MergeConfig& cfg) {
    if (inputs.empty()) throw Error("merge needs at least one input");
    if (inputs.size() > 128) throw Error("merge fan-in limited to 128 inputs");
    Buckets bk = compute_buckets(inputs, alpha);
    if (bk.n == 0) throw Error("empty merge input");
    if (cfg.semi_external)
        return gap_detail::run_merge_impl<gap_detail::SemiStore>(inputs, alpha, cfg, bk);
    return gap_detail::run_merge_impl<gap_detail::ExternalStore>(inputs, alpha, cfg, bk);
}

} // namespace bwtk
