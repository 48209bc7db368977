#include <catch2/catch_amalgamated.hpp>

#include "bwtk/gap_merge.hpp"
#include "bwtk/lcp_merge.hpp"
#include "bwtk/oracle.hpp"
#include "bwtk/suffix_core.hpp"
#include "util.hpp"

using namespace bwtk;

namespace {

std::vector<PartialArtifact> make_parts(const Collection& c, const testutil::TempDir& tmp,
                                        uint64_t budget) {
    auto ranges = plan_subcollections(c, budget);
    std::vector<PartialArtifact> parts;
    for (size_t i = 0; i < ranges.size(); ++i) {
        auto order = build_suffix_order(c, ranges[i]);
        parts.push_back(write_partial(tmp.prefix("part" + std::to_string(i)),
                                      derive_bwt(c, ranges[i], order),
                                      derive_da(c, ranges[i], order)));
    }
    return parts;
}

void check_against_oracle(const Collection& c, const MergeResult& res, bool with_xlcp) {
    oracle::Arrays a = oracle::naive_arrays(c);
    uint64_t n = a.bwt.size();
    REQUIRE(res.n == n);
    CHECK(read_all(res.bwt_path) == a.bwt);
    CHECK(testutil::read_u32_file(res.da_path) == a.da);

    PairFileCheck pc = validate_pair_files(res.pairs_prefix, n);
    int64_t maxlcp = 0;
    for (uint64_t i = 1; i < n; ++i) maxlcp = std::max<int64_t>(maxlcp, a.lcp[i]);
    CHECK(res.iterations == uint32_t(maxlcp) + 2);
    CHECK(int64_t(pc.maxlcp) == maxlcp);

    testutil::TempDir out("lcpout");
    LcpMergeResult lm = merge_pair_files(res.pairs_prefix, n, out.prefix("x"), 256, with_xlcp);
    auto lcp = testutil::read_u32_file(lm.lcp_path);
    REQUIRE(lcp.size() == n);
    for (uint64_t i = 0; i < n; ++i) CHECK(int64_t(lcp[i]) == (i == 0 ? 0 : a.lcp[i]));
    if (with_xlcp) CHECK(testutil::read_bit_file(lm.xlcp_path, n) == a.xlcp);
}

} // namespace

TEST_CASE("two-document golden merge") {
    testutil::TempDir tmp("gap");
    Collection c = testutil::make_collection({"abcab", "aabcabc"});
    auto parts = make_parts(c, tmp, 9 * 8); // one doc per part
    REQUIRE(parts.size() == 2);

    MergeConfig cfg;
    cfg.prefix = tmp.prefix("m");
    cfg.track_xlcp = true;
    MergeResult res = run_merge(parts, build_alphabet(c), cfg);
    CHECK(res.iterations == 7); // maxlcp 5
    check_against_oracle(c, res, true);
}

TEST_CASE("single input still yields pair files") {
    testutil::TempDir tmp("gap");
    Collection c = testutil::make_collection({"a"});
    auto parts = make_parts(c, tmp, 1 << 20);
    MergeConfig cfg;
    cfg.prefix = tmp.prefix("m");
    cfg.track_xlcp = true;
    MergeResult res = run_merge(parts, build_alphabet(c), cfg);
    CHECK(res.iterations == 2);
    check_against_oracle(c, res, true);
}

TEST_CASE("random merges across the configuration lattice") {
    std::mt19937_64 rng(424242);
    testutil::RandomSpec spec;
    spec.max_len = 40;
    for (int round = 0; round < 40; ++round) {
        Collection c = testutil::random_collection(rng, spec);
        testutil::TempDir tmp("gap");
        uint64_t budget = 9 * (41 + rng() % 80); // forces a varying number of parts
        auto parts = make_parts(c, tmp, budget);
        AlphabetMap alpha = build_alphabet(c);

        int variant = 0;
        for (bool semi : {false, true}) {
            if (semi && parts.size() > 8) continue;
            for (uint64_t threshold : {uint64_t(0), uint64_t(1), uint64_t(4)}) {
                MergeConfig cfg;
                cfg.prefix = tmp.prefix("m" + std::to_string(variant++));
                cfg.semi_external = semi;
                cfg.skipping = threshold != 0 || (round % 2 == 0);
                cfg.skip_threshold = threshold;
                cfg.track_xlcp = true;
                MergeResult res = run_merge(parts, alpha, cfg);
                check_against_oracle(c, res, true);
            }
        }
    }
}

TEST_CASE("skipping reduces bytes read on repetitive input") {
    testutil::TempDir tmp("gap");
    std::string doc(120, 'a');
    Collection c = testutil::make_collection({doc, doc, "ab"});
    auto parts = make_parts(c, tmp, 9 * 125);
    AlphabetMap alpha = build_alphabet(c);

    MergeConfig off;
    off.prefix = tmp.prefix("off");
    off.skipping = false;
    off.track_xlcp = true;
    MergeResult r_off = run_merge(parts, alpha, off);

    MergeConfig on = off;
    on.prefix = tmp.prefix("on");
    on.skipping = true;
    on.skip_threshold = 1;
    MergeResult r_on = run_merge(parts, alpha, on);

    check_against_oracle(c, r_off, true);
    check_against_oracle(c, r_on, true);
    CHECK(r_on.bytes_read < r_off.bytes_read);
    CHECK(r_off.bytes_read <= 3 * uint64_t(r_off.iterations) * r_off.n);

    uint64_t skipped = 0;
    for (const auto& s : r_on.stats) skipped += s.skipped;
    CHECK(skipped > 0);
}

TEST_CASE("depth-capped merge emits the short-row mask") {
    testutil::TempDir tmp("gap");
    Collection c = testutil::make_collection({"abcab", "aabcabc"});
    auto parts = make_parts(c, tmp, 9 * 8);
    oracle::Arrays a = oracle::naive_arrays(c);

    for (uint32_t depth : {2u, 3u, 4u}) {
        MergeConfig cfg;
        cfg.prefix = tmp.prefix("cap" + std::to_string(depth));
        cfg.prefix_depth = depth;
        MergeResult res = run_merge(parts, build_alphabet(c), cfg);
        CHECK(read_all(res.bwt_path) == a.bwt);
        REQUIRE(!res.shortrow_path.empty());
        auto mask = testutil::read_bit_file(res.shortrow_path, res.n);
        for (uint64_t r = 0; r < res.n; ++r)
            CHECK(mask[r] == (a.slen[r] <= depth ? 1 : 0));

        LcpMergeResult lm = cap_aware_merge(res.pairs_prefix, res.n, cfg.prefix, 256);
        auto lcp = testutil::read_u32_file(lm.lcp_path);
        for (uint64_t r = 1; r < res.n; ++r) {
            if (uint64_t(a.lcp[r]) < depth)
                CHECK(int64_t(lcp[r]) == a.lcp[r]);
            else
                CHECK(lcp[r] >= depth); // capped value stands in for anything deeper
        }
    }
}
