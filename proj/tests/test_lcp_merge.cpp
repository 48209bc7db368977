#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "bwtk/lcp_merge.hpp"
#include "util.hpp"

using namespace bwtk;

namespace {

// Scatter an lcp array (ranks 1..n-1) into per-value pair files, the shape
// the merge phase leaves behind. The record for rank r carries the flag of
// rank r-1: whether the suffix at r-1 is a prefix of the one at r.
void write_pairs(const std::string& prefix, const std::vector<uint32_t>& lcp,
                 const std::vector<uint8_t>& xlcp) {
    std::map<uint32_t, std::vector<uint64_t>> by_value;
    for (uint64_t r = 1; r < lcp.size(); ++r)
        by_value[lcp[r]].push_back(r | (xlcp[r - 1] ? uint64_t(1) << 63 : 0));
    for (auto& [v, recs] : by_value) {
        ByteWriter w(prefix + ".pairs." + std::to_string(v));
        for (uint64_t rec : recs) w.put_u64(rec);
        w.close();
    }
}

} // namespace

TEST_CASE("pair files merge back into the lcp array") {
    std::mt19937_64 rng(777);
    for (int round = 0; round < 25; ++round) {
        uint64_t n = 2 + rng() % 400;
        std::vector<uint32_t> lcp(n, 0);
        std::vector<uint8_t> xlcp(n, 0);
        uint32_t cap = 1 + rng() % 20;
        uint64_t sum = 0;
        uint32_t maxv = 0;
        for (uint64_t r = 1; r < n; ++r) {
            lcp[r] = rng() % cap;
            xlcp[r - 1] = rng() % 2;
            sum += lcp[r];
            maxv = std::max(maxv, lcp[r]);
        }
        xlcp[n - 1] = 0; // the last rank never prefixes a successor

        testutil::TempDir tmp("lcpm");
        write_pairs(tmp.prefix("p"), lcp, xlcp);

        PairFileCheck pc = validate_pair_files(tmp.prefix("p"), n);
        CHECK(pc.records == n - 1);
        CHECK(pc.maxlcp == maxv);

        uint32_t fan_in = round % 2 == 0 ? 256 : 2;
        LcpMergeResult res = merge_pair_files(tmp.prefix("p"), n, tmp.prefix("out"), fan_in);
        CHECK(testutil::read_u32_file(res.lcp_path) == lcp);
        CHECK(testutil::read_bit_file(res.xlcp_path, n) == xlcp);
        CHECK(res.maxlcp == maxv);
        CHECK(res.avelcp == Catch::Approx(double(sum) / double(n - 1)));
        if (fan_in == 2 && maxv >= 4) CHECK(res.rounds > 1);
    }
}

TEST_CASE("fan-in two forces intermediate rounds") {
    std::vector<uint32_t> lcp = {0, 0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<uint8_t> xlcp(lcp.size(), 0);
    testutil::TempDir tmp("lcpm");
    write_pairs(tmp.prefix("p"), lcp, xlcp);
    LcpMergeResult res = merge_pair_files(tmp.prefix("p"), lcp.size(), tmp.prefix("out"), 2);
    CHECK(res.rounds >= 3); // eight sources halve twice before the final pass
    CHECK(testutil::read_u32_file(res.lcp_path) == lcp);
}

TEST_CASE("malformed pair files are rejected") {
    testutil::TempDir tmp("lcpm");
    uint64_t n = 6;

    SECTION("missing rank") {
        ByteWriter w(tmp.prefix("p") + ".pairs.0");
        for (uint64_t r : {1, 2, 4, 5}) w.put_u64(r);
        w.close();
        CHECK_THROWS_AS(validate_pair_files(tmp.prefix("p"), n), VerifyError);
        CHECK_THROWS_AS(merge_pair_files(tmp.prefix("p"), n, tmp.prefix("out")), VerifyError);
    }
    SECTION("rank covered twice") {
        ByteWriter a(tmp.prefix("p") + ".pairs.0");
        for (uint64_t r : {1, 2, 3}) a.put_u64(r);
        a.close();
        ByteWriter b(tmp.prefix("p") + ".pairs.1");
        for (uint64_t r : {3, 4, 5}) b.put_u64(r);
        b.close();
        CHECK_THROWS_AS(validate_pair_files(tmp.prefix("p"), n), VerifyError);
        CHECK_THROWS_AS(merge_pair_files(tmp.prefix("p"), n, tmp.prefix("out")), VerifyError);
    }
    SECTION("rank zero never carries a pair") {
        ByteWriter w(tmp.prefix("p") + ".pairs.0");
        for (uint64_t r : {0, 1, 2, 3, 4, 5}) w.put_u64(r);
        w.close();
        CHECK_THROWS_AS(validate_pair_files(tmp.prefix("p"), n), VerifyError);
    }
    SECTION("positions must increase within a file") {
        ByteWriter w(tmp.prefix("p") + ".pairs.0");
        for (uint64_t r : {2, 1, 3, 4, 5}) w.put_u64(r);
        w.close();
        CHECK_THROWS_AS(validate_pair_files(tmp.prefix("p"), n), VerifyError);
    }
    SECTION("position beyond the last rank") {
        ByteWriter w(tmp.prefix("p") + ".pairs.0");
        for (uint64_t r : {1, 2, 3, 4, 7}) w.put_u64(r);
        w.close();
        CHECK_THROWS_AS(validate_pair_files(tmp.prefix("p"), n), VerifyError);
    }
    SECTION("no pair files at all") {
        CHECK_THROWS_AS(merge_pair_files(tmp.prefix("p"), n, tmp.prefix("out")), Error);
    }
    SECTION("fan-in below two") {
        ByteWriter w(tmp.prefix("p") + ".pairs.0");
        for (uint64_t r : {1, 2, 3, 4, 5}) w.put_u64(r);
        w.close();
        CHECK_THROWS_AS(merge_pair_files(tmp.prefix("p"), n, tmp.prefix("out"), 1), Error);
    }
}
