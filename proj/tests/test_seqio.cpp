#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "bwtk/seqio.hpp"
#include "util.hpp"

using namespace bwtk;

namespace {
void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}
} // namespace

TEST_CASE("add_doc rejects empty and reserved bytes") {
    Collection c;
    CHECK_THROWS_AS(c.add_doc(nullptr, 0), Error);
    uint8_t bad[] = {'a', 0x00, 'b'};
    CHECK_THROWS_AS(c.add_doc(bad, 3), Error);
    uint8_t ok[] = {'a', 'b'};
    c.add_doc(ok, 2);
    CHECK(c.num_docs() == 1);
    CHECK(c.total_size() == 3);
    CHECK(c.data[2] == kMarker);
}

TEST_CASE("line input, with and without trailing newline") {
    testutil::TempDir tmp("seqio");
    write_text(tmp.prefix("a.txt"), "abcab\naabcabc\n");
    Collection c = load_collection(tmp.prefix("a.txt"), InputFormat::Lines);
    REQUIRE(c.num_docs() == 2);
    CHECK(c.doc_len[0] == 5);
    CHECK(c.doc_len[1] == 7);

    write_text(tmp.prefix("b.txt"), "ab\nba");
    Collection d = load_collection(tmp.prefix("b.txt"), InputFormat::Lines);
    REQUIRE(d.num_docs() == 2);
    CHECK(d.doc_len[1] == 2);

    write_text(tmp.prefix("c.txt"), "");
    CHECK_THROWS_AS(load_collection(tmp.prefix("c.txt"), InputFormat::Lines), Error);
}

TEST_CASE("fasta input") {
    testutil::TempDir tmp("seqio");
    write_text(tmp.prefix("a.fa"), ">one\nabc\nab\n>two desc\ncba\n");
    Collection c = load_collection(tmp.prefix("a.fa"), InputFormat::Fasta);
    REQUIRE(c.num_docs() == 2);
    CHECK(c.doc_len[0] == 5); // lines concatenated
    CHECK(c.doc_len[1] == 3);

    write_text(tmp.prefix("b.fa"), "abc\n>one\nabc\n");
    CHECK_THROWS_AS(load_collection(tmp.prefix("b.fa"), InputFormat::Fasta), Error);
}

TEST_CASE("alphabet codes are dense and ordered") {
    Collection c = testutil::make_collection({"cab", "bz"});
    AlphabetMap a = build_alphabet(c);
    CHECK(a.sigma == 4);
    CHECK(a.code_of[kMarker] == 0);
    CHECK(a.code_of['a'] == 1);
    CHECK(a.code_of['b'] == 2);
    CHECK(a.code_of['c'] == 3);
    CHECK(a.code_of['z'] == 4);
    CHECK(a.code_of['q'] == -1);
    CHECK(a.byte_of[0] == 'a');
}

TEST_CASE("subcollection planning respects the budget") {
    Collection c = testutil::make_collection({"aaaa", "bb", "cccccc", "d"});
    // 9 bytes per symbol (markers included): sizes 5,3,7,2
    auto one = plan_subcollections(c, 1 << 20);
    REQUIRE(one.size() == 1);
    CHECK(one[0].count == 4);
    CHECK(one[0].symbols == c.total_size());

    auto split = plan_subcollections(c, 9 * 8); // at most 8 symbols per range
    REQUIRE(split.size() == 3);
    CHECK(split[0].count == 2); // 5+3
    CHECK(split[1].count == 1); // 7
    CHECK(split[2].count == 1);
    uint64_t covered = 0;
    for (auto& r : split) covered += r.symbols;
    CHECK(covered == c.total_size());

    CHECK_THROWS_AS(plan_subcollections(c, 9 * 4), Error); // "cccccc$" alone exceeds it
}
