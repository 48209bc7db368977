#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bwtk/common.hpp"
#include "bwtk/io_util.hpp"

namespace bwtk {

// A collection is stored as the concatenation of its documents, each followed
// by the end-marker byte. doc_start[d] is the offset of document d's first
// symbol; doc_len[d] counts symbols excluding the marker.
struct Collection {
    std::vector<uint8_t> data;
    std::vector<uint64_t> doc_start;
    std::vector<uint64_t> doc_len;

    uint64_t num_docs() const { return doc_start.size(); }
    uint64_t total_size() const { return data.size(); } // symbols + markers

    void add_doc(const uint8_t* p, size_t len) {
        if (len == 0) throw Error("empty document");
        for (size_t i = 0; i < len; ++i)
            if (p[i] == kMarker) throw Error("document contains reserved byte 0x00");
        doc_start.push_back(data.size());
        doc_len.push_back(len);
        data.insert(data.end(), p, p + len);
        data.push_back(kMarker);
    }
};

enum class InputFormat { Lines, Fasta };

inline Collection load_collection(const std::string& path, InputFormat fmt) {
    std::vector<uint8_t> raw = read_all(path);
    Collection coll;
    if (fmt == InputFormat::Lines) {
        size_t start = 0;
        for (size_t i = 0; i <= raw.size(); ++i) {
            bool at_end = i == raw.size();
            if (at_end || raw[i] == '\n') {
                if (at_end && i == start) break; // no trailing partial line
                coll.add_doc(raw.data() + start, i - start);
                start = i + 1;
            }
        }
    } else {
        std::vector<uint8_t> cur;
        bool in_record = false;
        size_t i = 0;
        while (i < raw.size()) {
            size_t eol = i;
            while (eol < raw.size() && raw[eol] != '\n') ++eol;
            if (eol > i && raw[i] == '>') {
                if (in_record) {
                    coll.add_doc(cur.data(), cur.size());
                    cur.clear();
                }
                in_record = true;
            } else {
                if (!in_record && eol > i) throw Error("sequence data before first FASTA header");
                cur.insert(cur.end(), raw.begin() + i, raw.begin() + eol);
            }
            i = eol + 1;
        }
        if (in_record) coll.add_doc(cur.data(), cur.size());
    }
    if (coll.num_docs() == 0) throw Error("empty collection");
    return coll;
}

// Maps document bytes to dense codes 1..sigma; code 0 is the end-marker.
// Code order follows byte order.
struct AlphabetMap {
    std::array<int16_t, 256> code_of; // -1 when absent
    std::vector<uint8_t> byte_of;     // byte_of[code-1] for codes 1..sigma
    uint32_t sigma = 0;
};

inline AlphabetMap build_alphabet(const Collection& coll) {
    std::array<bool, 256> seen{};
    for (uint8_t b : coll.data)
        if (b != kMarker) seen[b] = true;
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
    if (a.sigma > 254) throw Error("alphabet too large: more than 254 distinct symbols");
    return a;
}

// Builds an alphabet over several collections merged together.
inline AlphabetMap build_alphabet(const std::vector<const Collection*>& colls) {
    std::array<bool, 256> seen{};
    for (const Collection* c : colls)
        for (uint8_t b : c->data)
            if (b != kMarker) seen[b] = true;
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
    if (a.sigma > 254) throw Error("alphabet too large: more than 254 distinct symbols");
    return a;
}

struct DocRange {
    uint64_t first = 0; // first document index
    uint64_t count = 0;
    uint64_t symbols = 0; // symbols + markers in the range
};

// Greedy left-to-right split: a range grows while its size (markers included)
// times bytes_per_symbol stays within the budget.
inline std::vector<DocRange> plan_subcollections(const Collection& coll, uint64_t budget_bytes,
                                                 uint64_t bytes_per_symbol = 9) {
    std::vector<DocRange> out;
    DocRange cur;
    for (uint64_t d = 0; d < coll.num_docs(); ++d) {
        uint64_t need = coll.doc_len[d] + 1;
        if (need * bytes_per_symbol > budget_bytes)
            throw Error("memory budget too small for document " + std::to_string(d));
        if (cur.count > 0 && (cur.symbols + need) * bytes_per_symbol > budget_bytes) {
            out.push_back(cur);
            cur = DocRange{d, 0, 0};
        }
        if (cur.count == 0) cur.first = d;
        cur.count += 1;
        cur.symbols += need;
    }
    if (cur.count) out.push_back(cur);
    return out;
}

} // namespace bwtk
