#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <unistd.h>
#include <random>
#include <string>
#include <vector>

#include "bwtk/io_util.hpp"
#include "bwtk/pipeline.hpp"
#include "bwtk/seqio.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path = std::filesystem::temp_directory_path() /
               (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string prefix(const std::string& name) const { return (path / name).string(); }
};

struct RandomSpec {
    uint32_t min_docs = 1, max_docs = 10;
    uint32_t min_len = 1, max_len = 64;
    uint32_t min_sigma = 1, max_sigma = 4;
    double dup_prob = 0.15;      // chance to repeat an earlier document
    double uniform_prob = 0.10;  // chance of a single-symbol document
};

inline bwtk::Collection random_collection(std::mt19937_64& rng, const RandomSpec& spec = {}) {
    std::uniform_int_distribution<uint32_t> docs_d(spec.min_docs, spec.max_docs);
    std::uniform_int_distribution<uint32_t> sigma_d(spec.min_sigma, spec.max_sigma);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    uint32_t docs = docs_d(rng), sigma = sigma_d(rng);
    std::uniform_int_distribution<uint32_t> len_d(spec.min_len, spec.max_len);
    std::uniform_int_distribution<uint32_t> sym_d(0, sigma - 1);

    bwtk::Collection c;
    std::vector<std::vector<uint8_t>> made;
    for (uint32_t d = 0; d < docs; ++d) {
        std::vector<uint8_t> doc;
        if (!made.empty() && coin(rng) < spec.dup_prob) {
            doc = made[rng() % made.size()];
        } else {
            uint32_t len = len_d(rng);
            uint8_t only = uint8_t('a' + sym_d(rng));
            bool uniform = coin(rng) < spec.uniform_prob;
            for (uint32_t i = 0; i < len; ++i)
                doc.push_back(uniform ? only : uint8_t('a' + sym_d(rng)));
        }
        c.add_doc(doc.data(), doc.size());
        made.push_back(std::move(doc));
    }
    return c;
}

inline bwtk::Collection make_collection(const std::vector<std::string>& docs) {
    bwtk::Collection c;
    for (const auto& d : docs) c.add_doc(reinterpret_cast<const uint8_t*>(d.data()), d.size());
    return c;
}

inline std::vector<uint32_t> read_u32_file(const std::string& path) {
    std::vector<uint32_t> out;
    bwtk::U32Reader r(path);
    uint64_t count = bwtk::file_size(path) / 4;
    for (uint64_t i = 0; i < count; ++i) out.push_back(r.next_or_throw());
    return out;
}

inline std::vector<uint8_t> read_bit_file(const std::string& path, uint64_t n) {
    std::vector<uint8_t> out;
    bwtk::BitFileReader r(path);
    for (uint64_t i = 0; i < n; ++i) out.push_back(r.next_or_throw() ? 1 : 0);
    return out;
}

// Index outputs loaded back into memory for oracle comparison.
struct Loaded {
    std::vector<uint8_t> bwt;
    std::vector<uint32_t> da;
    std::vector<uint32_t> lcp;
    std::vector<uint8_t> xlcp;
};

inline Loaded load_outputs(const std::string& prefix, bool with_lcp = true,
                           bool with_xlcp = true) {
    Loaded out;
    out.bwt = bwtk::read_all(prefix + ".bwt");
    out.da = read_u32_file(prefix + ".da");
    if (with_lcp) out.lcp = read_u32_file(prefix + ".lcp");
    if (with_xlcp) out.xlcp = read_bit_file(prefix + ".xlcp", out.bwt.size());
    return out;
}

} // namespace testutil
