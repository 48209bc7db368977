#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include "bwtk/common.hpp"

namespace bwtk {

inline uint64_t file_size(const std::string& path) {
    std::error_code ec;
    auto sz = std::filesystem::file_size(path, ec);
    if (ec) throw IoError("cannot stat " + path + ": " + ec.message());
    return sz;
}

inline std::vector<uint8_t> read_all(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path);
    std::vector<uint8_t> out(file_size(path));
    if (!out.empty() && std::fread(out.data(), 1, out.size(), f) != out.size()) {
        std::fclose(f);
        throw IoError("short read on " + path);
    }
    std::fclose(f);
    return out;
}

inline void write_all(const std::string& path, const void* data, size_t size) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot create " + path);
    if (size && std::fwrite(data, 1, size, f) != size) {
        std::fclose(f);
        throw IoError("short write on " + path);
    }
    std::fclose(f);
}

// Buffered sequential reader with forward seeks. Counts bytes handed out.
class ByteReader {
public:
    explicit ByteReader(const std::string& path, size_t buf = 1 << 16)
        : path_(path), buf_(buf) {
        f_ = std::fopen(path.c_str(), "rb");
        if (!f_) throw IoError("cannot open " + path);
    }
    ~ByteReader() {
        if (f_) std::fclose(f_);
    }
    ByteReader(const ByteReader&) = delete;
    ByteReader& operator=(const ByteReader&) = delete;
    ByteReader(ByteReader&& o) noexcept { *this = std::move(o); }
    ByteReader& operator=(ByteReader&& o) noexcept {
        if (this != &o) {
            if (f_) std::fclose(f_);
            f_ = o.f_; o.f_ = nullptr;
            path_ = std::move(o.path_);
            buf_ = std::move(o.buf_);
            pos_ = o.pos_; end_ = o.end_; bytes_read_ = o.bytes_read_;
        }
        return *this;
    }

    // Returns -1 at end of file.
    int get() {
        if (pos_ == end_ && !fill()) return -1;
        ++bytes_read_;
        return buf_[pos_++];
    }
    uint8_t get_or_throw() {
        int c = get();
        if (c < 0) throw IoError("unexpected end of " + path_);
        return static_cast<uint8_t>(c);
    }
    bool read_exact(void* dst, size_t len) {
        auto* p = static_cast<uint8_t*>(dst);
        while (len) {
            if (pos_ == end_ && !fill()) return false;
            size_t take = std::min(len, end_ - pos_);
            std::memcpy(p, buf_.data() + pos_, take);
            pos_ += take; p += take; len -= take; bytes_read_ += take;
        }
        return true;
    }
    void skip(uint64_t count) {
        uint64_t avail = end_ - pos_;
        if (count <= avail) {
            pos_ += count;
        } else {
            pos_ = end_ = 0;
            if (std::fseek(f_, static_cast<long>(count - avail), SEEK_CUR) != 0)
                throw IoError("seek failed on " + path_);
        }
    }
    void rewind() {
        pos_ = end_ = 0;
        bytes_read_ = 0;
        std::rewind(f_);
    }
    uint64_t bytes_read() const { return bytes_read_; }

private:
    bool fill() {
        size_t got = std::fread(buf_.data(), 1, buf_.size(), f_);
        pos_ = 0;
        end_ = got;
        return got > 0;
    }
    FILE* f_ = nullptr;
    std::string path_;
    std::vector<uint8_t> buf_;
    size_t pos_ = 0, end_ = 0;
    uint64_t bytes_read_ = 0;
};

class ByteWriter {
public:
    explicit ByteWriter(const std::string& path, bool append = false, size_t buf = 1 << 16)
        : path_(path) {
        f_ = std::fopen(path.c_str(), append ? "ab" : "wb");
        if (!f_) throw IoError("cannot create " + path);
        buf_.reserve(buf);
        cap_ = buf;
    }
    ~ByteWriter() { close(); }
    ByteWriter(const ByteWriter&) = delete;
    ByteWriter& operator=(const ByteWriter&) = delete;

    void put(uint8_t b) {
        buf_.push_back(b);
        ++bytes_written_;
        if (buf_.size() >= cap_) flush();
    }
    void write(const void* data, size_t len) {
        const auto* p = static_cast<const uint8_t*>(data);
        buf_.insert(buf_.end(), p, p + len);
        bytes_written_ += len;
        if (buf_.size() >= cap_) flush();
    }
    void put_u32(uint32_t v) {
        uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
        write(b, 4);
    }
    void put_u64(uint64_t v) {
        uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = uint8_t(v >> (8 * i));
        write(b, 8);
    }
    void flush() {
        if (!buf_.empty()) {
            if (std::fwrite(buf_.data(), 1, buf_.size(), f_) != buf_.size())
                throw IoError("short write on " + path_);
            buf_.clear();
        }
    }
    void close() {
        if (f_) {
            flush();
            std::fclose(f_);
            f_ = nullptr;
        }
    }
    uint64_t bytes_written() const { return bytes_written_; }

private:
    FILE* f_ = nullptr;
    std::string path_;
    std::vector<uint8_t> buf_;
    size_t cap_ = 0;
    uint64_t bytes_written_ = 0;
};

inline uint32_t get_u32(const uint8_t* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
inline uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | p[i];
    return v;
}

class U32Reader {
public:
    explicit U32Reader(const std::string& path) : r_(path) {}
    bool next(uint32_t& out) {
        uint8_t b[4];
        if (!r_.read_exact(b, 4)) return false;
        out = get_u32(b);
        return true;
    }
    uint32_t next_or_throw() {
        uint32_t v;
        if (!next(v)) throw IoError("unexpected end of u32 stream");
        return v;
    }

private:
    ByteReader r_;
};

// LSB-first bit stream reader over a packed bit file.
class BitFileReader {
public:
    explicit BitFileReader(const std::string& path) : r_(path) {}
    bool next(bool& out) {
        if (nbits_ == 0) {
            int c = r_.get();
            if (c < 0) return false;
            cur_ = static_cast<uint8_t>(c);
            nbits_ = 8;
        }
        out = cur_ & 1;
        cur_ >>= 1;
        --nbits_;
        return true;
    }
    bool next_or_throw() {
        bool b;
        if (!next(b)) throw IoError("unexpected end of bit stream");
        return b;
    }

private:
    ByteReader r_;
    uint8_t cur_ = 0;
    int nbits_ = 0;
};

class BitFileWriter {
public:
    explicit BitFileWriter(const std::string& path) : w_(path) {}
    void put(bool bit) {
        if (bit) cur_ |= uint8_t(1u << nbits_);
        if (++nbits_ == 8) {
            w_.put(cur_);
            cur_ = 0;
            nbits_ = 0;
        }
    }
    void close() {
        if (nbits_) {
            w_.put(cur_);
            cur_ = 0;
            nbits_ = 0;
        }
        w_.close();
    }
    ~BitFileWriter() { close(); }

private:
    ByteWriter w_;
    uint8_t cur_ = 0;
    int nbits_ = 0;
};

// File-backed byte array with random access through mmap. The merge keeps its
// per-position working state in files of this shape and lets the page cache
// schedule the physical I/O.
class MappedFile {
public:
    MappedFile() = default;
    MappedFile(const std::string& path, uint64_t size) { open(path, size); }
    void open(const std::string& path, uint64_t size) {
        close();
        size_ = size;
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) throw IoError("cannot open " + path);
        if (::ftruncate(fd_, static_cast<off_t>(size)) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw IoError("cannot size " + path);
        }
        if (size) {
            void* p = ::mmap(nullptr, size, PROT_READ | PROT_WRITE, MAP_SHARED, fd_, 0);
            if (p == MAP_FAILED) {
                ::close(fd_);
                fd_ = -1;
                throw IoError("cannot map " + path);
            }
            data_ = static_cast<uint8_t*>(p);
        }
    }
    void close() {
        if (data_) {
            ::munmap(data_, size_);
            data_ = nullptr;
        }
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
        size_ = 0;
    }
    ~MappedFile() { close(); }
    MappedFile(const MappedFile&) = delete;
    MappedFile& operator=(const MappedFile&) = delete;

    uint8_t* data() { return data_; }
    const uint8_t* data() const { return data_; }
    uint64_t size() const { return size_; }

private:
    int fd_ = -1;
    uint8_t* data_ = nullptr;
    uint64_t size_ = 0;
};

// Bit array over raw bytes, LSB-first within each byte.
struct BitSpan {
    uint8_t* data = nullptr;
    bool get(uint64_t i) const { return (data[i >> 3] >> (i & 7)) & 1; }
    void set(uint64_t i) { data[i >> 3] |= uint8_t(1u << (i & 7)); }
    void assign(uint64_t i, bool v) {
        if (v)
            data[i >> 3] |= uint8_t(1u << (i & 7));
        else
            data[i >> 3] &= uint8_t(~(1u << (i & 7)));
    }
};

} // namespace bwtk
