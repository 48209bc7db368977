#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bwtk {

// End-marker byte shared by every document. Ties between markers are broken
// by document index, which the algorithms realize positionally rather than
// by storing per-document marker values.
constexpr uint8_t kMarker = 0x00;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

class VerifyError : public Error {
public:
    explicit VerifyError(const std::string& msg) : Error(msg) {}
};

} // namespace bwtk
