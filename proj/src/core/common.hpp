// SPDX-License-Identifier: Apache-2.0
#ifndef EARVERIFY_CORE_COMMON_HPP
#define EARVERIFY_CORE_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace earverify {

// Error categories surfaced through the C API as status codes.
enum class ErrorKind {
    InvalidArgument,
    Io,
    Format,
    Numeric,
    Infeasible,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) fail(kind, msg);
}

// FNV-1a, used for stable subject-derived seeds and file digests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t state = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        state ^= p[i];
        state *= 0x100000001b3ULL;
    }
    return state;
}

inline std::uint64_t fnv1a64(std::string_view s) {
    return fnv1a64(s.data(), s.size());
}

std::string to_hex16(std::uint64_t v);

} // namespace earverify

#endif
