// SPDX-License-Identifier: Apache-2.0
#include "common.hpp"

#include <cstdio>

namespace earverify {

std::string to_hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace earverify
