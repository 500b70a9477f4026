/*
 * Copyright 2026 The obfusc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace obfusc {

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's contents; throws DataError when unreadable.
std::string sha256_file(const std::string& path);

/// First 8 bytes of SHA-256 as a big-endian integer. Used to derive
/// independent seeds from a root seed and a label.
std::uint64_t hash64(std::string_view bytes);

/// derive_seed(root, "split", "yelp", "User_24") and friends.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t root, const Parts&... parts) {
    std::string key = std::to_string(root);
    ((key += '\x1f', key += std::string_view(parts)), ...);
    return hash64(key);
}

}  // namespace obfusc
