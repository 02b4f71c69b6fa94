#pragma once

#include <string>
#include <string_view>

namespace vulpath::util {

/// Lowercase 32-hex MD5 digest of `data`.
std::string md5_hex(std::string_view data);

}  // namespace vulpath::util
