#ifndef CRUDECAST_SRC_DIGEST_HPP
#define CRUDECAST_SRC_DIGEST_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace crudecast::detail {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

} // namespace crudecast::detail

#endif
