#pragma once

#include <cstdint>
#include <string>

namespace wordpost::cli {

struct FileDigest {
    std::string sha256;  // lowercase hex
    std::uintmax_t bytes = 0;
};

// Throws std::invalid_argument if the file cannot be read.
FileDigest digest_file(const std::string& path);

}  // namespace wordpost::cli
