#pragma once

#include <filesystem>
#include <string>

namespace exposure {

// Reads a whole file. Throws IoError when it cannot be opened or read.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace exposure
