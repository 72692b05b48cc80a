#include "exposure/io.hpp"

#include <fstream>
#include <sstream>

#include "exposure/errors.hpp"

namespace exposure {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return buffer.str();
}

}  // namespace exposure
