#include "evdenoise/file_util.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "evdenoise/errors.hpp"

namespace evdenoise {

void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer, bool binary) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".partial";
    try {
        {
            std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
            if (!out) {
                throw IoError("cannot open " + tmp.string() + " for writing");
            }
            writer(out);
            out.flush();
            if (!out) {
                throw IoError("write failed for " + tmp.string());
            }
        }
        std::error_code ec;
        fs::rename(tmp, path, ec);
        if (ec) {
            throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                          ec.message());
        }
    } catch (...) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw;
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace evdenoise
