#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace evdenoise {

// Runs `writer` against a temporary file next to `path`, then renames it into
// place. On any failure the temporary is removed and IoError is thrown, so a
// file at `path` is always complete.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer, bool binary = true);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace evdenoise
