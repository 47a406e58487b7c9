#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace curirl::test {

/// Empty scratch directory under the build tree.
inline std::filesystem::path fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::path(CURIRL_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace curirl::test
