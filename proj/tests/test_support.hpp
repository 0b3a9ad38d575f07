#pragma once

#include <filesystem>
#include <string>

namespace ctxsql::testing {

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(CTXSQL_TEST_DATA_DIR) / name;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("ctxsql_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace ctxsql::testing
