#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ctxsql {

/// Base for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string to_upper(std::string_view text);
std::string to_lower(std::string_view text);
bool iequals(std::string_view a, std::string_view b) noexcept;
std::string trim(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

std::uint32_t fnv1a32(std::string_view data) noexcept;

/// Runs fn(i) for i in [0, count) with at most `max_in_flight` concurrent
/// calls. The first exception thrown by any call is rethrown after all
/// workers stop.
void parallel_for(std::size_t count, std::size_t max_in_flight,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ctxsql
