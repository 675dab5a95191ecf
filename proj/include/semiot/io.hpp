#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace semiot {

/// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_double(double v);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Binary greyscale PGM (P5, maxval 255), row-major.
void write_pgm(const std::filesystem::path& path, int width, int height,
               std::span<const std::uint8_t> pixels);

/// Library version plus git hash when built from a checkout.
std::string_view code_version();

}  // namespace semiot
