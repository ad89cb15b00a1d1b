#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dtem {

// Raw little-endian IEEE-754 arrays, no header.
void write_f64(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f64(const std::filesystem::path& path, std::size_t expected_count);
void write_f32(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f32(const std::filesystem::path& path, std::size_t expected_count);
void write_u8(const std::filesystem::path& path, std::span<const std::uint8_t> values);
std::vector<std::uint8_t> read_u8(const std::filesystem::path& path, std::size_t expected_count);

}  // namespace dtem
