#include "dtem/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "dtem/error.hpp"

namespace dtem {

namespace {

template <typename U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    U r = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) r = (r << 8) | ((v >> (8 * i)) & 0xff);
    return r;
  }
  return v;
}

std::vector<char> slurp(const std::filesystem::path& path, std::size_t bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  if (size != bytes)
    fail(ErrorCode::io, path.string() + ": expected " + std::to_string(bytes) + " bytes, found " + std::to_string(size));
  in.seekg(0);
  std::vector<char> buf(bytes);
  in.read(buf.data(), static_cast<std::streamsize>(bytes));
  if (!in) fail(ErrorCode::io, "read failed for " + path.string());
  return buf;
}

void dump(const std::filesystem::path& path, const std::vector<char>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace

void write_f64(const std::filesystem::path& path, std::span<const double> values) {
  std::vector<char> buf(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = to_little(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(buf.data() + 8 * i, &bits, 8);
  }
  dump(path, buf);
}

std::vector<double> read_f64(const std::filesystem::path& path, std::size_t expected_count) {
  const auto buf = slurp(path, expected_count * 8);
  std::vector<double> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, buf.data() + 8 * i, 8);
    out[i] = std::bit_cast<double>(to_little(bits));
  }
  return out;
}

void write_f32(const std::filesystem::path& path, std::span<const double> values) {
  std::vector<char> buf(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(values[i])));
    std::memcpy(buf.data() + 4 * i, &bits, 4);
  }
  dump(path, buf);
}

std::vector<double> read_f32(const std::filesystem::path& path, std::size_t expected_count) {
  const auto buf = slurp(path, expected_count * 4);
  std::vector<double> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, buf.data() + 4 * i, 4);
    out[i] = std::bit_cast<float>(to_little(bits));
  }
  return out;
}

void write_u8(const std::filesystem::path& path, std::span<const std::uint8_t> values) {
  dump(path, std::vector<char>(values.begin(), values.end()));
}

std::vector<std::uint8_t> read_u8(const std::filesystem::path& path, std::size_t expected_count) {
  const auto buf = slurp(path, expected_count);
  return std::vector<std::uint8_t>(buf.begin(), buf.end());
}

}  // namespace dtem
