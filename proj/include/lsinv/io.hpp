#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lsinv::io {

/// Write via a sibling temporary file and rename, so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, std::span<const unsigned char> bytes);
void atomic_write(const std::filesystem::path& path, std::string_view text);

std::vector<unsigned char> read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

void put_u32_le(std::vector<unsigned char>& out, std::uint32_t v);
void put_u64_le(std::vector<unsigned char>& out, std::uint64_t v);
void put_f64_le(std::vector<unsigned char>& out, double v);
std::uint32_t get_u32_le(std::span<const unsigned char> in, std::size_t offset);
std::uint64_t get_u64_le(std::span<const unsigned char> in, std::size_t offset);
double get_f64_le(std::span<const unsigned char> in, std::size_t offset);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace lsinv::io
