#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wordrep {

inline constexpr uint64_t kFnvOffset = 1469598103934665603ull;

uint64_t fnv1a64(const void* data, size_t n, uint64_t h = kFnvOffset);
uint64_t fnv1a64(std::string_view s, uint64_t h = kFnvOffset);
std::string hex_u64(uint64_t v);

// Checksums are reported as "fnv1a:<16 hex digits>".
std::string bytes_checksum(std::string_view bytes);
std::string file_checksum(const std::string& path);

std::string read_file(const std::string& path);

// Writes to <path>.tmp and renames over the target, so partially written
// artifacts never appear under their final name.
void atomic_write_file(const std::string& path, std::string_view bytes);

std::vector<std::string> split(std::string_view line, char sep);
std::string strip(std::string_view s);

// Shortest-stable decimal forms; parsing the output reproduces the value
// bit-exactly, and re-serializing yields the identical string.
std::string format_double(double v);
std::string format_float(float v);
double parse_double(const std::string& s);

}  // namespace wordrep
