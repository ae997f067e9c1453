#pragma once

// Time-tag files.
//
// Binary layout, all little-endian:
//   "TTAG" | version u16 | resolution_ps u64 | duration_ps u64 | count u64 |
//   count x u64 timestamps (ps)
//
// Text layout: one integer timestamp (ps) per line. Lines starting with '#'
// are comments; "# resolution_ps: N" and "# duration_ps: N" are honoured when
// present.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "upconv/photostream.hpp"

namespace upconv {

inline constexpr std::uint16_t ttag_version = 1;

enum class TtagFormat { binary, text };

void write_ttag(const std::filesystem::path& path, const TimeTagStream& stream);
TimeTagStream read_ttag(const std::filesystem::path& path);

// Extra '#' lines (without the leading '#') are written after the header.
void write_ttag_text(const std::filesystem::path& path, const TimeTagStream& stream,
                     const std::vector<std::string>& comments = {});
TimeTagStream read_ttag_text(const std::filesystem::path& path);

// Picks the reader by the leading magic bytes.
TimeTagStream read_time_tags(const std::filesystem::path& path);

std::vector<char> encode_ttag(const TimeTagStream& stream);
TimeTagStream decode_ttag(const std::vector<char>& bytes);

}  // namespace upconv
