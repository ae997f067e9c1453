#include "upconv/ttag_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "upconv/error.hpp"

namespace upconv {

namespace {

constexpr std::array<char, 4> magic = {'T', 'T', 'A', 'G'};
constexpr std::size_t header_size = 4 + 2 + 8 + 8 + 8;

template <typename T>
void put_le(std::vector<char>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::vector<char>& in, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return value;
}

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void check_increasing(const std::vector<std::int64_t>& ts) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < 0 || (i > 0 && ts[i] <= ts[i - 1])) {
      throw Error(ErrorCode::format, "timestamps must be non-negative and strictly increasing");
    }
  }
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::format, "invalid integer '" + std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<char> encode_ttag(const TimeTagStream& stream) {
  check_increasing(stream.timestamps);
  std::vector<char> out;
  out.reserve(header_size + 8 * stream.timestamps.size());
  out.insert(out.end(), magic.begin(), magic.end());
  put_le<std::uint16_t>(out, ttag_version);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(to_picoseconds(stream.detector.resolution)));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(stream.duration_ps));
  put_le<std::uint64_t>(out, stream.timestamps.size());
  for (std::int64_t t : stream.timestamps) put_le<std::uint64_t>(out, static_cast<std::uint64_t>(t));
  return out;
}

TimeTagStream decode_ttag(const std::vector<char>& bytes) {
  if (bytes.size() < header_size || !std::equal(magic.begin(), magic.end(), bytes.begin())) {
    throw Error(ErrorCode::format, "not a TTAG file (bad magic or short header)");
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != ttag_version) {
    throw Error(ErrorCode::format, "unsupported TTAG version " + std::to_string(version));
  }
  const auto resolution_ps = get_le<std::uint64_t>(bytes, 6);
  const auto duration_ps = get_le<std::uint64_t>(bytes, 14);
  const auto count = get_le<std::uint64_t>(bytes, 22);
  if (resolution_ps == 0) throw Error(ErrorCode::format, "TTAG resolution must be non-zero");
  if (count > (bytes.size() - header_size) / 8 || bytes.size() != header_size + 8 * count) {
    throw Error(ErrorCode::format, "TTAG payload length does not match event count");
  }
  TimeTagStream stream;
  stream.detector.resolution = static_cast<double>(resolution_ps) / ps_per_second;
  stream.duration_ps = static_cast<std::int64_t>(duration_ps);
  stream.timestamps.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    stream.timestamps[i] = static_cast<std::int64_t>(get_le<std::uint64_t>(bytes, header_size + 8 * i));
  }
  check_increasing(stream.timestamps);
  return stream;
}

void write_ttag(const std::filesystem::path& path, const TimeTagStream& stream) {
  const auto bytes = encode_ttag(stream);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

TimeTagStream read_ttag(const std::filesystem::path& path) { return decode_ttag(slurp(path)); }

void write_ttag_text(const std::filesystem::path& path, const TimeTagStream& stream,
                     const std::vector<std::string>& comments) {
  check_increasing(stream.timestamps);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << "# resolution_ps: " << to_picoseconds(stream.detector.resolution) << '\n';
  out << "# duration_ps: " << stream.duration_ps << '\n';
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::int64_t t : stream.timestamps) out << t << '\n';
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

TimeTagStream read_ttag_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  TimeTagStream stream;
  std::int64_t resolution_ps = 1;
  std::int64_t duration_ps = -1;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const std::string_view body = trim(view.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) continue;
      const std::string_view key = trim(body.substr(0, colon));
      const std::string_view value = trim(body.substr(colon + 1));
      if (key == "resolution_ps") resolution_ps = parse_int(value);
      if (key == "duration_ps") duration_ps = parse_int(value);
      continue;
    }
    stream.timestamps.push_back(parse_int(view));
  }
  check_increasing(stream.timestamps);
  if (resolution_ps <= 0) throw Error(ErrorCode::format, "resolution_ps must be positive");
  stream.detector.resolution = static_cast<double>(resolution_ps) / ps_per_second;
  if (duration_ps < 0) duration_ps = stream.timestamps.empty() ? 0 : stream.timestamps.back() + resolution_ps;
  stream.duration_ps = duration_ps;
  return stream;
}

TimeTagStream read_time_tags(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  if (in.gcount() == 4 && head == magic) return read_ttag(path);
  return read_ttag_text(path);
}

}  // namespace upconv
