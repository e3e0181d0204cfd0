#pragma once

#include "nltv/schemes_2d.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nltv {

/// Malformed or unreadable file. The message carries the path and the line
/// (text formats) or byte offset (binary formats).
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One real per line. Blank lines and lines starting with '#' are skipped;
/// a first non-numeric line is taken as a header.
std::vector<double> read_signal_csv(const std::string& path);
std::vector<double> parse_signal_csv(std::string_view text, const std::string& origin = "<memory>");
void write_signal_csv(const std::string& path, const std::vector<double>& values, const std::string& header = "");

struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 0;
  /// Row-major, top row first, already divided by maxval.
  std::vector<double> values;
};

/// P2 (plain) or P5 (binary) graymap with maxval up to 65535.
GrayImage read_pgm_any(const std::string& path);
GrayImage parse_pgm(std::string_view bytes, const std::string& origin = "<memory>");

/// Square graymap as an image; row j of the image is row j of the file.
Image2D read_pgm(const std::string& path);

/// Writes values clamped to [0, 1] and rounded to maxval levels, so reading
/// back is exact up to 1 / (2 maxval) per pixel.
void write_pgm(const std::string& path, const Image2D& image, int maxval = 255, bool binary = true);
std::string format_pgm(const Image2D& image, int maxval = 255, bool binary = true);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

inline constexpr std::string_view kVersion = "1.0.0";

/// "# nltv-version <v>, config-hash <16 hex digits>"
std::string report_header(std::string_view canonical_config);

/// Shortest text that reads back to the same double.
std::string format_real(double v);

void write_text_file(const std::string& path, std::string_view text);
std::string read_text_file(const std::string& path);

}  // namespace nltv
