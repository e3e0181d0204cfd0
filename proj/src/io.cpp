#include "nltv/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace nltv {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path + ": read failed");
  return text;
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(path + ": write failed");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

std::vector<double> parse_signal_csv(std::string_view text, const std::string& origin) {
  std::vector<double> values;
  bool seen_line = false;
  int line_no = 0;
  while (!text.empty()) {
    const std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    double v = 0.0;
    if (!parse_double(line, v)) {
      const bool header = !seen_line && std::any_of(line.begin(), line.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) != 0;
      });
      if (!header) throw IoError(fmt::format("{}:{}: not a finite number: '{}'", origin, line_no, line));
    } else {
      values.push_back(v);
    }
    seen_line = true;
  }
  if (values.empty()) throw IoError(origin + ": no values");
  return values;
}

std::vector<double> read_signal_csv(const std::string& path) { return parse_signal_csv(read_text_file(path), path); }

void write_signal_csv(const std::string& path, const std::vector<double>& values, const std::string& header) {
  std::string text = header;
  if (!text.empty() && text.back() != '\n') text += '\n';
  for (double v : values) {
    text += format_real(v);
    text += '\n';
  }
  write_text_file(path, text);
}

namespace {

class PgmCursor {
public:
  PgmCursor(std::string_view bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(fmt::format("{}: byte {}: {}", origin_, pos_, what));
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000L) fail(std::string(what) + " is too large");
      ++pos_;
    }
    if (pos_ == start) fail(std::string("expected ") + what);
    return v;
  }

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail("truncated pixel data");
    const std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }
  std::size_t size() const { return bytes_.size(); }
  char at(std::size_t i) const { return bytes_[i]; }

private:
  std::string_view bytes_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(std::string_view bytes, const std::string& origin) {
  PgmCursor cur(bytes, origin);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    cur.fail("not a P2 or P5 graymap");
  }
  const bool binary = bytes[1] == '5';
  cur.advance(2);
  GrayImage img;
  img.width = static_cast<int>(cur.number("width"));
  img.height = static_cast<int>(cur.number("height"));
  img.maxval = static_cast<int>(cur.number("maxval"));
  if (img.width < 1 || img.height < 1) cur.fail("empty image");
  if (img.maxval < 1 || img.maxval > 65535) cur.fail("maxval must be in [1, 65535]");
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.values.resize(count);
  const double scale = 1.0 / img.maxval;
  if (binary) {
    if (cur.pos() >= cur.size() || !std::isspace(static_cast<unsigned char>(cur.at(cur.pos())))) {
      cur.fail("expected whitespace before pixel data");
    }
    cur.advance(1);
    const int width = img.maxval > 255 ? 2 : 1;
    const std::string_view raw = cur.take(count * width);
    for (std::size_t i = 0; i < count; ++i) {
      unsigned v = static_cast<unsigned char>(raw[i * width]);
      if (width == 2) v = (v << 8) | static_cast<unsigned char>(raw[i * width + 1]);
      if (v > static_cast<unsigned>(img.maxval)) cur.fail("pixel exceeds maxval");
      img.values[i] = v * scale;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = cur.number("pixel value");
      if (v > img.maxval) cur.fail("pixel exceeds maxval");
      img.values[i] = v * scale;
    }
  }
  return img;
}

GrayImage read_pgm_any(const std::string& path) { return parse_pgm(read_text_file(path), path); }

Image2D read_pgm(const std::string& path) {
  GrayImage g = read_pgm_any(path);
  if (g.width != g.height) {
    throw IoError(fmt::format("{}: image is {}x{}; a square grid is required", path, g.width, g.height));
  }
  return Image2D(g.width, std::move(g.values));
}

std::string format_pgm(const Image2D& image, int maxval, bool binary) {
  if (maxval < 1 || maxval > 65535) throw std::invalid_argument("write_pgm: maxval must be in [1, 65535]");
  const int n = image.n();
  std::string out = fmt::format("{}\n{} {}\n{}\n", binary ? "P5" : "P2", n, n, maxval);
  const auto& v = image.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto level = static_cast<unsigned>(std::lround(std::clamp(v[i], 0.0, 1.0) * maxval));
    if (binary) {
      if (maxval > 255) out.push_back(static_cast<char>(level >> 8));
      out.push_back(static_cast<char>(level & 0xff));
    } else {
      out += fmt::format("{}{}", level, (i + 1) % static_cast<std::size_t>(n) == 0 ? '\n' : ' ');
    }
  }
  return out;
}

void write_pgm(const std::string& path, const Image2D& image, int maxval, bool binary) {
  write_text_file(path, format_pgm(image, maxval, binary));
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string report_header(std::string_view canonical_config) {
  return fmt::format("# nltv-version {}, config-hash {:016x}", kVersion, fnv1a(canonical_config));
}

std::string format_real(double v) { return fmt::format("{}", v); }

}  // namespace nltv
