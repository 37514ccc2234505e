#include "image_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace psfs {

namespace {

bool host_is_little_endian() {
  const std::uint16_t probe = 1;
  unsigned char byte;
  std::memcpy(&byte, &probe, 1);
  return byte == 1;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

long parse_long(const std::string& tok, const char* what) {
  if (tok.empty()) throw IoError(std::string("truncated header: missing ") + what);
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0')
    throw IoError(std::string("bad header field: ") + what);
  return v;
}

}  // namespace

ScalarField read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_pgm: cannot open " + path);
  if (next_token(in) != "P5") throw IoError("read_pgm: not a binary PGM (P5): " + path);
  const long w = parse_long(next_token(in), "width");
  const long h = parse_long(next_token(in), "height");
  const long maxval = parse_long(next_token(in), "maxval");
  if (w < 1 || h < 1) throw IoError("read_pgm: invalid dimensions in " + path);
  if (maxval < 1 || maxval > 255) throw IoError("read_pgm: unsupported maxval in " + path);
  // The header ends with exactly one whitespace byte, already consumed
  // by the tokenizer.
  std::vector<unsigned char> bytes(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size())
    throw IoError("read_pgm: truncated payload in " + path);

  ScalarField f(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < bytes.size(); ++i) f.data()[i] = bytes[i];
  return f;
}

void write_pgm(const std::string& path, const ScalarField& levels) {
  if (levels.empty()) throw InvalidArgument("write_pgm: empty field");
  std::vector<unsigned char> bytes(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double v = levels.data()[i];
    if (!(v >= 0.0 && v <= 255.0) || v != std::round(v))
      throw InvalidArgument("write_pgm: values must be integral grey levels in [0,255]");
    bytes[i] = static_cast<unsigned char>(v);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_pgm: cannot open " + path);
  out << "P5\n" << levels.width() << " " << levels.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write_pgm: write failed for " + path);
}

ScalarField read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_pfm: cannot open " + path);
  const std::string magic = next_token(in);
  if (magic != "Pf") throw IoError("read_pfm: not a grayscale PFM (Pf): " + path);
  const long w = parse_long(next_token(in), "width");
  const long h = parse_long(next_token(in), "height");
  const std::string scale_tok = next_token(in);
  if (w < 1 || h < 1) throw IoError("read_pfm: invalid dimensions in " + path);
  char* end = nullptr;
  const double scale = std::strtod(scale_tok.c_str(), &end);
  if (end == scale_tok.c_str() || scale == 0.0)
    throw IoError("read_pfm: bad scale line in " + path);
  const bool file_little = scale < 0.0;

  std::vector<float> payload(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != payload.size() * sizeof(float))
    throw IoError("read_pfm: truncated payload in " + path);

  if (file_little != host_is_little_endian()) {
    for (float& v : payload) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = ((bits & 0xFF000000u) >> 24) | ((bits & 0x00FF0000u) >> 8) |
             ((bits & 0x0000FF00u) << 8) | ((bits & 0x000000FFu) << 24);
      std::memcpy(&v, &bits, 4);
    }
  }

  const double magnitude = std::abs(scale);
  ScalarField f(static_cast<int>(w), static_cast<int>(h));
  for (long b = 0; b < h; ++b) {
    const float* row = payload.data() + static_cast<std::size_t>(h - 1 - b) * w;
    for (long a = 0; a < w; ++a) f.at(static_cast<int>(a), static_cast<int>(b)) = row[a] * magnitude;
  }
  return f;
}

void write_pfm(const std::string& path, const ScalarField& f) {
  if (f.empty()) throw InvalidArgument("write_pfm: empty field");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_pfm: cannot open " + path);
  out << "Pf\n" << f.width() << " " << f.height() << "\n"
      << (host_is_little_endian() ? "-1.0" : "1.0") << "\n";
  std::vector<float> row(f.width());
  for (int b = f.height() - 1; b >= 0; --b) {
    for (int a = 0; a < f.width(); ++a) row[a] = static_cast<float>(f.at(a, b));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("write_pfm: write failed for " + path);
}

void write_energy_trace_csv(const std::string& path, const std::vector<TraceSample>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_energy_trace_csv: cannot open " + path);
  out << "iteration,level,energy\n";
  for (const TraceSample& t : trace)
    out << t.iteration << "," << t.level << "," << format_double(t.energy) << "\n";
  if (!out) throw IoError("write_energy_trace_csv: write failed for " + path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Manifest::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find('=') != std::string::npos || key.find('\n') != std::string::npos)
    throw InvalidArgument("Manifest: invalid key");
  if (value.find('\n') != std::string::npos)
    throw InvalidArgument("Manifest: value must be a single line");
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }

void Manifest::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

const std::string* Manifest::find(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return &e.second;
  return nullptr;
}

std::string Manifest::serialise() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.first;
    out += '=';
    out += e.second;
    out += '\n';
  }
  return out;
}

Manifest Manifest::parse(const std::string& text) {
  Manifest m;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw IoError("Manifest: malformed line: " + line);
    m.entries_.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return m;
}

void Manifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("Manifest: cannot open " + path);
  const std::string text = serialise();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("Manifest: write failed for " + path);
}

Manifest Manifest::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("Manifest: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace psfs
