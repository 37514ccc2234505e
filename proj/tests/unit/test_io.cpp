#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "errors.hpp"
#include "image_io.hpp"

using namespace psfs;

namespace {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  double next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return (z >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }
};

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("pgm round trip") {
    Rng rng(3);
    ScalarField levels(37, 23);
    for (std::size_t i = 0; i < levels.size(); ++i)
      levels.data()[i] = std::floor(rng.uniform(0.0, 255.999));
    const std::string path = temp_path("psfs_test.pgm");
    write_pgm(path, levels);
    const ScalarField back = read_pgm(path);
    REQUIRE(back.same_size(levels));
    for (std::size_t i = 0; i < levels.size(); ++i) CHECK(back.data()[i] == levels.data()[i]);
    std::remove(path.c_str());
  }

  TEST_CASE("pgm writer is strict about levels") {
    const std::string path = temp_path("psfs_bad.pgm");
    CHECK_THROWS_AS(write_pgm(path, ScalarField(4, 4, 0.5)), InvalidArgument);
    CHECK_THROWS_AS(write_pgm(path, ScalarField(4, 4, 256.0)), InvalidArgument);
    CHECK_THROWS_AS(write_pgm(path, ScalarField(4, 4, -1.0)), InvalidArgument);
  }

  TEST_CASE("pgm reader handles comments and rejects damage") {
    const std::string path = temp_path("psfs_comment.pgm");
    {
      std::ofstream out(path, std::ios::binary);
      out << "P5\n# a comment line\n2 2\n255\n";
      out.put(0).put(64).put(128).put(255);
    }
    const ScalarField f = read_pgm(path);
    CHECK(f.at(0, 0) == 0.0);
    CHECK(f.at(1, 0) == 64.0);
    CHECK(f.at(0, 1) == 128.0);
    CHECK(f.at(1, 1) == 255.0);
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_pgm(temp_path("psfs_missing_file.pgm")), IoError);

    const std::string trunc = temp_path("psfs_trunc.pgm");
    {
      std::ofstream out(trunc, std::ios::binary);
      out << "P5\n4 4\n255\n";
      out.put(1);
    }
    CHECK_THROWS_AS(read_pgm(trunc), IoError);
    std::remove(trunc.c_str());
  }

  TEST_CASE("pfm round trip preserves float32 payloads") {
    Rng rng(5);
    ScalarField f(19, 31);
    for (std::size_t i = 0; i < f.size(); ++i) {
      // values representable as float32 round-trip exactly
      f.data()[i] = static_cast<float>(rng.uniform(-50.0, 50.0));
    }
    const std::string path = temp_path("psfs_test.pfm");
    write_pfm(path, f);
    const ScalarField back = read_pfm(path);
    REQUIRE(back.same_size(f));
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back.data()[i] == f.data()[i]);
    std::remove(path.c_str());
  }

  TEST_CASE("pfm stores rows bottom-to-top") {
    ScalarField f(1, 2);
    f.at(0, 0) = 7.0;   // top row
    f.at(0, 1) = -3.0;  // bottom row
    const std::string path = temp_path("psfs_rows.pfm");
    write_pfm(path, f);
    const std::string bytes = slurp(path);
    // header "Pf\n1 2\n-1.0\n" then the BOTTOM row first
    const std::size_t header = bytes.find("-1.0\n") + 5;
    float first = 0.0f;
    std::memcpy(&first, bytes.data() + header, 4);
    CHECK(first == -3.0f);
    const ScalarField back = read_pfm(path);
    CHECK(back.at(0, 0) == 7.0);
    CHECK(back.at(0, 1) == -3.0);
    std::remove(path.c_str());
  }

  TEST_CASE("energy trace csv format") {
    const std::string path = temp_path("psfs_trace.csv");
    write_energy_trace_csv(path, {{2, 0, 1.5}, {2, 10, 0.25}, {1, 0, 3.0}});
    const std::string text = slurp(path);
    CHECK(text == "iteration,level,energy\n0,2,1.5\n10,2,0.25\n0,1,3\n");
    std::remove(path.c_str());
  }

  TEST_CASE("doubles survive the text round trip") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      const double v = (rng.uniform(-1, 1)) * std::pow(10.0, rng.uniform(-12, 12));
      const std::string s = format_double(v);
      CHECK(std::stod(s) == v);
    }
    CHECK(std::stod(format_double(7.5e-5)) == 7.5e-5);
  }

  TEST_CASE("manifest round trip") {
    Manifest m;
    m.set("command", "render");
    m.set("alpha", 7.5e-5);
    m.set("iters", 1000000LL);
    m.set("path", "out/image with spaces.pgm");
    m.set("note", "key=value values may contain equals signs");

    const std::string text = m.serialise();
    const Manifest back = Manifest::parse(text);
    REQUIRE(back.entries().size() == m.entries().size());
    for (std::size_t i = 0; i < m.entries().size(); ++i) {
      CHECK(back.entries()[i].first == m.entries()[i].first);
      CHECK(back.entries()[i].second == m.entries()[i].second);
    }
    CHECK(back.serialise() == text);
    CHECK(*back.find("alpha") == format_double(7.5e-5));
    CHECK(back.find("absent") == nullptr);

    const std::string path = temp_path("psfs_manifest.txt");
    m.write(path);
    const Manifest from_disk = Manifest::read(path);
    CHECK(from_disk.serialise() == text);
    std::remove(path.c_str());
  }

  TEST_CASE("manifest rejects malformed content") {
    CHECK_THROWS_AS(Manifest::parse("no separator here\n"), IoError);
    CHECK_THROWS_AS(Manifest::parse("=value with empty key\n"), IoError);
    Manifest m;
    CHECK_THROWS_AS(m.set("bad\nkey", "v"), InvalidArgument);
    CHECK_THROWS_AS(m.set("key", "bad\nvalue"), InvalidArgument);
  }

  TEST_CASE("setting an existing key overwrites it") {
    Manifest m;
    m.set("k", "1");
    m.set("k", "2");
    CHECK(m.entries().size() == 1);
    CHECK(*m.find("k") == "2");
  }
}
