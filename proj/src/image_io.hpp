#pragma once

#include <string>
#include <utility>
#include <vector>

#include "field.hpp"
#include "solver.hpp"

namespace psfs {

// Binary PGM (P5), maxval 255. The writer insists on integral values in
// [0, 255] so that files round-trip bit-exactly.
ScalarField read_pgm(const std::string& path);
void write_pgm(const std::string& path, const ScalarField& levels);

// Grayscale PFM ("Pf"), rows stored bottom-to-top, float32 payload.
// Written little-endian (scale -1.0); both endiannesses are accepted on read.
ScalarField read_pfm(const std::string& path);
void write_pfm(const std::string& path, const ScalarField& f);

// One row per sample: iteration,level,energy.
void write_energy_trace_csv(const std::string& path, const std::vector<TraceSample>& trace);

// Decimal form that parses back to the identical double.
std::string format_double(double v);

// Ordered key=value lines describing one CLI run.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);

  const std::string* find(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string serialise() const;
  static Manifest parse(const std::string& text);

  void write(const std::string& path) const;
  static Manifest read(const std::string& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace psfs
