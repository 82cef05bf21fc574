#pragma once

#include <cstdint>
#include <string>

#include "ds2/cartesian.hpp"
#include "ds2/polar.hpp"

namespace ds2 {

// DSFLD1 record: "DSFLD1", u32 kind, u32 dims..., complex128 data, all
// little endian. kind 0: dims (nx, ny); kind 1: dims (nc+1, nphi, 2).
// A file may hold several records back to back.
struct FieldRecord {
  std::uint32_t kind = 0;
  std::vector<std::uint32_t> dims;
  cvec data;
};

FieldRecord to_record(const CField& f);
FieldRecord to_record(const PolarField& f);
CField cfield_from(const FieldRecord& r);
PolarField polar_from(const FieldRecord& r);

void write_dsfld(const std::string& path, const std::vector<FieldRecord>& records);
std::vector<FieldRecord> read_dsfld(const std::string& path);

}  // namespace ds2
