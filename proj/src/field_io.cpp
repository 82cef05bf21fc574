#include "ds2/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ds2 {

namespace {

constexpr char kMagic[6] = {'D', 'S', 'F', 'L', 'D', '1'};

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  v = to_le(v);
  os.write(reinterpret_cast<const char*>(&v), 4);
}

void put_f64(std::ostream& os, double v) {
  v = to_le(v);
  os.write(reinterpret_cast<const char*>(&v), 8);
}

bool get_u32(std::istream& is, std::uint32_t& v) {
  if (!is.read(reinterpret_cast<char*>(&v), 4)) return false;
  v = to_le(v);
  return true;
}

}  // namespace

FieldRecord to_record(const CField& f) {
  FieldRecord r;
  r.kind = 0;
  r.dims = {std::uint32_t(f.nx), std::uint32_t(f.ny)};
  r.data = f.v;
  return r;
}

FieldRecord to_record(const PolarField& f) {
  FieldRecord r;
  r.kind = 1;
  r.dims = {std::uint32_t(f.nc + 1), std::uint32_t(f.nphi), 2u};
  r.data.resize(f.v.size());
  size_t k = 0;
  for (int j = 0; j <= f.nc; ++j)
    for (int i = 0; i < f.nphi; ++i)
      for (int d = 0; d < 2; ++d) r.data[k++] = f.at(d, j, i);
  return r;
}

CField cfield_from(const FieldRecord& r) {
  if (r.kind != 0 || r.dims.size() != 2) throw InputError("DSFLD1: not a cartesian record");
  CField f(int(r.dims[0]), int(r.dims[1]));
  f.v = r.data;
  return f;
}

PolarField polar_from(const FieldRecord& r) {
  if (r.kind != 1 || r.dims.size() != 3 || r.dims[2] != 2) throw InputError("DSFLD1: not a polar record");
  PolarField f(int(r.dims[0]) - 1, int(r.dims[1]));
  size_t k = 0;
  for (int j = 0; j <= f.nc; ++j)
    for (int i = 0; i < f.nphi; ++i)
      for (int d = 0; d < 2; ++d) f.at(d, j, i) = r.data[k++];
  return f;
}

void write_dsfld(const std::string& path, const std::vector<FieldRecord>& records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path);
  for (const auto& r : records) {
    os.write(kMagic, 6);
    put_u32(os, r.kind);
    for (auto d : r.dims) put_u32(os, d);
    for (const auto& c : r.data) {
      put_f64(os, c.real());
      put_f64(os, c.imag());
    }
  }
  if (!os) throw InputError("write failed: " + path);
}

std::vector<FieldRecord> read_dsfld(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot read " + path);
  std::vector<FieldRecord> out;
  char magic[6];
  while (is.read(magic, 6)) {
    if (std::memcmp(magic, kMagic, 6) != 0) throw InputError(path + ": bad DSFLD1 magic");
    FieldRecord r;
    if (!get_u32(is, r.kind)) throw InputError(path + ": truncated header");
    size_t ndims = r.kind == 0 ? 2 : r.kind == 1 ? 3 : 0;
    if (ndims == 0) throw InputError(path + ": unknown field kind");
    size_t count = 1;
    for (size_t i = 0; i < ndims; ++i) {
      std::uint32_t d;
      if (!get_u32(is, d)) throw InputError(path + ": truncated header");
      r.dims.push_back(d);
      count *= d;
    }
    r.data.resize(count);
    std::vector<double> raw(2 * count);
    if (!is.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size() * 8)))
      throw InputError(path + ": truncated data");
    for (size_t i = 0; i < count; ++i) r.data[i] = cplx(to_le(raw[2 * i]), to_le(raw[2 * i + 1]));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ds2
