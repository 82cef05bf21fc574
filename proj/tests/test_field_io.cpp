#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "ds2/field_io.hpp"

using namespace ds2;

namespace {
std::string tmp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }
}  // namespace

TEST_CASE("DSFLD1 round trip with several records") {
  CField a(3, 5);
  for (size_t i = 0; i < a.v.size(); ++i) a.v[i] = cplx(double(i), -0.5 * i);
  PolarField p(4, 6);
  for (size_t i = 0; i < p.v.size(); ++i) p.v[i] = cplx(1.0 / (i + 1), double(i % 7));

  auto path = tmp_path("ds2_test_roundtrip.dsfld");
  write_dsfld(path, {to_record(a), to_record(p)});
  auto recs = read_dsfld(path);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].kind == 0);
  CHECK(recs[0].dims == std::vector<std::uint32_t>{3, 5});
  CHECK(recs[1].kind == 1);
  CHECK(recs[1].dims == std::vector<std::uint32_t>{5, 6, 2});
  auto a2 = cfield_from(recs[0]);
  auto p2 = polar_from(recs[1]);
  CHECK(a2.v == a.v);
  CHECK(p2.v == p.v);
  CHECK_THROWS_AS(cfield_from(recs[1]), InputError);
  CHECK_THROWS_AS(polar_from(recs[0]), InputError);

  // header bytes: magic, kind, dims, then little-endian complex128 row-major
  std::ifstream f(path, std::ios::binary);
  char head[6 + 4 + 8];
  f.read(head, sizeof head);
  CHECK(std::memcmp(head, "DSFLD1", 6) == 0);
  std::uint32_t kind, nx, ny;
  std::memcpy(&kind, head + 6, 4);
  std::memcpy(&nx, head + 10, 4);
  std::memcpy(&ny, head + 14, 4);
  CHECK(kind == 0);
  CHECK(nx == 3);
  CHECK(ny == 5);
  double v[2];
  f.seekg(18 + 16 * 7);
  f.read(reinterpret_cast<char*>(v), 16);
  CHECK(v[0] == 7.0);
  CHECK(v[1] == -3.5);
  std::remove(path.c_str());
}

TEST_CASE("DSFLD1 rejects corrupt files") {
  auto path = tmp_path("ds2_test_bad.dsfld");
  {
    std::ofstream f(path, std::ios::binary);
    f << "NOTAFIELD";
  }
  CHECK_THROWS_AS(read_dsfld(path), InputError);
  CField a(4, 4);
  write_dsfld(path, {to_record(a)});
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  CHECK_THROWS_AS(read_dsfld(path), InputError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_dsfld(tmp_path("ds2_no_such_file.dsfld")), InputError);
}
