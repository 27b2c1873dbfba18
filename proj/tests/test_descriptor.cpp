#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "seqlcd/descriptor.hpp"
#include "seqlcd/error.hpp"

using namespace seqlcd;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("seqlcd_test_" + name);
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::BadConfig;
}

DescriptorSet small_set() {
  std::vector<Eigen::VectorXd> raw;
  raw.push_back(Eigen::Vector4d(1, 2, 3, 4));
  raw.push_back(Eigen::Vector4d(-1, 0, 0.5, 2));
  raw.push_back(Eigen::Vector4d(0, 0, 0, 7));
  return DescriptorSet::from_raw(raw, "custom", {"a.pgm", "b.pgm", "c.pgm"});
}

}  // namespace

TEST_CASE("normalize: worked examples") {
  const Descriptor a = normalize(Eigen::Vector2d(3, 4));
  CHECK(a[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(0.8).epsilon(1e-12));

  const Descriptor b = normalize(Eigen::Vector3d(1, 0, 0));
  CHECK(b == Eigen::Vector3d(1, 0, 0));

  CHECK(code_of([] { normalize(Eigen::Vector2d(0, 0)); }) == Errc::ZeroVector);
  CHECK(code_of([] { normalize(Eigen::Vector2d(1, std::nan(""))); }) == Errc::NonFiniteInput);
  CHECK(code_of([] { normalize(Eigen::Vector2d(INFINITY, 1)); }) == Errc::NonFiniteInput);
}

TEST_CASE("normalize: unit norm and scale invariance on random vectors") {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const long dim = 1 + static_cast<long>(rng.next() % 50);
    Eigen::VectorXd v(dim);
    for (long i = 0; i < dim; ++i) v[i] = rng.gauss();
    const double c = std::exp(rng.gauss() * 3);
    const Descriptor n1 = normalize(v);
    const Descriptor n2 = normalize(Eigen::VectorXd(c * v));
    CHECK(std::abs(n1.norm() - 1.0) < 1e-9);
    CHECK((n1 - n2).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("validate_dim follows the layer table") {
  auto make = [](long dim) {
    DescriptorRows rows = DescriptorRows::Zero(1, dim);
    rows(0, 0) = 1.0f;
    return DescriptorSet(rows, "custom");
  };
  CHECK(validate_dim(make(9216), "pool5"));
  CHECK(validate_dim(make(64896), "conv3"));
  CHECK(validate_dim(make(4096), "fc6"));
  CHECK_FALSE(validate_dim(make(100), "pool5"));
  CHECK_FALSE(validate_dim(make(100), "nonsense"));
  CHECK(validate_dim(make(100), "pixel-patch"));
  CHECK(validate_dim(make(100), "custom"));
}

TEST_CASE("DescriptorSet rejects non-unit rows") {
  DescriptorRows rows(1, 2);
  rows << 1.0f, 1.0f;
  CHECK(code_of([&] { DescriptorSet(rows, "custom"); }) == Errc::NotNormalized);
  CHECK(code_of([] { DescriptorSet(DescriptorRows(0, 3), "custom"); }) == Errc::EmptyInput);
}

TEST_CASE("SQDS round trip") {
  const auto path = temp_path("roundtrip.sqds");
  const DescriptorSet set = small_set();
  save_descriptor_file(set, path);
  const DescriptorSet back = load_descriptor_file(path);
  CHECK(back == set);
  CHECK(back.source_tag() == "custom");
  CHECK(back.frame_names().size() == 3);

  // Without names.
  const DescriptorSet unnamed(set.rows(), "pixel-patch");
  save_descriptor_file(unnamed, path);
  CHECK(load_descriptor_file(path) == unnamed);
}

TEST_CASE("SQDS round trip on random sets is bit-exact") {
  oracle::Rng rng(99);
  const auto path = temp_path("random.sqds");
  for (int trial = 0; trial < 5; ++trial) {
    const DescriptorSet set = oracle::random_set(rng, 1 + static_cast<long>(rng.next() % 20), 1 + static_cast<long>(rng.next() % 40));
    save_descriptor_file(set, path);
    CHECK(load_descriptor_file(path) == set);
  }
}

TEST_CASE("SQDS format errors") {
  const auto path = temp_path("bad.sqds");
  save_descriptor_file(small_set(), path);
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& b) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << b;
  };

  std::string wrong_magic = bytes;
  wrong_magic[0] = 'X';
  write(wrong_magic);
  CHECK(code_of([&] { load_descriptor_file(path); }) == Errc::BadMagic);

  std::string wrong_version = bytes;
  wrong_version[4] = 2;
  write(wrong_version);
  CHECK(code_of([&] { load_descriptor_file(path); }) == Errc::UnsupportedVersion);

  // Declare 10 rows but carry the original 3 rows' worth of data (no names).
  const DescriptorSet unnamed(small_set().rows(), "custom");
  save_descriptor_file(unnamed, path);
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  std::string truncated = bytes;
  truncated[8] = 10;
  write(truncated);
  CHECK(code_of([&] { load_descriptor_file(path); }) == Errc::TruncatedFile);

  write(bytes.substr(0, 10));
  CHECK(code_of([&] { load_descriptor_file(path); }) == Errc::TruncatedFile);

  // A name table whose count disagrees with the row count.
  std::string bad_names = bytes;
  bad_names += std::string("\x02\x00\x00\x00", 4);
  write(bad_names);
  CHECK(code_of([&] { load_descriptor_file(path); }) == Errc::DimMismatch);
}
