#include "mist/dataset.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "mist/rng.hpp"

using namespace mist;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mist_dataset_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("moons without noise lie on the arcs") {
  const Dataset d = make_two_moons(4, 0.0, 0);
  REQUIRE(d.size() == 4);
  REQUIRE(d.labels.has_value());
  CHECK(*d.labels == Labels{0, 0, 1, 1});
  CHECK(d.features(0, 0) == doctest::Approx(1.0));
  CHECK(d.features(0, 1) == doctest::Approx(0.0));
  CHECK(d.features(1, 0) == doctest::Approx(-1.0));
  CHECK(d.features(2, 0) == doctest::Approx(0.0));
  CHECK(d.features(2, 1) == doctest::Approx(0.5));
  CHECK(d.features(3, 0) == doctest::Approx(2.0));
  for (Index i = 0; i < 2; ++i) CHECK(d.features.row(i).norm() == doctest::Approx(1.0));
  for (Index i = 2; i < 4; ++i) {
    const RowVector c{{1.0, 0.5}};
    CHECK((d.features.row(i) - c).norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("moons are balanced") {
  const Dataset d = make_two_moons(100, 0.05, 7);
  int ones = 0;
  for (int y : *d.labels) ones += y;
  CHECK(ones == 50);
  CHECK(d.num_classes() == 2);
}

TEST_CASE("rings without noise have the stated radii") {
  const Dataset d = make_two_rings(4, 0.0, 0.35, 0);
  for (Index i = 0; i < 4; ++i) {
    const double r = d.features.row(i).norm();
    CHECK(r == doctest::Approx((*d.labels)[static_cast<std::size_t>(i)] == 0 ? 1.0 : 0.35));
  }
}

TEST_CASE("rings are separated by the radius gap") {
  const Dataset d = make_two_rings(6, 0.0, 0.5, 1);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) {
      if ((*d.labels)[static_cast<std::size_t>(i)] != (*d.labels)[static_cast<std::size_t>(j)]) {
        CHECK((d.features.row(i) - d.features.row(j)).norm() >= 0.5 - 1e-12);
      }
    }
  }
}

TEST_CASE("generators reject bad arguments") {
  CHECK_THROWS_AS(make_two_moons(1, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_two_moons(10, -0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_two_rings(10, 0.1, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_two_rings(10, 0.1, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_two_rings(10, -1.0, 0.5, 0), std::invalid_argument);
}

TEST_CASE("generators are deterministic in the seed") {
  CHECK(make_two_moons(200, 0.05, 3).features == make_two_moons(200, 0.05, 3).features);
  CHECK(make_two_rings(200, 0.01, 0.35, 3).features == make_two_rings(200, 0.01, 0.35, 3).features);
  CHECK(make_two_rings(200, 0.01, 0.35, 3).features != make_two_rings(200, 0.01, 0.35, 4).features);
}

TEST_CASE("csv round trip is exact") {
  Rng rng(11);
  Dataset d;
  d.features = Matrix(3, 2);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 2; ++j) d.features(i, j) = rng.gaussian() * 1e3 + rng.uniform() * 1e-9;
  }
  d.labels = Labels{0, 1, 1};
  const auto p = scratch("roundtrip.csv");
  save_csv(d, p);
  const Dataset back = load_csv(p);
  CHECK(back.features == d.features);
  CHECK(back.labels == d.labels);
  CHECK(dataset_hash(back) == dataset_hash(d));

  const Dataset moons = make_two_moons(500, 0.05, 2);
  save_csv(moons, p);
  CHECK(load_csv(p).features == moons.features);
}

TEST_CASE("csv without a label column is unlabeled") {
  const auto p = scratch("unlabeled.csv");
  write_text(p, "f0,f1\n1,2\n3,4\n");
  const Dataset d = load_csv(p);
  CHECK_FALSE(d.labels.has_value());
  CHECK(d.num_classes() == 0);
  CHECK(d.features(1, 1) == 4.0);
}

TEST_CASE("csv errors name the problem") {
  const auto p = scratch("bad.csv");
  auto message = [&](const std::string& text) -> std::string {
    write_text(p, text);
    try {
      (void)load_csv(p, 2);
    } catch (const std::exception& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("f0,f1\n1,2,3\n").find("ragged row") != std::string::npos);
  CHECK(message("f0,f1\n1,x\n").find("non-numeric cell") != std::string::npos);
  CHECK(message("a,b\n1,2\n").find("malformed header") != std::string::npos);
  CHECK(message("f0,f1,label\n1,2,5\n").find("label") != std::string::npos);
  CHECK(message("f0,f1,label\n1,2,-1\n") != "");
  CHECK_THROWS(load_csv(scratch("does_not_exist.csv")));
}

TEST_CASE("hash changes with content") {
  Dataset a = make_two_moons(20, 0.1, 0);
  Dataset b = a;
  CHECK(dataset_hash(a) == dataset_hash(b));
  b.features(3, 1) += 1e-15;
  CHECK(dataset_hash(a) != dataset_hash(b));
  b = a;
  b.labels.reset();
  CHECK(dataset_hash(a) != dataset_hash(b));
}
