#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "cgap/resistance.hpp"

using namespace cgap;
using namespace cgap::res;
using doctest::Approx;

namespace {
const ChannelBody body(0.5, 3.0);

TableOptions small() {
  TableOptions o;
  o.n_dist = 8;
  o.n_theta = 6;
  return o;
}

const ResistanceTable& table() {
  static const ResistanceTable t = ResistanceTable::build(body, small());
  return t;
}

bool spd(const double R[2][2]) { return R[0][0] > 0 && R[0][0] * R[1][1] - R[0][1] * R[1][0] > 0; }
} // namespace

TEST_CASE("lower blend weight") {
  CHECK(lower_weight(-0.5) == 1.0);
  CHECK(lower_weight(0.5) == 0.0);
  CHECK(lower_weight(0.0) == Approx(0.5));
  CHECK(lower_weight(0.1) + lower_weight(-0.1) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("exact resistance is symmetric positive definite") {
  for (const Pose p : {Pose{0.0, 0.0}, Pose{0.6, 0.3}, Pose{-1.2, -0.8}, Pose{1.6, 1.4}}) {
    const auto m = resistance_and_forcing(p, body, 0.0);
    INFO("h=" << p.h << " theta=" << p.theta);
    CHECK(m.R[0][1] == m.R[1][0]);
    CHECK(spd(m.R));
    CHECK(m.asymmetry < 1e-6);
  }
}

TEST_CASE("forcing is calibrated at the centre and linear-quadratic in lambda0") {
  const auto m0 = resistance_and_forcing({0.0, 0.0}, body, 0.2);
  CHECK(std::abs(m0.F_pois[0]) < 1e-12);
  CHECK(std::abs(m0.F_pois[1]) < 1e-12);
  const Pose p{0.5, 0.4};
  const auto a = resistance_and_forcing(p, body, 0.1), b = resistance_and_forcing(p, body, 0.2),
             c = resistance_and_forcing(p, body, 0.3);
  // Second difference of a quadratic in lambda0 is constant: a - 2b + c = 2 * F2 * 0.01.
  const auto z = resistance_and_forcing(p, body, 0.0);
  CHECK(std::abs(z.F_pois[0]) < 1e-12);
  for (int i = 0; i < 2; ++i) {
    const double d2 = a.F_pois[i] - 2 * b.F_pois[i] + c.F_pois[i];
    const double d2b = z.F_pois[i] - 2 * a.F_pois[i] + b.F_pois[i];
    CHECK(d2 == Approx(d2b).epsilon(1e-6).scale(std::abs(b.F_pois[i])));
  }
}

TEST_CASE("mirror symmetry of the resistance") {
  const Pose p{0.7, 0.35};
  const auto a = resistance_and_forcing(p, body, 0.0), b = resistance_and_forcing(geometry::mirror(p), body, 0.0);
  CHECK(a.R[0][0] == Approx(b.R[0][0]).epsilon(1e-8));
  CHECK(a.R[1][1] == Approx(b.R[1][1]).epsilon(1e-8));
  CHECK(std::abs(a.R[0][1]) == Approx(std::abs(b.R[0][1])).epsilon(1e-8));
}

TEST_CASE("resistance grows as the gap closes") {
  double last = 0.0;
  for (double h : {1.5, 2.0, 2.3, 2.45}) {
    const double r = resistance_and_forcing({h, 0.0}, body, 0.0).R[0][0];
    CHECK(r > last);
    last = r;
  }
  // Leading order d^(-3/2) for the perpendicular entry.
  const double d1 = 1e-3, d2 = 1e-4;
  const double h1 = 3.0 - 0.5 - d1, h2 = 3.0 - 0.5 - d2;
  const double r1 = resistance_and_forcing({h1, 0.0}, body, 0.0).R[0][0];
  const double r2 = resistance_and_forcing({h2, 0.0}, body, 0.0).R[0][0];
  CHECK(std::log(r2 / r1) / std::log(d1 / d2) == Approx(1.5).epsilon(0.05));
}

TEST_CASE("small table tracks the exact assembly") {
  const auto& t = table();
  for (const Pose p : {Pose{0.0, 0.0}, Pose{0.8, 0.5}, Pose{-1.5, 1.0}}) {
    const auto e = resistance_and_forcing(p, body, 0.05), m = t.model(p, 0.05);
    INFO("h=" << p.h << " theta=" << p.theta);
    CHECK(spd(m.R));
    // 8 x 6 nodes only; the production grid is checked in the verify suite.
    CHECK(m.R[0][0] == Approx(e.R[0][0]).epsilon(0.2));
    CHECK(m.R[1][1] == Approx(e.R[1][1]).epsilon(0.2));
  }
}

TEST_CASE("table save and load round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "cgap_test_resistance";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "t.txt").string();
  REQUIRE(table().save(path));
  ResistanceTable back;
  CHECK_FALSE(ResistanceTable::load(path, back));
  REQUIRE(ResistanceTable::load(path, body, small(), back));
  auto other = small();
  other.n_theta = 7;
  ResistanceTable miss;
  CHECK_FALSE(ResistanceTable::load(path, body, other, miss));
  CHECK(back.key() == table().key());
  const Pose p{0.4, -0.9};
  const auto a = table().model(p, 0.1), b = back.model(p, 0.1);
  CHECK(a.R[0][0] == b.R[0][0]);
  CHECK(a.R[1][0] == b.R[1][0]);
  CHECK(a.F_pois[1] == b.F_pois[1]);
  // A cached load with the same options does not rebuild.
  const auto c = ResistanceTable::cached(path, body, small());
  CHECK(c.key() == table().key());
  std::filesystem::remove_all(dir);
}

TEST_CASE("cache key and path") {
  auto o = small();
  CHECK(ResistanceTable::key_for(body, o) == table().key());
  o.n_dist = 9;
  CHECK(ResistanceTable::key_for(body, o) != table().key());
  setenv("CGAP_CACHE_DIR", "/tmp/cgap_cache_probe", 1);
  const auto p1 = default_cache_path(body, small()), p2 = default_cache_path(body, o);
  CHECK(p1.rfind("/tmp/cgap_cache_probe/rtable-", 0) == 0);
  CHECK(p1 != p2);
  CHECK(p1 == default_cache_path(body, small()));
}
