#include <doctest.h>

#include <random>
#include <sstream>

#include "loopmaps/io.hpp"
#include "support.hpp"

using namespace loopmaps;
using io::Json;

TEST_SUITE("io") {

TEST_CASE("loop json round trip is bit exact") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ComplexMatrix> cs;
  for (int k = 0; k < 7; ++k) {
    ComplexMatrix m(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = Complex(u(rng) * std::pow(10.0, k - 3), u(rng) / 3.0);
    cs.push_back(m);
  }
  cs[2](0, 0) = Complex(5e-324, -0.0);
  const LaurentLoop a(-3, cs, 8);
  const Json j = io::loop_to_json(a);
  CHECK(j["n"] == 3);
  CHECK(j["kmin"] == -3);
  CHECK(j["kmax"] == 3);
  CHECK(j["coeffs"].size() == 7 * 9);
  const LaurentLoop b = io::loop_from_json(Json::parse(j.dump()), "loop", 8);
  REQUIRE(b.kmin() == a.kmin());
  REQUIRE(b.kmax() == a.kmax());
  for (int k = a.kmin(); k <= a.kmax(); ++k) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        CHECK(b.coeff(k)(r, c).real() == a.coeff(k)(r, c).real());
        CHECK(b.coeff(k)(r, c).imag() == a.coeff(k)(r, c).imag());
      }
  }
}

TEST_CASE("loop json errors") {
  Json j = io::loop_to_json(LaurentLoop::identity(2, 4));
  Json extra = j;
  extra["trunc"] = 4;
  CHECK_THROWS_AS(io::loop_from_json(extra, "loop"), ConfigError);
  Json short_coeffs = j;
  short_coeffs["coeffs"].erase(0);
  CHECK_THROWS_AS(io::loop_from_json(short_coeffs, "loop"), ConfigError);
  Json missing = j;
  missing.erase("kmax");
  CHECK_THROWS_AS(io::loop_from_json(missing, "loop"), ConfigError);
}

TEST_CASE("loop field json round trip") {
  Grid g;
  g.samples = 3;
  LoopField f(g);
  for (std::size_t q = 0; q < f.values.size(); ++q) {
    f.values[q] = LaurentLoop::monomial(static_cast<double>(q) * identity(2), -1, 4);
  }
  const LoopField back = io::loop_field_from_json(Json::parse(io::loop_field_to_json(f).dump()), "field", 4);
  CHECK(field_distance(back, f) == 0.0);
  CHECK(back.grid.samples == 3);
}

TEST_CASE("map field and subbundle csv") {
  Grid g;
  g.samples = 3;
  MapField m(g);
  for (auto& v : m.values) v = identity(2);
  m.at(2, 1)(0, 1) = Complex(0.5, -0.25);
  const std::string csv = io::map_field_csv(m);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "i,j,re_00,im_00,re_01,im_01,re_10,im_10,re_11,im_11");
  int rows = 0;
  std::string hit;
  while (std::getline(in, line)) {
    ++rows;
    if (line.rfind("2,1,", 0) == 0) hit = line;
  }
  CHECK(rows == 9);
  CHECK(hit == "2,1,1,0,0.5,-0.25,0,0,1,0");

  ComplexMatrix v = ComplexMatrix::Zero(2, 1);
  v(0, 0) = 1.0;
  SubbundleField s = subbundle_from_frame(PolynomialFrame({v}), g);
  s.flags[4] = kFlagRankDrop;
  const std::string scsv = io::subbundle_csv(s);
  CHECK(scsv.rfind("i,j,flags,re_00", 0) == 0);
  CHECK(scsv.find("\n1,1,1,") != std::string::npos);
  const Json sj = io::subbundle_to_json(s);
  CHECK(sj["rank"] == 1);
  CHECK(sj["points"][4]["flags"] == 1);
}

TEST_CASE("defect stats as json") {
  Grid g;
  g.samples = 5;
  DefectStat s;
  s.add(1.0, 1, 2);
  s.add(3.0, 4, 0);
  const Json j = io::stat_to_json(s, g);
  CHECK(j["max"] == 3.0);
  CHECK(j["mean"] == 2.0);
  CHECK(j["argmax"]["i"] == 4);
  CHECK(j["argmax"]["z"][0] == 1.0);
  CHECK(j["argmax"]["z"][1] == -1.0);
  CHECK(io::stat_to_json(DefectStat{}, g)["argmax"].is_null());
}

TEST_CASE("potential specs") {
  const Json zero = {{"type", "polynomial"}, {"n", 3}, {"terms", Json::array()}};
  const io::PotentialSpec z = io::potential_from_json(zero, "potential", 8);
  CHECK(z.mu.n() == 3);
  CHECK(!z.finite_type);

  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 0.6;
  a(1, 0) = 0.4;
  const LaurentLoop eta = LaurentLoop::monomial(a, -1, 8) - LaurentLoop::monomial(a.adjoint(), 1, 8);
  const Json ft = {{"type", "finite_type"}, {"d", 1}, {"eta", io::loop_to_json(eta)}, {"Q0", Json::parse("[[1, 0], [0, -1]]")}};
  const io::PotentialSpec f = io::potential_from_json(ft, "potential", 8);
  REQUIRE(f.finite_type);
  CHECK(f.finite_type->q0->isApprox(ComplexMatrix(Eigen::Vector2cd(1.0, -1.0).asDiagonal())));

  Json even = ft;
  even["d"] = 2;
  CHECK_THROWS_AS(io::potential_from_json(even, "potential", 8), ConfigError);
  Json unknown = zero;
  unknown["colour"] = "red";
  CHECK_THROWS_AS(io::potential_from_json(unknown, "potential", 8), ConfigError);
  CHECK_THROWS_AS(io::potential_from_json({{"type", "spline"}}, "potential", 8), ConfigError);
  const Json low = {{"type", "polynomial"},
                    {"terms", Json::array({{{"zpow", 0}, {"loop", io::loop_to_json(LaurentLoop::monomial(a, -2, 8))}}})}};
  CHECK_THROWS_AS(io::potential_from_json(low, "potential", 8), ConfigError);
}

}
