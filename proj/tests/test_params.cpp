#include "doseopt/error.hpp"
#include "doseopt/json_io.hpp"
#include "doseopt/params.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace doseopt;

TEST_CASE("per-day rates are divided by 1440") {
  ModelParams raw;
  raw.k3 = 0.5;
  const auto p = normalize_params(raw, {{"k3", "per_day"}});
  CHECK(p.k3 == doctest::Approx(3.4722222e-4).epsilon(1e-7));
  CHECK(p.k3 == 0.5 / 1440.0);
}

TEST_CASE("per-minute rates are unchanged") {
  ModelParams raw;
  raw.k1 = 0.014;
  CHECK(normalize_params(raw, {{"k1", "per_min"}}).k1 == 0.014);
  CHECK(normalize_params(raw, {}).k1 == 0.014);
}

TEST_CASE("zero rate is unit invariant") {
  ModelParams raw;
  const auto p = normalize_params(raw, {{"k1", "per_day"}, {"k2", "1/day"}, {"k5", "per_min"}});
  CHECK(p.k1 == 0.0);
  CHECK(p.k2 == 0.0);
  CHECK(p.k5 == 0.0);
}

TEST_CASE("unknown unit tag names the field") {
  ModelParams raw;
  try {
    normalize_params(raw, {{"k5", "per_fortnight"}});
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
    CHECK(std::string(e.what()).find("k5") != std::string::npos);
  }
  CHECK_THROWS_AS(normalize_params(raw, {{"k4", "per_day"}}), Error);
}

TEST_CASE("built-in parameter sets") {
  const auto caf = caffeine_params();
  CHECK(caf.e0 == 0.0);
  CHECK(caf.k1 == 0.002);
  CHECK(caf.k2 == 0.1);
  CHECK(caf.k3 == 0.5 / 1440.0);
  CHECK(caf.k4 == 0.3);
  CHECK(caf.k5 == 0.5 / 1440.0);
  CHECK(caf.k6 == 0.4);
  CHECK(caf.k7 == 0.0125);
  CHECK_FALSE(caf.acute_tolerance_enabled());

  const auto nic = nicotine_params();
  CHECK(nic.e0 == 60.0);
  CHECK(nic.k1 == 0.014);
  CHECK(nic.k2 == 0.08);
  CHECK(nic.k3 == 0.0);
  CHECK(nic.k4 == 0.0);
  CHECK(nic.k5 == 20.0 / 1440.0);
  CHECK(nic.k6 == 1800.0);
  CHECK(nic.k7 == 0.0175);
  REQUIRE(nic.c_half);
  CHECK(*nic.c_half == 0.005);

  CHECK(builtin_params("caffeine") == caf);
  CHECK_FALSE(builtin_params("tea"));
}

TEST_CASE("validation") {
  auto p = caffeine_params();
  CHECK_NOTHROW(validate(p));
  p.k1 = -1;
  CHECK_THROWS_AS(validate(p), Error);
  p = caffeine_params();
  p.k6 = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(p), Error);
  p = caffeine_params();
  p.c_half = 0.0;
  CHECK_THROWS_AS(validate(p), Error);
  p = caffeine_params();
  p.k4 = -0.5;  // negative tolerance strength is allowed, only finiteness is required
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("stability bound") {
  CHECK(stability_bound(caffeine_params()) == doctest::Approx(20.0));
  CHECK(std::isinf(stability_bound(ModelParams{})));
}

TEST_CASE("field access by name") {
  auto p = caffeine_params();
  CHECK(std::isinf(get_field(p, "c_half")));
  auto q = with_field(p, "c_half", 2.0);
  REQUIRE(q.c_half);
  CHECK(*q.c_half == 2.0);
  CHECK_FALSE(with_field(q, "c_half", std::numeric_limits<double>::infinity()).c_half);
  CHECK(with_field(p, "k6", 0.2).k6 == 0.2);
  CHECK_THROWS_AS(get_field(p, "k8"), Error);
  CHECK_THROWS_AS(with_field(p, "gain", 1.0), Error);
}

TEST_CASE("parameter JSON accepts the inf literal and unit tags") {
  const auto j = json::parse(R"({"e0":0,"k1":0.002,"k2":0.1,"k3":0.5,"k4":0.3,"k5":0.5,
      "k6":0.4,"k7":0.0125,"c_half":"inf","units":{"k3":"per_day","k5":"per_day"}})");
  CHECK(params_from_json(j) == caffeine_params());

  auto bad = j;
  bad["units"]["k1"] = "per_week";
  CHECK_THROWS_WITH_AS(params_from_json(bad), doctest::Contains("k1"), Error);
  bad = j;
  bad.erase("k7");
  CHECK_THROWS_AS(params_from_json(bad), Error);
  bad = j;
  bad["c_half"] = "large";
  CHECK_THROWS_AS(params_from_json(bad), Error);
}

TEST_CASE("normalized JSON round-trips") {
  for (const auto& p : {caffeine_params(), nicotine_params()}) {
    const auto j = params_to_json(p);
    CHECK(j["units"]["k3"] == "per_min");
    CHECK(params_from_json(json::parse(j.dump())) == p);
  }
  CHECK(params_to_json(caffeine_params())["c_half"] == "inf");
}
