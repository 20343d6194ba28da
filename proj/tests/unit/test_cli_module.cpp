#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "errors.hpp"
#include "export.hpp"
#include "scenario.hpp"
#include "verify.hpp"

using namespace bds;
using nlohmann::json;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("time step text") {
    const auto a = scenario::parse_time_step("auto");
    CHECK_FALSE(a.fixed.has_value());
    CHECK(a.theta == 0.5);
    CHECK(scenario::parse_time_step("auto:0.3").theta == 0.3);
    CHECK(scenario::parse_time_step("0.25").fixed == 0.25);
    CHECK(kind_of([] { scenario::parse_time_step("fast"); }) == ErrorKind::Config);
    CHECK(kind_of([] { scenario::parse_time_step("auto:1.5"); }) == ErrorKind::Param);
    CHECK(kind_of([] { scenario::parse_time_step("-1"); }) == ErrorKind::Param);
  }

  TEST_CASE("config round trip") {
    const json in = {{"family", "qmeixner"},
                     {"params", {{"b", 0.5}, {"c", 2.0}, {"q", 0.5}}},
                     {"set", "minus"},
                     {"t_S", "auto:0.3"},
                     {"lattice_cutoff", 40},
                     {"epsilon_tail", 1e-10},
                     {"seed", 17}};
    const auto c = scenario::from_json(in);
    CHECK(c.set == catalog::SetTag::Minus);
    CHECK(c.lattice_cutoff == 40);
    CHECK(c.seed == 17);
    const json out = scenario::to_json(c);
    CHECK(scenario::to_json(scenario::from_json(out)) == out);
    CHECK(out.at("t_S") == "auto:0.3");
  }

  TEST_CASE("config errors") {
    CHECK(kind_of([] { scenario::from_json({{"family", "krawtchouk"}, {"colour", 1}}); }) == ErrorKind::Config);
    CHECK(kind_of([] { scenario::from_json({{"params", {{"p", 0.5}}}}); }) == ErrorKind::Config);
    CHECK(kind_of([] { scenario::from_json({{"family", "krawtchouk"}, {"set", "plus"}}); }) == ErrorKind::Config);
    CHECK(kind_of([] { scenario::from_json(json::array()); }) == ErrorKind::Config);
    const auto unknown = scenario::from_json({{"family", "meixner"}, {"params", {{"b", 0.5}}}});
    CHECK(kind_of([&] { scenario::family(unknown); }) == ErrorKind::Param);
    const auto minus = scenario::from_json({{"family", "krawtchouk"}, {"params", {{"p", 0.5}}}, {"N", 3}, {"set", "minus"}});
    CHECK(kind_of([&] { scenario::family(minus); }) == ErrorKind::InvolutionUndefined);
  }

  TEST_CASE("solve through a config") {
    const auto c = scenario::from_json({{"family", "krawtchouk"}, {"params", {{"p", 0.5}}}, {"N", 2}});
    const auto basis = scenario::solve(c);
    CHECK(basis.ops.pi.values[1] == doctest::Approx(0.5));
  }

  TEST_CASE("number formatting round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 0.25, -2.5e17}) CHECK(std::stod(io::format_number(v)) == v);
    CHECK(io::format_number(0.25) == "0.25");
    CHECK(io::number_json(std::numeric_limits<double>::infinity()).is_string());
  }

  TEST_CASE("CSV rendering and reading") {
    chain::Distribution d;
    d.values = {0.25, 0.5, 0.25};
    const std::string csv = io::distribution_csv(d);
    CHECK(csv.rfind("x,", 0) == 0);
    const auto path = (std::filesystem::temp_directory_path() / "bds_unit_dist.csv").string();
    io::write_file(path, csv);
    const auto back = io::read_distribution_csv(path, 3);
    CHECK(back.values == d.values);
    std::filesystem::remove(path);
    CHECK(kind_of([] { io::read_file("/nonexistent/bds.csv"); }) == ErrorKind::Io);
    CHECK(io::matrix_csv(Matrix::identity(2)).rfind("x,0,1\n", 0) == 0);
  }

  TEST_CASE("verify suites") {
    const auto c = scenario::from_json({{"family", "krawtchouk"}, {"params", {{"p", 0.5}}}, {"N", 8}});
    const auto basis = scenario::solve(c);
    CHECK(verify::run(basis, {}).passed());
    verify::VerifyOptions bad;
    bad.corrupt_dn2 = 1.5;
    const auto report = verify::run(basis, bad);
    CHECK_FALSE(report.passed());
    CHECK_FALSE(report.failing().empty());

    const auto m = scenario::from_json({{"family", "qmeixner"}, {"params", {{"b", 0.5}, {"c", 2.0}, {"q", 0.5}}}});
    verify::VerifyOptions full;
    full.level = verify::Level::Full;
    full.samples = 50000;
    const auto r = verify::run(scenario::solve(m), full);
    for (const auto& check : r.checks) {
      CAPTURE(check.name);
      CHECK(check.passed);
    }
    CHECK(r.passed());
  }
}
