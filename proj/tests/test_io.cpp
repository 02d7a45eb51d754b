#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "l2field/csv.hpp"
#include "l2field/errors.hpp"
#include "l2field/json_io.hpp"

using namespace l2field;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "l2field_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("shortest round-trip doubles") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5e-12) == "-2.5e-12");
    for (double x : {M_PI, 1.0 / 3.0, 2.0 / 7.0 * 1e300, 5e-324}) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }

  TEST_CASE("identity gram csv") {
    CHECK(matrix_csv(Mat::Identity(2, 2)) == "c0,c1\n1,0\n0,1\n");
    const fs::path p = scratch("id.csv");
    emit_csv(p, Mat(Mat::Identity(2, 2)));
    CHECK(slurp(p) == "c0,c1\n1,0\n0,1\n");
  }

  TEST_CASE("empty report list gives a header-only file") {
    const std::string text = reports_csv(std::vector<Report>{});
    CHECK(text == "check,mode,max_abs_diff,tolerance,pass,verdict,seed\n");
  }

  TEST_CASE("report rows and quoting") {
    Report r;
    r.check = "a,b";
    r.mode = "say \"hi\"";
    r.max_abs_diff = 0.25;
    r.tolerance = 1e-10;
    r.seed = 7;
    r.set_pass(true);
    const std::string text = reports_csv(std::vector<Report>{r});
    CHECK(text == "check,mode,max_abs_diff,tolerance,pass,verdict,seed\n\"a,b\",\"say \"\"hi\"\"\",0.25,1e-10,true,pass,7\n");
    const CsvTable t = parse_csv(text);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "a,b");
    CHECK(t.rows[0][1] == "say \"hi\"");
  }

  TEST_CASE("paths csv") {
    SamplePaths p;
    p.values = Mat{{1.5, -2.0}, {0.0, 3.0}};
    p.design_size = 2;
    CHECK(paths_csv(p) == "path,p0,p1\n0,1.5,-2\n1,0,3\n");
  }

  TEST_CASE("unwritable path is an I/O error") {
    CHECK_THROWS_AS(write_text("/nonexistent-dir/x/y.csv", "a"), IoError);
    CHECK_THROWS_AS(read_csv("/nonexistent-dir/x/y.csv"), IoError);
  }

  TEST_CASE("json field helpers") {
    const json j = json::parse(R"({"H": 0.3, "n": 4, "flag": true, "name": "x", "v": [1, 2], "bad": "s"})");
    CHECK(require_number(j, "H", "cfg") == 0.3);
    CHECK_THROWS_AS(require_number(j, "missing", "cfg"), ArgumentError);
    CHECK_THROWS_AS(require_number(j, "bad", "cfg"), ArgumentError);
    CHECK(number_or(j, "missing", 2.0, "cfg") == 2.0);
    CHECK(uint_or(j, "n", 0, "cfg") == 4);
    CHECK(bool_or(j, "flag", false, "cfg"));
    CHECK(string_or(j, "name", "", "cfg") == "x");
    CHECK(vec_from_json(j["v"], "v") == Vec{{1.0, 2.0}});
    CHECK(vec_from_json(json(3.0), "v") == Vec{{3.0}});
  }

  TEST_CASE("kernel and space round trips") {
    const SpacePtr sp = space_from_json(json::parse(R"({"grid": {"dim": 1, "n": 4, "extent": 2}})"));
    CHECK(sp->size() == 4);
    const Kernel k = kernel_from_json(json::parse(R"({"family": "l2fbm", "H": 0.3})"), sp);
    CHECK(k.family() == Family::l2fbm);
    const Kernel k2 = kernel_from_json(kernel_to_json(Kernel::sheet({0.3, 0.7})));
    CHECK(k2.Hvec() == std::vector<double>{0.3, 0.7});
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"family": "levy"})")), ArgumentError);
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"family": "l2fbm", "H": 0.3})")), ArgumentError);
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"family": "nope", "H": 0.3})")), ArgumentError);
  }
}
