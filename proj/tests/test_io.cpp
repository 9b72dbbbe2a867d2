#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "aerogrid/io.hpp"
#include "doctest.h"

using namespace aerogrid;

namespace {

GridSpec small_spec(int width, int height) {
  GridSpec spec;
  spec.width = width;
  spec.height = height;
  return spec;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("fmt_double emits shortest round-trip text") {
  CHECK(io::fmt_double(0.0) == "0");
  CHECK(io::fmt_double(1.0) == "1");
  CHECK(io::fmt_double(-2.5) == "-2.5");
  CHECK(io::fmt_double(0.1) == "0.1");

  // round-trip is exact even for awkward values
  for (double v : {1.0 / 3.0, 3.141592653589793, 1e-17, 123456.789,
                   std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max()}) {
    CHECK(io::parse_double(io::fmt_double(v), "t") == v);
    CHECK(io::parse_double(io::fmt_double(-v), "t") == -v);
  }

  CHECK_THROWS_AS(io::fmt_double(std::nan("")), NumericError);
  CHECK_THROWS_AS(io::fmt_double(std::numeric_limits<double>::infinity()),
                  NumericError);
}

TEST_CASE("number parsing consumes the whole token") {
  CHECK(io::parse_double("2.5", "t") == 2.5);
  CHECK(io::parse_double("-0.125", "t") == -0.125);
  CHECK(io::parse_int("42", "t") == 42);
  CHECK(io::parse_int("-7", "t") == -7);

  CHECK_THROWS_AS(io::parse_double("", "t"), ValidationError);
  CHECK_THROWS_AS(io::parse_double("1.2x", "t"), ValidationError);
  CHECK_THROWS_AS(io::parse_double("abc", "t"), ValidationError);
  CHECK_THROWS_AS(io::parse_int("1.5", "t"), ValidationError);
  CHECK_THROWS_AS(io::parse_int(" 3", "t"), ValidationError);

  // context string is carried into the message
  CHECK_THROWS_WITH_AS(io::parse_double("zz", "stations.csv:4"),
                       "stations.csv:4: cannot parse number from 'zz'",
                       ValidationError);
}

TEST_CASE("csv line splitting keeps empty fields and strips CR") {
  CHECK(io::split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(io::split_csv_line("") == std::vector<std::string>{""});
  CHECK(io::split_csv_line(",") == std::vector<std::string>{"", ""});
  CHECK(io::split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
  CHECK(io::split_csv_line("a,b\r") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("field CSV round trip preserves every value bit for bit") {
  auto spec = small_spec(3, 2);
  ScalarField field(spec, Channel::AQI,
                    {0.0, 17.25, 1.0 / 3.0 * 300.0, 500.0, 0.1, 499.999});
  std::string text = io::field_to_csv(field);

  // header names the channel and dimensions
  CHECK(text.rfind("channel,width,height\nAQI,3,2\n", 0) == 0);

  ScalarField back = io::field_from_csv(text, "mem");
  REQUIRE(back.spec().width == 3);
  REQUIRE(back.spec().height == 2);
  CHECK(back.channel() == Channel::AQI);
  for (std::size_t i = 0; i < back.values().size(); ++i) {
    CHECK(back.values()[i] == field.values()[i]);
  }
}

TEST_CASE("field CSV honors the caller's grid geography") {
  auto spec = small_spec(2, 2);
  spec.lat_min = 10.0;
  spec.lat_max = 11.0;
  spec.lon_min = 20.0;
  spec.lon_max = 21.0;
  ScalarField field(spec, Channel::Population, {0.0, 0.25, 0.5, 1.0});
  std::string text = io::field_to_csv(field);

  // without a spec the default bounding box is assumed
  ScalarField plain = io::field_from_csv(text, "mem");
  CHECK(plain.spec().lat_min != 10.0);

  ScalarField located = io::field_from_csv(text, "mem", spec);
  CHECK(located.spec().lat_min == 10.0);
  CHECK(located.spec().lon_max == 21.0);

  auto wrong = small_spec(3, 2);
  CHECK_THROWS_AS(io::field_from_csv(text, "mem", wrong), ValidationError);
}

TEST_CASE("malformed field CSV reports the offending line") {
  CHECK_THROWS_WITH_AS(io::field_from_csv("width,height\n", "f.csv"),
                       "f.csv:1: expected header 'channel,width,height'",
                       ValidationError);
  CHECK_THROWS_AS(io::field_from_csv("channel,width,height\nAQI,2\n", "f.csv"),
                  ValidationError);
  // truncated row block
  CHECK_THROWS_WITH_AS(
      io::field_from_csv("channel,width,height\nAQI,2,2\n0,0\n", "f.csv"),
      "f.csv: truncated field CSV at line 4", ValidationError);
  // wrong number of cells in a row
  CHECK_THROWS_WITH_AS(
      io::field_from_csv("channel,width,height\nAQI,2,2\n0,0,0\n0,0\n", "f.csv"),
      "f.csv:3: expected 2 values, got 3", ValidationError);
  // non-numeric cell names its line
  CHECK_THROWS_WITH_AS(
      io::field_from_csv("channel,width,height\nAQI,2,2\n0,0\n0,oops\n", "f.csv"),
      "f.csv:4: cannot parse number from 'oops'", ValidationError);
  // unknown channel name
  CHECK_THROWS_AS(
      io::field_from_csv("channel,width,height\nSmog,2,2\n0,0\n0,0\n", "f.csv"),
      DomainError);
  // values outside the channel's range are rejected on construction
  CHECK_THROWS_AS(
      io::field_from_csv("channel,width,height\nAQI,2,2\n0,0\n0,600\n", "f.csv"),
      ValidationError);
}

TEST_CASE("field file io round trips through disk") {
  auto spec = small_spec(2, 2);
  ScalarField field(spec, Channel::Green, {0.0, 0.5, 0.75, 1.0});
  std::string path = temp_path("aerogrid_io_test_field.csv");
  io::write_field(field, path);
  ScalarField back = io::read_field(path, spec);
  CHECK(back.values() == field.values());
  CHECK(back.channel() == Channel::Green);
  std::remove(path.c_str());

  CHECK_THROWS_AS(io::read_field(temp_path("aerogrid_io_test_missing.csv")),
                  IoError);
}

TEST_CASE("text file io reports unreadable paths") {
  std::string path = temp_path("aerogrid_io_test_text.txt");
  io::write_text_file(path, "alpha\nbeta\n");
  CHECK(io::read_text_file(path) == "alpha\nbeta\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(io::read_text_file(path), IoError);
}
