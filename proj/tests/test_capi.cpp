#include <cstring>
#include <string>

#include "chevrep/chevrep.h"
#include "doctest.h"

namespace {

std::string take(char* s) {
  std::string out(s);
  chevrep_string_free(s);
  return out;
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("version and status names") {
    CHECK(std::string(chevrep_version()) == "1.0.0");
    CHECK(std::string(chevrep_status_name(CHEVREP_BUDGET)) == "budget exceeded");
  }

  TEST_CASE("null arguments") {
    chevrep_config* c = nullptr;
    CHECK(chevrep_config_parse(nullptr, &c) == CHEVREP_INVALID_ARGUMENT);
    CHECK(std::strlen(chevrep_last_error()) > 0);
    char* out = nullptr;
    CHECK(chevrep_run_json(nullptr, &out) == CHEVREP_INVALID_ARGUMENT);
    CHECK(chevrep_report_render(nullptr, CHEVREP_FORMAT_JSON, &out) == CHEVREP_INVALID_ARGUMENT);
    CHECK(chevrep_config_dry_run(nullptr) == 0);
    chevrep_config_free(nullptr);
    chevrep_report_free(nullptr);
  }

  TEST_CASE("config errors") {
    chevrep_config* c = nullptr;
    CHECK(chevrep_config_parse("{not json", &c) == CHEVREP_CONFIG);
    CHECK(c == nullptr);
    CHECK(chevrep_config_parse("{\"command\":\"table\",\"extra\":1}", &c) == CHEVREP_CONFIG);
    CHECK(std::string(chevrep_last_error()).find("extra") != std::string::npos);
  }

  TEST_CASE("parse, run, render, reload") {
    chevrep_config* c = nullptr;
    REQUIRE(chevrep_config_parse("{\"command\":\"u-calc\",\"expression\":\"e*f\"}", &c) == CHEVREP_OK);
    CHECK(std::string(chevrep_last_error()).empty());
    char* cj = nullptr;
    REQUIRE(chevrep_config_json(c, &cj) == CHEVREP_OK);
    CHECK(take(cj).find("\"seed\": 1") != std::string::npos);
    CHECK(chevrep_config_dry_run(c) == 0);
    chevrep_report* r = nullptr;
    REQUIRE(chevrep_run(c, &r) == CHEVREP_OK);
    chevrep_config_free(c);
    char* text = nullptr;
    REQUIRE(chevrep_report_render(r, CHEVREP_FORMAT_JSON, &text) == CHEVREP_OK);
    const std::string js = take(text);
    CHECK(js.find("\"h + f.e\"") != std::string::npos);
    chevrep_report_free(r);
    REQUIRE(chevrep_report_parse(js.c_str(), &r) == CHEVREP_OK);
    REQUIRE(chevrep_report_render(r, CHEVREP_FORMAT_JSON, &text) == CHEVREP_OK);
    CHECK(take(text) == js);
    REQUIRE(chevrep_report_render(r, CHEVREP_FORMAT_TABLE, &text) == CHEVREP_OK);
    CHECK(take(text).find("U(L)") != std::string::npos);
    chevrep_report_free(r);
  }

  TEST_CASE("one-shot runs and budget status") {
    char* out = nullptr;
    REQUIRE(chevrep_run_json("{\"command\":\"probe\",\"dry_run\":true}", &out) == CHEVREP_OK);
    CHECK(take(out).find("\"dry_run\": true") != std::string::npos);
    CHECK(chevrep_run_json("{\"command\":\"verma\",\"rank\":3,\"lambda\":[[0,0,0]]}", &out) == CHEVREP_BUDGET);
    CHECK(chevrep_run_json("{\"command\":\"chop\",\"input\":\"/nonexistent/m.chvr\"}", &out) == CHEVREP_IO);
  }
}
