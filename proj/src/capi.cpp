#include "chevrep/chevrep.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "chevrep/app.hpp"
#include "chevrep/error.hpp"

struct chevrep_config {
  nlohmann::json cfg;
};

struct chevrep_report {
  nlohmann::json env;
};

namespace {

thread_local std::string g_last_error;

chevrep_status set_error(chevrep_status s, const std::string& what) {
  g_last_error = what;
  return s;
}

template <class Fn>
chevrep_status guard(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return CHEVREP_OK;
  } catch (const chevrep::Error& e) {
    return set_error(static_cast<chevrep_status>(static_cast<int>(e.code())), e.what());
  } catch (const nlohmann::json::parse_error& e) {
    return set_error(CHEVREP_CONFIG, std::string("JSON parse error: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(CHEVREP_CONFIG, std::string("JSON error: ") + e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CHEVREP_BUDGET, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CHEVREP_INTERNAL, e.what());
  } catch (...) {
    return set_error(CHEVREP_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) chevrep::fail(chevrep::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* chevrep_version(void) { return chevrep::app::kToolVersion; }

const char* chevrep_last_error(void) { return g_last_error.c_str(); }

const char* chevrep_status_name(chevrep_status s) {
  switch (s) {
    case CHEVREP_OK: return "ok";
    case CHEVREP_INVALID_ARGUMENT: return "invalid argument";
    case CHEVREP_CONFIG: return "config error";
    case CHEVREP_BUDGET: return "budget exceeded";
    case CHEVREP_PRECONDITION: return "precondition failed";
    case CHEVREP_IO: return "I/O error";
    case CHEVREP_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void chevrep_string_free(char* s) { std::free(s); }

chevrep_status chevrep_config_parse(const char* json_text, chevrep_config** out) {
  return guard([&] {
    need(json_text, "config text");
    need(out, "output pointer");
    *out = nullptr;
    auto raw = nlohmann::json::parse(json_text);
    *out = new chevrep_config{chevrep::app::normalize_config(raw)};
  });
}

void chevrep_config_free(chevrep_config* cfg) { delete cfg; }

chevrep_status chevrep_config_json(const chevrep_config* cfg, char** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "output pointer");
    *out = dup_string(cfg->cfg.dump(2) + "\n");
  });
}

int chevrep_config_dry_run(const chevrep_config* cfg) { return cfg && cfg->cfg.value("dry_run", false) ? 1 : 0; }

chevrep_status chevrep_plan(const chevrep_config* cfg, chevrep_report** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "output pointer");
    *out = new chevrep_report{chevrep::app::plan(cfg->cfg)};
  });
}

chevrep_status chevrep_run(const chevrep_config* cfg, chevrep_report** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "output pointer");
    *out = nullptr;
    *out = new chevrep_report{chevrep::app::run(cfg->cfg)};
  });
}

void chevrep_report_free(chevrep_report* rep) { delete rep; }

chevrep_status chevrep_report_render(const chevrep_report* rep, chevrep_format fmt, char** out) {
  return guard([&] {
    need(rep, "report");
    need(out, "output pointer");
    *out = dup_string(chevrep::app::render(rep->env, fmt == CHEVREP_FORMAT_TABLE ? "table" : "json"));
  });
}

chevrep_status chevrep_report_parse(const char* json_text, chevrep_report** out) {
  return guard([&] {
    need(json_text, "report text");
    need(out, "output pointer");
    *out = new chevrep_report{nlohmann::json::parse(json_text)};
  });
}

chevrep_status chevrep_run_json(const char* config_json, char** out) {
  return guard([&] {
    need(config_json, "config text");
    need(out, "output pointer");
    const auto cfg = chevrep::app::normalize_config(nlohmann::json::parse(config_json));
    const auto env = cfg.value("dry_run", false) ? chevrep::app::plan(cfg) : chevrep::app::run(cfg);
    *out = dup_string(chevrep::app::render(env, cfg.at("format").get<std::string>()));
  });
}

}  // extern "C"
