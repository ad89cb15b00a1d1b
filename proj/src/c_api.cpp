#include "dtem/dtem.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "dtem/error.hpp"
#include "dtem/log.hpp"
#include "dtem/numerics.hpp"
#include "dtem/pipeline.hpp"
#include "dtem/selftest.hpp"

struct dtem_config {
  dtem::KeyValueFile kv;
  dtem::RunConfig config;
};

struct dtem_report {
  bool has_truth = false;
  dtem::KeyValueFile values;
  std::string text;
};

namespace {

thread_local std::string last_error;

dtem_status to_status(dtem::ErrorCode c) { return static_cast<dtem_status>(static_cast<int>(c)); }

template <typename F>
dtem_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return DTEM_OK;
  } catch (const dtem::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return DTEM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DTEM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return DTEM_ERR_INTERNAL;
  }
}

void require_ptr(const void* p, const char* what) {
  if (!p) dtem::fail(dtem::ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

std::vector<std::filesystem::path> paths(const char* const* list, size_t count, const char* what) {
  if (count) require_ptr(list, what);
  std::vector<std::filesystem::path> out;
  for (size_t i = 0; i < count; ++i) {
    require_ptr(list[i], what);
    out.emplace_back(list[i]);
  }
  return out;
}

}  // namespace

extern "C" {

const char* dtem_version(void) { return dtem::kVersion; }

const char* dtem_status_name(dtem_status status) {
  if (status < DTEM_OK || status > DTEM_ERR_INTERNAL) return "unknown";
  return dtem::error_code_name(static_cast<dtem::ErrorCode>(status));
}

const char* dtem_last_error(void) { return last_error.c_str(); }

void dtem_set_warning_callback(dtem_line_fn fn, void* user) {
  if (!fn) {
    dtem::set_warning_handler([](const std::string& m) { std::fprintf(stderr, "warning: %s\n", m.c_str()); });
    return;
  }
  dtem::set_warning_handler([fn, user](const std::string& m) { fn(m.c_str(), user); });
}

dtem_status dtem_electron_wavelength(double volts, double* lambda) {
  return guarded([&] {
    require_ptr(lambda, "lambda");
    *lambda = dtem::electron_wavelength(volts);
  });
}

dtem_status dtem_fresnel_number(double a, double lambda, double thickness, double* number) {
  return guarded([&] {
    require_ptr(number, "number");
    *number = dtem::fresnel_number(a, lambda, thickness);
  });
}

dtem_status dtem_config_new(dtem_config** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = new dtem_config{};
  });
}

dtem_status dtem_config_load(const char* path, dtem_config** out) {
  return guarded([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    auto c = std::make_unique<dtem_config>();
    c->kv = dtem::KeyValueFile::load(path);
    c->config = dtem::parse_run_config(c->kv);
    *out = c.release();
  });
}

dtem_status dtem_config_set(dtem_config* config, const char* key, const char* value) {
  return guarded([&] {
    require_ptr(config, "config");
    require_ptr(key, "key");
    require_ptr(value, "value");
    dtem::KeyValueFile kv = config->kv;
    kv.set(key, std::string(value));
    dtem::RunConfig parsed = dtem::parse_run_config(kv);
    config->kv = std::move(kv);
    config->config = std::move(parsed);
  });
}

dtem_status dtem_config_set_many(dtem_config* config, const char* const* keys, const char* const* values,
                                 size_t count) {
  return guarded([&] {
    require_ptr(config, "config");
    if (count) {
      require_ptr(keys, "keys");
      require_ptr(values, "values");
    }
    dtem::KeyValueFile kv = config->kv;
    for (size_t i = 0; i < count; ++i) {
      require_ptr(keys[i], "key");
      require_ptr(values[i], "value");
      kv.set(keys[i], std::string(values[i]));
    }
    dtem::RunConfig parsed = dtem::parse_run_config(kv);
    config->kv = std::move(kv);
    config->config = std::move(parsed);
  });
}

dtem_status dtem_config_get(const dtem_config* config, const char* key, char* buf, size_t size, size_t* needed) {
  return guarded([&] {
    require_ptr(config, "config");
    require_ptr(key, "key");
    const auto& known = dtem::run_config_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
      dtem::fail(dtem::ErrorCode::invalid_argument, std::string("unknown configuration key '") + key + "'");
    const dtem::KeyValueFile kv = config->config.to_key_values();
    const std::string value = kv.get_or(key, "");
    if (needed) *needed = value.size() + 1;
    if (buf && size) {
      const size_t n = std::min(size - 1, value.size());
      std::memcpy(buf, value.data(), n);
      buf[n] = '\0';
    }
  });
}

dtem_status dtem_config_save(const dtem_config* config, const char* path) {
  return guarded([&] {
    require_ptr(config, "config");
    require_ptr(path, "path");
    config->config.to_key_values().save(path);
  });
}

void dtem_config_free(dtem_config* config) { delete config; }

size_t dtem_config_key_count(void) { return dtem::run_config_keys().size(); }

const char* dtem_config_key(size_t index) {
  const auto& keys = dtem::run_config_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

dtem_status dtem_simulate(const dtem_config* config, const char* out_dir, size_t* sets_written) {
  return guarded([&] {
    require_ptr(config, "config");
    const std::filesystem::path out = out_dir ? std::filesystem::path(out_dir) : config->config.output;
    const auto sets = dtem::run_simulate(config->config, out);
    if (sets_written) *sets_written = sets.size();
  });
}

dtem_status dtem_reconstruct(const dtem_config* config, const char* const* inputs, size_t count, const char* out_dir,
                             const char* truth, dtem_report** report) {
  return guarded([&] {
    require_ptr(config, "config");
    const auto in = paths(inputs, count, "inputs");
    const std::filesystem::path out = out_dir ? std::filesystem::path(out_dir) : config->config.output;
    const auto outcome = dtem::run_reconstruct(config->config, in, out, truth ? truth : "");
    if (!report) return;
    auto r = std::make_unique<dtem_report>();
    r->has_truth = outcome.has_report;
    for (const auto& k : outcome.volume.info.keys()) r->values.set(k, outcome.volume.info.get(k));
    std::ostringstream text;
    text << "method " << outcome.volume.method << "\n";
    for (const auto& k : outcome.volume.info.keys()) text << k << " = " << outcome.volume.info.get(k) << "\n";
    if (outcome.has_report) {
      const dtem::KeyValueFile kv = dtem::report_key_values(outcome.report);
      for (const auto& k : kv.keys()) r->values.set(k, kv.get(k));
      double min_peak = NAN;
      for (double v : outcome.report.site_peaks)
        if (std::isnan(min_peak) || v < min_peak) min_peak = v;
      r->values.set("site_count", static_cast<long long>(outcome.report.site_peaks.size()));
      if (!outcome.report.site_peaks.empty()) r->values.set("min_site_peak", min_peak);
      dtem::write_report_text(text, "reconstruction vs ground truth", outcome.report);
    }
    r->text = text.str();
    *report = r.release();
  });
}

int dtem_report_has_truth(const dtem_report* report) { return report && report->has_truth ? 1 : 0; }

dtem_status dtem_report_get(const dtem_report* report, const char* name, double* value) {
  return guarded([&] {
    require_ptr(report, "report");
    require_ptr(name, "name");
    require_ptr(value, "value");
    if (!report->values.contains(name))
      dtem::fail(dtem::ErrorCode::invalid_argument, std::string("report has no value '") + name + "'");
    *value = report->values.get_double(name);
  });
}

const char* dtem_report_text(const dtem_report* report) { return report ? report->text.c_str() : ""; }

void dtem_report_free(dtem_report* report) { delete report; }

dtem_status dtem_figures(const char* const* run_dirs, size_t count, const char* out_dir, size_t* files_written) {
  return guarded([&] {
    require_ptr(out_dir, "out_dir");
    const auto files = dtem::run_figures(paths(run_dirs, count, "run_dirs"), out_dir);
    if (files_written) *files_written = files.size();
  });
}

dtem_status dtem_selftest(dtem_line_fn fn, void* user, int* failures) {
  return guarded([&] {
    const int n = dtem::run_selftest([&](const std::string& line) {
      if (fn) fn(line.c_str(), user);
    });
    if (failures) *failures = n;
  });
}

}  // extern "C"
