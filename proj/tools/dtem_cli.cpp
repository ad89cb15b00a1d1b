// Command-line front end. Talks to the library only through dtem.h.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dtem/dtem.h"

namespace {

struct CliError {
  dtem_status status;
};

void check(dtem_status s) {
  if (s != DTEM_OK) throw CliError{s};
}

void print_line(const char* line, void*) { std::printf("%s\n", line); }

std::string flag_for(const std::string& key) {
  std::string name = key;
  for (char& c : name)
    if (c == '.' || c == '_') c = '-';
  return "--" + name;
}

// Config file plus per-key flags shared by simulate and reconstruct.
struct ConfigOptions {
  std::string file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "Run configuration file (key = value)")->check(CLI::ExistingFile);
    for (size_t i = 0; i < dtem_config_key_count(); ++i) {
      const std::string key = dtem_config_key(i);
      app->add_option(flag_for(key), values[key], "Sets " + key);
    }
  }

  dtem_config* build() const {
    dtem_config* cfg = nullptr;
    check(file.empty() ? dtem_config_new(&cfg) : dtem_config_load(file.c_str(), &cfg));
    std::vector<const char*> keys, vals;
    for (const auto& [k, v] : values)
      if (!v.empty()) {
        keys.push_back(k.c_str());
        vals.push_back(v.c_str());
      }
    const dtem_status s = dtem_config_set_many(cfg, keys.data(), vals.data(), keys.size());
    if (s != DTEM_OK) {
      dtem_config_free(cfg);
      throw CliError{s};
    }
    return cfg;
  }
};

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffraction tomography for TEM: simulation, reconstruction and figures"};
  app.set_version_flag("--version", std::string(dtem_version()));
  app.require_subcommand(1);

  ConfigOptions sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "Simulate projection sets for a phantom");
  sim_opts.attach(sim);
  std::string sim_print;
  sim->add_option("--print-config", sim_print, "Also write the effective configuration to this file");

  ConfigOptions rec_opts;
  CLI::App* rec = app.add_subcommand("reconstruct", "Reconstruct a volume from projection sets");
  rec_opts.attach(rec);
  std::vector<std::string> inputs;
  std::string truth;
  rec->add_option("--input,-i", inputs, "Projection-set directory (repeat for several defocus values)")
      ->required()
      ->check(CLI::ExistingDirectory);
  rec->add_option("--truth", truth, "Ground-truth phantom file for the error report")->check(CLI::ExistingFile);

  CLI::App* fig = app.add_subcommand("figures", "Render figures from simulation and reconstruction runs");
  std::vector<std::string> runs;
  std::string fig_out;
  fig->add_option("--run,-r", runs, "Run directory (repeatable)")->required()->check(CLI::ExistingDirectory);
  fig->add_option("--output,-o", fig_out, "Output directory")->required();

  app.add_subcommand("selftest", "Quick numerical checks of this build");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      dtem_config* cfg = sim_opts.build();
      size_t sets = 0;
      dtem_status s = dtem_simulate(cfg, nullptr, &sets);
      if (s == DTEM_OK && !sim_print.empty()) s = dtem_config_save(cfg, sim_print.c_str());
      char out[4096];
      dtem_config_get(cfg, "run.output", out, sizeof out, nullptr);
      dtem_config_free(cfg);
      check(s);
      std::printf("wrote %zu projection set(s) under %s\n", sets, out);
    } else if (*rec) {
      dtem_config* cfg = rec_opts.build();
      const auto in = c_strings(inputs);
      dtem_report* report = nullptr;
      const dtem_status s =
          dtem_reconstruct(cfg, in.data(), in.size(), nullptr, truth.empty() ? nullptr : truth.c_str(), &report);
      dtem_config_free(cfg);
      check(s);
      std::printf("%s", dtem_report_text(report));
      dtem_report_free(report);
    } else if (*fig) {
      const auto dirs = c_strings(runs);
      size_t files = 0;
      check(dtem_figures(dirs.data(), dirs.size(), fig_out.c_str(), &files));
      std::printf("wrote %zu file(s) to %s\n", files, fig_out.c_str());
    } else {
      int failures = 0;
      check(dtem_selftest(print_line, nullptr, &failures));
      std::printf("%d failure(s)\n", failures);
      return failures == 0 ? 0 : 1;
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "error[%s]: %s\n", dtem_status_name(e.status), dtem_last_error());
    return static_cast<int>(e.status);
  }
  return 0;
}
