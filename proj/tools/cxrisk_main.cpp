// cxrisk command-line pipeline. Thin wrapper over the C API: every subcommand
// assembles a config and dispatches one cxrisk_run_* call.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cxrisk.h"

namespace {

struct ConfigDeleter {
  void operator()(cxrisk_config* cfg) const { cxrisk_config_destroy(cfg); }
};
using ConfigPtr = std::unique_ptr<cxrisk_config, ConfigDeleter>;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::string seed;
  std::string horizon;
  std::string top_k;
  std::vector<std::string> overrides;  // key=value pairs
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value configuration file");
  cmd->add_option("--out-dir", opts.out_dir, "output directory (default: out)");
  cmd->add_option("--seed", opts.seed, "global seed");
  cmd->add_option("--horizon", opts.horizon, "evaluation horizon in days");
  cmd->add_option("--top-k", opts.top_k, "entries in the report top list");
  cmd->add_option("--set", opts.overrides, "extra key=value override (repeatable)")
      ->type_name("KEY=VALUE");
}

int fail(const char* what, cxrisk_status st) {
  std::fprintf(stderr, "cxrisk: %s: %s\n", what, cxrisk_last_error());
  return st == CXRISK_PARTIAL ? 2 : 1;
}

ConfigPtr build_config(const CommonOptions& opts, bool& ok, int& exit_code) {
  ok = false;
  cxrisk_config* raw = nullptr;
  if (cxrisk_config_create(&raw) != CXRISK_OK) {
    exit_code = fail("config", CXRISK_ERROR);
    return nullptr;
  }
  ConfigPtr cfg(raw);
  if (!opts.config_path.empty()) {
    const cxrisk_status st = cxrisk_config_load_file(cfg.get(), opts.config_path.c_str());
    if (st != CXRISK_OK) {
      exit_code = fail("config", st);
      return nullptr;
    }
  }
  // flags win over the file
  const std::pair<const char*, const std::string*> flags[] = {
      {"out_dir", &opts.out_dir}, {"seed", &opts.seed},
      {"horizon", &opts.horizon}, {"top_k", &opts.top_k}};
  for (const auto& [key, value] : flags) {
    if (value->empty()) continue;
    if (cxrisk_config_set(cfg.get(), key, value->c_str()) != CXRISK_OK) {
      exit_code = fail("config", CXRISK_ERR_INVALID);
      return nullptr;
    }
  }
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "cxrisk: --set expects KEY=VALUE, got '%s'\n", kv.c_str());
      exit_code = 1;
      return nullptr;
    }
    if (cxrisk_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) !=
        CXRISK_OK) {
      exit_code = fail("config", CXRISK_ERR_INVALID);
      return nullptr;
    }
  }
  ok = true;
  return cfg;
}

int dispatch(const char* name, cxrisk_status (*run)(const cxrisk_config*),
             const CommonOptions& opts) {
  bool ok = false;
  int exit_code = 1;
  const ConfigPtr cfg = build_config(opts, ok, exit_code);
  if (!ok) return exit_code;
  const cxrisk_status st = run(cfg.get());
  if (st == CXRISK_OK) {
    std::printf("cxrisk %s: ok\n", name);
    return 0;
  }
  if (st == CXRISK_PARTIAL) {
    std::fprintf(stderr, "cxrisk %s: partial (%s)\n", name, cxrisk_last_error());
    return 2;
  }
  return fail(name, st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survival prognosis pipeline over pooled feature maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cxrisk_version()));

  struct Command {
    const char* name;
    const char* help;
    cxrisk_status (*run)(const cxrisk_config*);
  };
  const Command commands[] = {
      {"synth", "generate a synthetic cohort (features, boxes, labels)", cxrisk_run_synth},
      {"train", "fit the risk head (and optionally the region completer)", cxrisk_run_train},
      {"predict", "write per-subject risk scores", cxrisk_run_predict},
      {"cam", "export risk activation heatmaps", cxrisk_run_cam},
      {"complete", "fill in undetected region boxes", cxrisk_run_complete},
      {"report", "write ranked per-region risk reports", cxrisk_run_report},
      {"evaluate", "survival metrics for predictions against labels", cxrisk_run_evaluate},
  };

  std::vector<std::pair<const Command*, CommonOptions>> parsed;
  parsed.reserve(std::size(commands));
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    parsed.emplace_back(&cmd, CommonOptions{});
  }
  // options must bind to stable storage, so wire them up after the vector
  // stopped growing
  for (std::size_t i = 0; i < parsed.size(); ++i)
    add_common_options(app.get_subcommand(parsed[i].first->name), parsed[i].second);

  CLI11_PARSE(app, argc, argv);

  for (auto& [cmd, opts] : parsed) {
    if (app.get_subcommand(cmd->name)->parsed()) return dispatch(cmd->name, cmd->run, opts);
  }
  std::fprintf(stderr, "cxrisk: no subcommand\n");
  return 1;
}
