#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmetro/qmetro.h"

namespace {

int report(qm_status s) {
  std::cerr << "qmetro: " << qm_last_error() << "\n";
  return qm_exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probe/ancilla thermometry experiments"};
  app.set_version_flag("--version", std::string(qm_version()));

  std::string experiment;
  std::string config_path;
  std::optional<std::string> out;
  std::optional<long> threads;
  std::vector<std::string> params;
  bool echo = false;

  app.add_option("experiment", experiment,
                 "evolve | qfi | nonmarkov | steady | fi-compare | coherence | sweep")
      ->required();
  app.add_option("-c,--config", config_path, "JSON configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("-o,--out", out, "CSV output path (summary goes next to it)");
  app.add_option("-t,--threads", threads, "worker threads (default: QMETRO_THREADS or 1)")
      ->check(CLI::Range(1L, 1024L));
  app.add_option("-p,--param", params, "override key=value, applied after the file")
      ->allow_extra_args(false);
  app.add_flag("--echo", echo, "print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "qmetro: cannot read " << config_path << "\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<const char*> overrides;
  for (const auto& p : params) overrides.push_back(p.c_str());

  qm_config* config = nullptr;
  if (qm_status s = qm_config_create(text.c_str(), experiment.c_str(), overrides.data(),
                                     overrides.size(), &config);
      s != QM_OK)
    return report(s);

  if (echo) {
    char* resolved = nullptr;
    const qm_status s = qm_config_echo(config, &resolved);
    qm_config_destroy(config);
    if (s != QM_OK) return report(s);
    std::cout << resolved << "\n";
    qm_string_free(resolved);
    return 0;
  }

  unsigned n_threads = 1;
  if (qm_status s = qm_resolve_threads(threads.value_or(0), &n_threads); s != QM_OK) {
    qm_config_destroy(config);
    return report(s);
  }

  char* summary = nullptr;
  const qm_status s = qm_run(config, n_threads, out ? out->c_str() : nullptr, &summary);
  qm_config_destroy(config);
  if (s != QM_OK) return report(s);
  std::cout << "summary: " << summary << "\n";
  qm_string_free(summary);
  return 0;
}
