// Command-line front end. Talks to the simulator only through the C API.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cptclone/cptclone.h"

namespace {

struct ConfigDeleter {
  void operator()(cpt_config* c) const { cpt_config_free(c); }
};
using ConfigPtr = std::unique_ptr<cpt_config, ConfigDeleter>;

int report(cpt_status status) {
  if (status == CPT_OK) return 0;
  std::fprintf(stderr, "cptclone: %s: %s\n", cpt_status_string(status), cpt_last_error());
  return status == CPT_E_PARSE || status == CPT_E_INVALID_ARGUMENT ? 2 : 1;
}

ConfigPtr load(const std::string& path, cpt_status& status) {
  cpt_config* raw = nullptr;
  status = cpt_config_load(path.c_str(), &raw);
  return ConfigPtr(raw);
}

const char* c_str_or_null(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

int progress(size_t done, size_t total, double z, void*) {
  if (done == total || done % 100 == 0) std::fprintf(stderr, "\rstep %zu/%zu  z = %.4f cm", done, total, z);
  if (done == total) std::fputc('\n', stderr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent-population-trapping image cloning simulator"};
  app.set_version_flag("--version", std::string(cpt_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;

  auto* scan = app.add_subcommand("chi-scan", "susceptibility along a transverse line of the input beams");
  scan->add_option("--config", config_path, "run configuration")->required()->check(CLI::ExistingFile);
  scan->add_option("--out", out_dir, "output directory");
  std::optional<std::string> axis;
  std::optional<double> fixed;
  scan->add_option("--axis", axis, "scan axis")->check(CLI::IsMember({"x", "y"}));
  scan->add_option("--fixed", fixed, "coordinate on the other axis [cm]");

  auto* prop = app.add_subcommand("propagate", "propagate both beams and write snapshots");
  prop->add_option("--config", config_path, "run configuration")->required()->check(CLI::ExistingFile);
  prop->add_option("--out", out_dir, "output directory");
  std::optional<double> every;
  std::optional<std::string> scheme;
  prop->add_option("--snapshot-every", every, "snapshot interval [cm]")->check(CLI::PositiveNumber);
  prop->add_option("--scheme", scheme, "splitting scheme")->check(CLI::IsMember({"strang2", "yoshida4"}));
  bool quiet = false;
  prop->add_flag("-q,--quiet", quiet, "no progress output");

  auto* analyze = app.add_subcommand("analyze", "recompute metrics from a run directory");
  std::string run_dir;
  analyze->add_option("run_dir", run_dir, "directory written by propagate")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--out", out_dir, "output directory (default: the run directory)");
  std::optional<std::uint64_t> seed;
  analyze->add_option("--seed", seed, "seed for the noise-robustness check");

  CLI11_PARSE(app, argc, argv);

  if (*analyze) {
    const auto status = cpt_analyze(run_dir.c_str(), c_str_or_null(out_dir), seed.has_value(), seed.value_or(0));
    return report(status);
  }

  cpt_status status = CPT_OK;
  auto config = load(config_path, status);
  if (status != CPT_OK) return report(status);

  if (*scan) {
    if (axis || fixed) {
      char current_axis = 'x';
      double current_fixed = 0.0;
      if ((status = cpt_config_get_scan(config.get(), &current_axis, &current_fixed)) != CPT_OK) return report(status);
      status = cpt_config_set_scan(config.get(), axis ? (*axis)[0] : current_axis, fixed.value_or(current_fixed));
      if (status != CPT_OK) return report(status);
    }
    char* path = nullptr;
    status = cpt_chi_scan(config.get(), c_str_or_null(out_dir), &path);
    if (status == CPT_OK) {
      std::printf("%s\n", path);
      cpt_string_free(path);
    }
    return report(status);
  }

  if (every && (status = cpt_config_set_snapshot_every(config.get(), *every)) != CPT_OK) return report(status);
  if (scheme && (status = cpt_config_set_scheme(config.get(), scheme->c_str())) != CPT_OK) return report(status);
  char* dir = nullptr;
  if ((status = cpt_resolve_output_dir(config.get(), c_str_or_null(out_dir), &dir)) != CPT_OK) return report(status);
  const std::string resolved(dir);
  cpt_string_free(dir);
  status = cpt_propagate(config.get(), resolved.c_str(), quiet ? nullptr : progress, nullptr);
  if (status == CPT_OK) std::printf("%s\n", resolved.c_str());
  return report(status);
}
