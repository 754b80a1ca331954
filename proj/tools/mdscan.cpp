// Command-line front end; talks to the library only through mdscan.h.
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mdscan/mdscan.h"

namespace {

struct RunArgs {
  std::string input;
  std::string response = "Y";
  unsigned k = 1;
  unsigned bins = 3;
  unsigned response_bins = 0;
  unsigned shifts = 0;
  double shift_magnitude = 0.25;
  std::string method = "fdr";
  double alpha = 0.1;
  unsigned workers = 0;
  std::uint64_t seed = 0;
  unsigned contrast = 0;
  std::string mode = "auto";
  std::string out = "-";
  std::string json_out;
  std::string pp_out;
  std::string export_selected;
  std::string manifest;
  bool progress = false;
};

struct GenerateArgs {
  std::string response = "sphere";
  std::uint64_t seed = 1;
  std::size_t n_objects = 5000;
  double noise = -1.0;
  double nuisance = -1.0;
  std::string out = "-";
  std::string manifest;
};

struct ScoreArgs {
  std::string report;
  std::string manifest;
  std::string out = "-";
};

struct FixtureArgs {
  std::string name;
  std::uint64_t seed = 1;
  std::size_t n_objects = 400;
  std::string out = "-";
};

int report_error(mdscan_status status, const char* context) {
  std::fprintf(stderr, "mdscan: %s: %s: %s\n", context, mdscan_status_string(status), mdscan_last_error());
  return 1;
}

void print_progress(std::uint64_t done, std::uint64_t total, void*) {
  std::fprintf(stderr, "\rscanned %llu / %llu tuples", static_cast<unsigned long long>(done),
               static_cast<unsigned long long>(total));
  if (done == total) std::fputc('\n', stderr);
}

int run_command(const RunArgs& a) {
  mdscan_dataset* data = nullptr;
  mdscan_status st = mdscan_dataset_load(a.input.c_str(), a.response.c_str(), &data);
  if (st != MDSCAN_OK) return report_error(st, a.input.c_str());
  if (!a.manifest.empty()) {
    st = mdscan_dataset_attach_manifest(data, a.manifest.c_str());
    if (st != MDSCAN_OK) {
      mdscan_dataset_free(data);
      return report_error(st, a.manifest.c_str());
    }
  }

  mdscan_run_options opt;
  mdscan_run_options_init(&opt);
  opt.k = a.k;
  opt.bins = a.bins;
  opt.response_bins = a.response_bins;
  opt.n_shifts = a.shifts;
  opt.shift_magnitude = a.shift_magnitude;
  opt.method = a.method == "fwer" ? MDSCAN_FWER : MDSCAN_FDR;
  opt.alpha = a.alpha;
  opt.workers = a.workers;
  opt.seed = a.seed;
  opt.contrast_copies = a.contrast;
  opt.mode = a.mode == "equal" ? MDSCAN_MODE_EQUAL : a.mode == "mixed" ? MDSCAN_MODE_MIXED : MDSCAN_MODE_AUTO;
  if (a.progress) {
    opt.progress = print_progress;
    opt.progress_stride = 100000;
  }

  mdscan_result* result = nullptr;
  st = mdscan_run(data, &opt, &result);
  if (st != MDSCAN_OK && st != MDSCAN_FIT_REFUSED) {
    mdscan_dataset_free(data);
    return report_error(st, "run");
  }
  const int exit_code = st == MDSCAN_FIT_REFUSED ? 2 : 0;
  for (std::size_t i = 0; i < mdscan_result_n_warnings(result); ++i) {
    const char* name = nullptr;
    const char* reason = nullptr;
    mdscan_result_warning(result, i, &name, &reason);
    std::fprintf(stderr, "mdscan: warning: %s: %s\n", name, reason);
  }

  auto write = [&](mdscan_status s, const std::string& path) {
    if (s != MDSCAN_OK) {
      report_error(s, path.c_str());
      return false;
    }
    return true;
  };
  bool ok = write(mdscan_result_write_tsv(result, a.out.c_str()), a.out);
  if (ok && !a.json_out.empty()) ok = write(mdscan_result_write_json(result, a.json_out.c_str()), a.json_out);
  if (ok && !a.pp_out.empty()) ok = write(mdscan_result_write_pp(result, a.pp_out.c_str()), a.pp_out);
  if (ok && !a.export_selected.empty())
    ok = write(mdscan_result_export_selected(result, data, a.export_selected.c_str()), a.export_selected);

  mdscan_result_free(result);
  mdscan_dataset_free(data);
  return ok ? exit_code : 1;
}

int generate_command(const GenerateArgs& a) {
  mdscan_synth_options opt;
  mdscan_synth_options_init(&opt);
  opt.response = a.response.c_str();
  opt.seed = a.seed;
  opt.n_objects = a.n_objects;
  if (a.noise >= 0.0) opt.noise_amplitude = a.noise;
  if (a.nuisance >= 0.0) opt.nuisance_amplitude = a.nuisance;
  mdscan_dataset* data = nullptr;
  mdscan_status st = mdscan_synth_generate(&opt, &data);
  if (st != MDSCAN_OK) return report_error(st, "bench generate");
  st = mdscan_dataset_write_csv(data, a.out.c_str());
  if (st == MDSCAN_OK && !a.manifest.empty()) st = mdscan_dataset_write_manifest(data, a.manifest.c_str());
  mdscan_dataset_free(data);
  return st == MDSCAN_OK ? 0 : report_error(st, "bench generate");
}

int fixture_command(const FixtureArgs& a) {
  mdscan_dataset* data = nullptr;
  mdscan_status st = mdscan_dataset_fixture(a.name.c_str(), a.seed, a.n_objects, &data);
  if (st != MDSCAN_OK) return report_error(st, "fixture");
  st = mdscan_dataset_write_csv(data, a.out.c_str());
  mdscan_dataset_free(data);
  return st == MDSCAN_OK ? 0 : report_error(st, a.out.c_str());
}

unsigned default_workers() {
  const char* env = std::getenv("MDSCAN_WORKERS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0') {
    std::fprintf(stderr, "mdscan: ignoring non-numeric MDSCAN_WORKERS=%s\n", env);
    return 0;
  }
  return static_cast<unsigned>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exhaustive multidimensional mutual-information scan for all-relevant feature selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mdscan_version());

  RunArgs run;
  run.workers = default_workers();
  auto* run_cmd = app.add_subcommand("run", "Scan a dataset and report relevant variables");
  run_cmd->add_option("--input", run.input, "CSV or TSV file with a header row ('-' for stdin)")->required();
  run_cmd->add_option("--response", run.response, "Name of the response column")->capture_default_str();
  run_cmd->add_option("-k", run.k, "Tuple dimension")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--bins", run.bins, "Equipotent categories per descriptor")
      ->capture_default_str()
      ->check(CLI::Range(2u, 255u));
  run_cmd->add_option("--response-bins", run.response_bins,
                      "Categories for a continuous response (0 keeps its distinct values)");
  run_cmd->add_option("--shifts", run.shifts, "Additional randomly shifted discretizations")->capture_default_str();
  run_cmd->add_option("--shift-magnitude", run.shift_magnitude, "Shift range as a fraction of a category width")
      ->capture_default_str();
  run_cmd->add_option("--method", run.method, "Multiple-testing procedure")
      ->capture_default_str()
      ->check(CLI::IsMember({"fdr", "fwer"}));
  run_cmd->add_option("--alpha", run.alpha, "FDR or FWER level")->capture_default_str();
  run_cmd->add_option("--workers", run.workers, "Scan threads (0 = all cores; default from MDSCAN_WORKERS)")
      ->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Seed for shifts and contrast variables")->capture_default_str();
  run_cmd->add_option("--contrast", run.contrast, "Permuted contrast copies used only for the gamma fit")
      ->capture_default_str();
  run_cmd->add_option("--mode", run.mode, "Scan mode")->capture_default_str()->check(
      CLI::IsMember({"auto", "equal", "mixed"}));
  run_cmd->add_option("--out", run.out, "Report TSV ('-' for stdout)")->capture_default_str();
  run_cmd->add_option("--json-out", run.json_out, "Summary JSON");
  run_cmd->add_option("--pp-out", run.pp_out, "P-P plot points TSV");
  run_cmd->add_option("--export-selected", run.export_selected, "CSV with the relevant descriptors and the response");
  run_cmd->add_option("--manifest", run.manifest, "Ground-truth manifest; adds a group column");
  run_cmd->add_flag("--progress", run.progress, "Report scan progress on stderr");

  auto* bench = app.add_subcommand("bench", "Synthetic benchmark tools");
  bench->require_subcommand(1);
  GenerateArgs gen;
  auto* gen_cmd = bench->add_subcommand("generate", "Write the synthetic dataset and its manifest");
  gen_cmd->add_option("--response", gen.response, "sphere, xor, checkerboard or random")
      ->capture_default_str()
      ->check(CLI::IsMember({"sphere", "xor", "checkerboard", "random"}));
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--n-objects", gen.n_objects)->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise, "Noise amplitude (default 0.15)");
  gen_cmd->add_option("--nuisance", gen.nuisance, "Nuisance amplitude inside G4 (default 1.0)");
  gen_cmd->add_option("--out", gen.out, "Dataset CSV ('-' for stdout)")->capture_default_str();
  gen_cmd->add_option("--manifest", gen.manifest, "Manifest JSON");

  ScoreArgs score;
  auto* score_cmd = bench->add_subcommand("score", "Score a report against a manifest");
  score_cmd->add_option("--report", score.report)->required();
  score_cmd->add_option("--manifest", score.manifest)->required();
  score_cmd->add_option("--out", score.out)->capture_default_str();

  FixtureArgs fix;
  auto* fix_cmd = app.add_subcommand("fixture", "Write one of the small example datasets");
  fix_cmd->add_option("--name", fix.name)->required()->check(
      CLI::IsMember({"pure_synergy", "epistasis_correlated", "epistasis_exact", "nuisance", "strength_vs_importance"}));
  fix_cmd->add_option("--seed", fix.seed)->capture_default_str();
  fix_cmd->add_option("--n-objects", fix.n_objects)->capture_default_str();
  fix_cmd->add_option("--out", fix.out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run_cmd) return run_command(run);
  if (*gen_cmd) return generate_command(gen);
  if (*score_cmd) {
    const mdscan_status st = mdscan_bench_score(score.report.c_str(), score.manifest.c_str(), score.out.c_str());
    return st == MDSCAN_OK ? 0 : report_error(st, "bench score");
  }
  if (*fix_cmd) return fixture_command(fix);
  return 1;
}
