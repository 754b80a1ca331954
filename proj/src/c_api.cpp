#include "mdscan/mdscan.h"

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "mdscan/error.hpp"
#include "mdscan/pipeline.hpp"
#include "mdscan/report_io.hpp"
#include "mdscan/synth.hpp"

struct mdscan_dataset {
  mdscan::RawDataset raw;
  std::optional<mdscan::SynthConfig> synth;
};

struct mdscan_result {
  mdscan::SelectionReport report;
  std::size_t dropped_rows = 0;
};

namespace {

thread_local std::string last_error;

mdscan_status status_of(mdscan::ErrorCode code) {
  switch (code) {
    case mdscan::ErrorCode::InvalidArgument: return MDSCAN_ERR_INVALID_ARGUMENT;
    case mdscan::ErrorCode::Io: return MDSCAN_ERR_IO;
    case mdscan::ErrorCode::Parse: return MDSCAN_ERR_PARSE;
    case mdscan::ErrorCode::Data: return MDSCAN_ERR_DATA;
    case mdscan::ErrorCode::Internal: return MDSCAN_ERR_INTERNAL;
  }
  return MDSCAN_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
mdscan_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const mdscan::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MDSCAN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MDSCAN_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) mdscan::fail(mdscan::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

mdscan_status write_to(const char* path, const std::function<void(std::ostream&)>& writer) {
  require(path, "path");
  const std::string p(path);
  if (p == "-") {
    writer(std::cout);
    std::cout.flush();
    if (!std::cout) mdscan::fail(mdscan::ErrorCode::Io, "cannot write to standard output");
    return MDSCAN_OK;
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) mdscan::fail(mdscan::ErrorCode::Io, "cannot open " + p + " for writing");
  writer(out);
  out.close();
  if (!out) mdscan::fail(mdscan::ErrorCode::Io, "error writing " + p);
  return MDSCAN_OK;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) mdscan::fail(mdscan::ErrorCode::Io, "cannot open " + path);
  return in;
}

}  // namespace

extern "C" {

const char* mdscan_version(void) { return "0.1.0"; }

const char* mdscan_last_error(void) { return last_error.c_str(); }

const char* mdscan_status_string(mdscan_status status) {
  switch (status) {
    case MDSCAN_OK: return "ok";
    case MDSCAN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MDSCAN_ERR_IO: return "i/o error";
    case MDSCAN_ERR_PARSE: return "parse error";
    case MDSCAN_ERR_DATA: return "data error";
    case MDSCAN_ERR_INTERNAL: return "internal error";
    case MDSCAN_FIT_REFUSED: return "gamma fit refused";
  }
  return "unknown status";
}

mdscan_status mdscan_dataset_load(const char* path, const char* response, mdscan_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(response, "response");
    require(out, "out");
    auto d = std::make_unique<mdscan_dataset>();
    if (std::string(path) == "-")
      d->raw = mdscan::ingest(std::cin, response);
    else
      d->raw = mdscan::ingest_file(path, response);
    *out = d.release();
    return MDSCAN_OK;
  });
}

mdscan_status mdscan_dataset_fixture(const char* name, uint64_t seed, size_t n_objects, mdscan_dataset** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    auto d = std::make_unique<mdscan_dataset>();
    d->raw = mdscan::fixture(name, seed, n_objects);
    *out = d.release();
    return MDSCAN_OK;
  });
}

mdscan_status mdscan_dataset_attach_manifest(mdscan_dataset* dataset, const char* manifest_path) {
  return guarded([&] {
    require(dataset, "dataset");
    require(manifest_path, "manifest path");
    std::ifstream in = open_input(manifest_path);
    const auto groups = mdscan::read_manifest_groups(in);
    std::vector<std::string> labels;
    for (const auto& c : dataset->raw.descriptors) {
      const auto it = groups.find(c.name);
      if (it == groups.end())
        mdscan::fail(mdscan::ErrorCode::Data, "column \"" + c.name + "\" is not in the manifest");
      labels.push_back(it->second);
    }
    dataset->raw.groups = std::move(labels);
    return MDSCAN_OK;
  });
}

size_t mdscan_dataset_n_objects(const mdscan_dataset* dataset) { return dataset ? dataset->raw.n_objects : 0; }

size_t mdscan_dataset_n_descriptors(const mdscan_dataset* dataset) {
  return dataset ? dataset->raw.descriptors.size() : 0;
}

size_t mdscan_dataset_dropped_rows(const mdscan_dataset* dataset) { return dataset ? dataset->raw.dropped_rows : 0; }

mdscan_status mdscan_dataset_write_csv(const mdscan_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset, "dataset");
    return write_to(path, [&](std::ostream& o) { mdscan::write_csv(dataset->raw, o); });
  });
}

void mdscan_dataset_free(mdscan_dataset* dataset) { delete dataset; }

void mdscan_synth_options_init(mdscan_synth_options* options) {
  if (options == nullptr) return;
  const mdscan::SynthConfig defaults;
  options->n_objects = defaults.n_objects;
  for (std::size_t g = 0; g < mdscan::kSynthGroups; ++g) options->group_sizes[g] = defaults.group_sizes[g];
  options->noise_amplitude = defaults.noise_amplitude;
  options->nuisance_amplitude = defaults.nuisance_amplitude;
  options->g7_support = defaults.g7_support;
  options->response = "sphere";
  options->seed = defaults.seed;
}

mdscan_status mdscan_synth_generate(const mdscan_synth_options* options, mdscan_dataset** out) {
  return guarded([&] {
    require(options, "options");
    require(out, "out");
    mdscan::SynthConfig config;
    config.n_objects = options->n_objects;
    for (std::size_t g = 0; g < mdscan::kSynthGroups; ++g) config.group_sizes[g] = options->group_sizes[g];
    config.noise_amplitude = options->noise_amplitude;
    config.nuisance_amplitude = options->nuisance_amplitude;
    config.g7_support = options->g7_support;
    config.response = mdscan::parse_response_kind(options->response ? options->response : "");
    config.seed = options->seed;
    auto d = std::make_unique<mdscan_dataset>();
    d->raw = mdscan::generate(config);
    d->synth = config;
    *out = d.release();
    return MDSCAN_OK;
  });
}

mdscan_status mdscan_dataset_write_manifest(const mdscan_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset, "dataset");
    if (!dataset->synth) mdscan::fail(mdscan::ErrorCode::InvalidArgument, "dataset was not generated by synth");
    return write_to(path, [&](std::ostream& o) { mdscan::write_manifest(dataset->raw, *dataset->synth, o); });
  });
}

void mdscan_run_options_init(mdscan_run_options* options) {
  if (options == nullptr) return;
  const mdscan::RunConfig defaults;
  options->k = defaults.k;
  options->bins = defaults.bins;
  options->response_bins = defaults.response_bins;
  options->n_shifts = defaults.n_shifts;
  options->shift_magnitude = defaults.shift_magnitude;
  options->method = MDSCAN_FDR;
  options->alpha = defaults.alpha;
  options->workers = defaults.workers;
  options->seed = defaults.seed;
  options->contrast_copies = defaults.contrast_copies;
  options->mode = MDSCAN_MODE_AUTO;
  options->progress = nullptr;
  options->progress_user = nullptr;
  options->progress_stride = 0;
}

mdscan_status mdscan_run(const mdscan_dataset* dataset, const mdscan_run_options* options, mdscan_result** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(options, "options");
    require(out, "out");
    mdscan::RunConfig config;
    config.k = options->k;
    config.bins = options->bins;
    config.response_bins = options->response_bins;
    config.n_shifts = options->n_shifts;
    config.shift_magnitude = options->shift_magnitude;
    switch (options->method) {
      case MDSCAN_FDR: config.method = mdscan::Method::Fdr; break;
      case MDSCAN_FWER: config.method = mdscan::Method::Fwer; break;
      default: mdscan::fail(mdscan::ErrorCode::InvalidArgument, "unknown method");
    }
    config.alpha = options->alpha;
    config.workers = options->workers;
    config.seed = options->seed;
    config.contrast_copies = options->contrast_copies;
    switch (options->mode) {
      case MDSCAN_MODE_AUTO: config.mode = mdscan::ScanMode::Auto; break;
      case MDSCAN_MODE_EQUAL: config.mode = mdscan::ScanMode::EqualCardinality; break;
      case MDSCAN_MODE_MIXED: config.mode = mdscan::ScanMode::Mixed; break;
      default: mdscan::fail(mdscan::ErrorCode::InvalidArgument, "unknown scan mode");
    }
    if (options->progress) {
      const mdscan_progress_fn fn = options->progress;
      void* user = options->progress_user;
      config.progress = [fn, user](std::uint64_t done, std::uint64_t total) { fn(done, total, user); };
      config.progress_stride = options->progress_stride;
    }
    mdscan::RunOutcome outcome = mdscan::run(dataset->raw, config);
    auto r = std::make_unique<mdscan_result>();
    r->report = std::move(outcome.report);
    r->dropped_rows = dataset->raw.dropped_rows;
    *out = r.release();
    return outcome.exit_code == 2 ? MDSCAN_FIT_REFUSED : MDSCAN_OK;
  });
}

size_t mdscan_result_n_variables(const mdscan_result* result) { return result ? result->report.variables.size() : 0; }

size_t mdscan_result_relevant_count(const mdscan_result* result) {
  return result ? result->report.relevant_count() : 0;
}

double mdscan_result_gamma(const mdscan_result* result) { return result ? result->report.gamma : 0.0; }

uint64_t mdscan_result_n_tests(const mdscan_result* result) { return result ? result->report.n_tests : 0; }

const char* mdscan_result_calibration(const mdscan_result* result) {
  return result ? mdscan::to_string(result->report.calibration) : "";
}

mdscan_status mdscan_result_variable(const mdscan_result* result, size_t index, mdscan_variable_info* out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    if (index >= result->report.variables.size())
      mdscan::fail(mdscan::ErrorCode::InvalidArgument, "variable index out of range");
    const auto& v = result->report.variables[index];
    out->name = v.name.c_str();
    out->group = v.group.c_str();
    out->max_cmi = v.max_cmi;
    out->best_df = v.best_df;
    out->p_min = v.p_min;
    out->log_p_min = v.log_p_min;
    out->final_p = v.final_p;
    out->log_final_p = v.log_final_p;
    out->adjusted_p = v.adjusted_p;
    out->relevant = v.relevant ? 1 : 0;
    out->rank = v.rank;
    out->n_tests = v.n_tests;
    return MDSCAN_OK;
  });
}

size_t mdscan_result_n_warnings(const mdscan_result* result) { return result ? result->report.warnings.size() : 0; }

mdscan_status mdscan_result_warning(const mdscan_result* result, size_t index, const char** name,
                                    const char** reason) {
  return guarded([&] {
    require(result, "result");
    if (index >= result->report.warnings.size())
      mdscan::fail(mdscan::ErrorCode::InvalidArgument, "warning index out of range");
    if (name) *name = result->report.warnings[index].name.c_str();
    if (reason) *reason = result->report.warnings[index].reason.c_str();
    return MDSCAN_OK;
  });
}

mdscan_status mdscan_result_write_tsv(const mdscan_result* result, const char* path) {
  return guarded([&] {
    require(result, "result");
    return write_to(path, [&](std::ostream& o) { mdscan::write_report_tsv(result->report, o); });
  });
}

mdscan_status mdscan_result_write_json(const mdscan_result* result, const char* path) {
  return guarded([&] {
    require(result, "result");
    return write_to(path,
                    [&](std::ostream& o) { mdscan::write_summary_json(result->report, o, result->dropped_rows); });
  });
}

mdscan_status mdscan_result_write_pp(const mdscan_result* result, const char* path) {
  return guarded([&] {
    require(result, "result");
    return write_to(path, [&](std::ostream& o) { mdscan::write_pp_tsv(result->report, o); });
  });
}

mdscan_status mdscan_result_export_selected(const mdscan_result* result, const mdscan_dataset* dataset,
                                            const char* path) {
  return guarded([&] {
    require(result, "result");
    require(dataset, "dataset");
    return write_to(path, [&](std::ostream& o) { mdscan::export_selected_csv(dataset->raw, result->report, o); });
  });
}

void mdscan_result_free(mdscan_result* result) { delete result; }

mdscan_status mdscan_bench_score(const char* report_path, const char* manifest_path, const char* out_path) {
  return guarded([&] {
    require(report_path, "report path");
    require(manifest_path, "manifest path");
    std::ifstream report_in = open_input(report_path);
    std::ifstream manifest_in = open_input(manifest_path);
    const auto rows = mdscan::read_report_tsv(report_in);
    const auto groups = mdscan::read_manifest_groups(manifest_in);
    const auto score = mdscan::score_report(rows, groups);
    return write_to(out_path, [&](std::ostream& o) { mdscan::write_bench_score(score, o); });
  });
}

}  // extern "C"
