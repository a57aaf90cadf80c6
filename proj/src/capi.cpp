#include "senscap/senscap.h"

#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "senscap/capacity.hpp"
#include "senscap/config.hpp"
#include "senscap/error.hpp"
#include "senscap/validate.hpp"

struct senscap_model {
  senscap::MRFModel value;
};
struct senscap_sensing {
  senscap::SensingFunction value;
};
struct senscap_channel {
  senscap::NoiseChannel value;
};
struct senscap_config {
  senscap::RunConfig value;
};
struct senscap_table {
  senscap::CsvTable value;
  std::string csv;
};
struct senscap_report {
  senscap::ValidationReport value;
  std::string text;
};

namespace {

thread_local std::string last_error;

senscap_status to_status(senscap::ErrorCode code) {
  using senscap::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return SENSCAP_ERR_INVALID_ARGUMENT;
    case ErrorCode::InvalidGrid: return SENSCAP_ERR_INVALID_GRID;
    case ErrorCode::InvalidModel: return SENSCAP_ERR_INVALID_MODEL;
    case ErrorCode::EnumerationTooLarge: return SENSCAP_ERR_ENUMERATION_TOO_LARGE;
    case ErrorCode::CoverageOverlap: return SENSCAP_ERR_COVERAGE_OVERLAP;
    case ErrorCode::PatternSize: return SENSCAP_ERR_PATTERN_SIZE;
    case ErrorCode::DimensionMismatch: return SENSCAP_ERR_DIMENSION_MISMATCH;
    case ErrorCode::InvalidChannel: return SENSCAP_ERR_INVALID_CHANNEL;
    case ErrorCode::InvalidSensing: return SENSCAP_ERR_INVALID_SENSING;
    case ErrorCode::UndefinedConditional: return SENSCAP_ERR_UNDEFINED_CONDITIONAL;
    case ErrorCode::InconsistentTypes: return SENSCAP_ERR_INCONSISTENT_TYPES;
    case ErrorCode::WrongDirection: return SENSCAP_ERR_WRONG_DIRECTION;
    case ErrorCode::Infeasible: return SENSCAP_ERR_INFEASIBLE;
    case ErrorCode::Config: return SENSCAP_ERR_CONFIG;
    case ErrorCode::Io: return SENSCAP_ERR_IO;
  }
  return SENSCAP_ERR_INTERNAL;
}

template <class Fn>
senscap_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SENSCAP_OK;
  } catch (const senscap::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return SENSCAP_ERR_INTERNAL;
}

void need(const void* p, const char* name) {
  if (!p) senscap::fail(senscap::ErrorCode::InvalidArgument, std::string(name) + " is NULL");
}

}  // namespace

extern "C" {

const char* senscap_version(void) { return "1.0.0"; }

const char* senscap_status_string(senscap_status status) {
  switch (status) {
    case SENSCAP_OK: return "ok";
    case SENSCAP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SENSCAP_ERR_INVALID_GRID: return "invalid grid";
    case SENSCAP_ERR_INVALID_MODEL: return "invalid model";
    case SENSCAP_ERR_ENUMERATION_TOO_LARGE: return "enumeration too large";
    case SENSCAP_ERR_COVERAGE_OVERLAP: return "coverage overlap";
    case SENSCAP_ERR_PATTERN_SIZE: return "pattern size";
    case SENSCAP_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case SENSCAP_ERR_INVALID_CHANNEL: return "invalid channel";
    case SENSCAP_ERR_INVALID_SENSING: return "invalid sensing function";
    case SENSCAP_ERR_UNDEFINED_CONDITIONAL: return "undefined conditional";
    case SENSCAP_ERR_INCONSISTENT_TYPES: return "inconsistent types";
    case SENSCAP_ERR_WRONG_DIRECTION: return "wrong direction";
    case SENSCAP_ERR_INFEASIBLE: return "infeasible";
    case SENSCAP_ERR_CONFIG: return "config error";
    case SENSCAP_ERR_IO: return "I/O error";
    case SENSCAP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* senscap_last_error(void) { return last_error.c_str(); }

senscap_status senscap_model_create(const double p_node[2], const double p_edge[4],
                                    senscap_model** out) {
  return guarded([&] {
    need(p_node, "p_node");
    need(p_edge, "p_edge");
    need(out, "out");
    *out = new senscap_model{senscap::MRFModel({p_node[0], p_node[1]},
                                               {{{p_edge[0], p_edge[1]}, {p_edge[2], p_edge[3]}}})};
  });
}

senscap_status senscap_model_create_symmetric(double p, senscap_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = new senscap_model{senscap::MRFModel::symmetric_family(p)};
  });
}

void senscap_model_destroy(senscap_model* model) { delete model; }

senscap_status senscap_model_w(const senscap_model* model, double* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = senscap::compute_W(model->value);
  });
}

senscap_status senscap_model_typical_type(const senscap_model* model, double out[32]) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const auto phi = senscap::typical_field_type(model->value);
    std::memcpy(out, phi.data(), sizeof(double) * phi.size());
  });
}

senscap_status senscap_model_log2_partition(const senscap_model* model, int k, double* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = senscap::log2_partition_Z(model->value, k);
  });
}

senscap_status senscap_sensing_identity(senscap_sensing** out) {
  return guarded([&] {
    need(out, "out");
    *out = new senscap_sensing{senscap::SensingFunction::identity()};
  });
}

senscap_status senscap_sensing_count(int c, senscap_sensing** out) {
  return guarded([&] {
    need(out, "out");
    *out = new senscap_sensing{senscap::SensingFunction::count(c)};
  });
}

senscap_status senscap_sensing_weighted_sum(int c, const double* weights, size_t count,
                                            senscap_sensing** out) {
  return guarded([&] {
    need(out, "out");
    if (count) need(weights, "weights");
    *out = new senscap_sensing{
        senscap::SensingFunction::weighted_sum(c, std::vector<double>(weights, weights + count))};
  });
}

senscap_status senscap_sensing_lookup(int c, const int* table, size_t count, senscap_sensing** out) {
  return guarded([&] {
    need(out, "out");
    if (count) need(table, "table");
    *out = new senscap_sensing{senscap::SensingFunction::lookup(c, std::vector<int>(table, table + count))};
  });
}

void senscap_sensing_destroy(senscap_sensing* psi) { delete psi; }

senscap_status senscap_sensing_sense(const senscap_sensing* psi, const uint8_t* bits, size_t count,
                                     int* symbol) {
  return guarded([&] {
    need(psi, "psi");
    need(symbol, "symbol");
    if (count) need(bits, "bits");
    *symbol = psi->value.sense(std::span<const std::uint8_t>(bits, count));
  });
}

senscap_status senscap_channel_symmetric(int symbols, double q, senscap_channel** out) {
  return guarded([&] {
    need(out, "out");
    *out = new senscap_channel{senscap::NoiseChannel::symmetric(symbols, q)};
  });
}

senscap_status senscap_channel_matrix(const double* matrix, int inputs, int outputs,
                                      senscap_channel** out) {
  return guarded([&] {
    need(matrix, "matrix");
    need(out, "out");
    if (inputs < 1 || outputs < 1)
      senscap::fail(senscap::ErrorCode::InvalidChannel, "channel needs at least one input and output");
    senscap::Matrix m(static_cast<std::size_t>(inputs), static_cast<std::size_t>(outputs));
    std::memcpy(m.flat().data(), matrix, sizeof(double) * m.flat().size());
    *out = new senscap_channel{senscap::NoiseChannel(std::move(m))};
  });
}

void senscap_channel_destroy(senscap_channel* channel) { delete channel; }

void senscap_optimizer_defaults(senscap_optimizer_options* options) {
  if (!options) return;
  const senscap::OptimizerOptions d;
  *options = {d.theta_tol, d.inner_tol, d.eps_dist, d.restarts, d.max_iters};
}

senscap_status senscap_capacity_bound(const senscap_model* model, int c, const senscap_sensing* psi,
                                      const senscap_channel* channel, double D,
                                      const senscap_optimizer_options* options, senscap_bound* out) {
  return guarded([&] {
    need(model, "model");
    need(psi, "psi");
    need(channel, "channel");
    need(out, "out");
    senscap::OptimizerOptions opts;
    if (options) {
      opts.theta_tol = options->theta_tol;
      opts.inner_tol = options->inner_tol;
      opts.eps_dist = options->eps_dist;
      opts.restarts = options->restarts;
      opts.max_iters = options->max_iters;
    }
    const senscap::CapacityQuery query{model->value, c, psi->value, channel->value, D, opts};
    const auto r = senscap::capacity_lower_bound(query);
    *out = {r.constrained ? 1 : 0, r.value, r.certificate, r.witness_distortion,
            r.numerator, r.denom, r.iterations};
  });
}

senscap_status senscap_config_parse(const char* json, senscap_config** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new senscap_config{senscap::parse_run_config(json)};
  });
}

void senscap_config_destroy(senscap_config* config) { delete config; }

senscap_status senscap_run_bound(const senscap_config* config, senscap_table** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    auto table = senscap::run_bound(config->value);
    auto csv = table.to_csv();
    *out = new senscap_table{std::move(table), std::move(csv)};
  });
}

senscap_status senscap_run_simulate(const senscap_config* config, senscap_table** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    auto table = senscap::run_simulate(config->value);
    auto csv = table.to_csv();
    *out = new senscap_table{std::move(table), std::move(csv)};
  });
}

size_t senscap_table_rows(const senscap_table* table) {
  return table ? table->value.rows.size() + 1 : 0;
}

size_t senscap_table_cols(const senscap_table* table) {
  return table ? table->value.header.size() : 0;
}

const char* senscap_table_cell(const senscap_table* table, size_t row, size_t col) {
  if (!table || col >= table->value.header.size()) return nullptr;
  if (row == 0) return table->value.header[col].c_str();
  if (row - 1 >= table->value.rows.size()) return nullptr;
  return table->value.rows[row - 1][col].c_str();
}

const char* senscap_table_csv(const senscap_table* table) { return table ? table->csv.c_str() : nullptr; }

void senscap_table_destroy(senscap_table* table) { delete table; }

senscap_status senscap_validate(const char* level, senscap_report** out) {
  return guarded([&] {
    need(level, "level");
    need(out, "out");
    auto report = senscap::run_validation(senscap::parse_validation_level(level));
    auto text = report.to_text();
    *out = new senscap_report{std::move(report), std::move(text)};
  });
}

int senscap_report_passed(const senscap_report* report) { return report && report->value.passed() ? 1 : 0; }

const char* senscap_report_text(const senscap_report* report) {
  return report ? report->text.c_str() : nullptr;
}

void senscap_report_destroy(senscap_report* report) { delete report; }

}  // extern "C"
