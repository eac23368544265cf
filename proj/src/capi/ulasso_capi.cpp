// Copyright 2026 The ulasso Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ulasso/ulasso.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "ulasso/harness.hpp"

struct ulasso_dataset
{
    ulasso::CsvData data;
};

struct ulasso_fit
{
    ulasso::UlassoFit fit;
};

namespace {

thread_local std::string g_last_error;

ulasso_status status_of(ulasso::ErrorKind kind)
{
    using ulasso::ErrorKind;
    switch (kind) {
    case ErrorKind::domain: return ULASSO_ERR_DOMAIN;
    case ErrorKind::degenerate_tails: return ULASSO_ERR_DEGENERATE_TAILS;
    case ErrorKind::degenerate_design: return ULASSO_ERR_DEGENERATE_DESIGN;
    case ErrorKind::precondition: return ULASSO_ERR_PRECONDITION;
    case ErrorKind::assumption_violated: return ULASSO_ERR_ASSUMPTION;
    case ErrorKind::parse: return ULASSO_ERR_PARSE;
    case ErrorKind::io: return ULASSO_ERR_IO;
    case ErrorKind::config: return ULASSO_ERR_CONFIG;
    case ErrorKind::aborted: return ULASSO_ERR_ABORTED;
    }
    return ULASSO_ERR_INTERNAL;
}

ulasso_status set_error(ulasso_status st, const char* what)
{
    g_last_error = what;
    return st;
}

/// Runs body, translating exceptions into status codes.
template <class F>
ulasso_status guarded(F&& body)
{
    try {
        g_last_error.clear();
        body();
        return ULASSO_OK;
    } catch (const ulasso::Error& e) {
        return set_error(status_of(e.kind()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return set_error(ULASSO_ERR_CONFIG, e.what());
    } catch (const std::bad_alloc&) {
        return set_error(ULASSO_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(ULASSO_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(ULASSO_ERR_INTERNAL, "unknown failure");
    }
}

char* copy_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ulasso::UlassoOptions to_cpp(const ulasso_options* opts)
{
    ulasso_options o;
    ulasso_options_default(&o);
    if (opts) o = *opts;
    ulasso::UlassoOptions out;
    out.grid.n_points = o.grid_points;
    out.grid.ratio = o.grid_ratio;
    out.solver.tol = o.tol;
    out.solver.max_sweeps = o.max_sweeps;
    out.standardize = o.standardize != 0;
    return out;
}

} // namespace

extern "C" {

const char* ulasso_version(void)
{
    return "1.0.0";
}

const char* ulasso_status_string(ulasso_status status)
{
    switch (status) {
    case ULASSO_OK: return "ok";
    case ULASSO_ERR_NULL_ARG: return "null argument";
    case ULASSO_ERR_DOMAIN: return "domain error";
    case ULASSO_ERR_DEGENERATE_TAILS: return "degenerate tails";
    case ULASSO_ERR_DEGENERATE_DESIGN: return "degenerate design";
    case ULASSO_ERR_PRECONDITION: return "precondition not met";
    case ULASSO_ERR_ASSUMPTION: return "assumption violated";
    case ULASSO_ERR_PARSE: return "parse error";
    case ULASSO_ERR_IO: return "i/o error";
    case ULASSO_ERR_CONFIG: return "configuration error";
    case ULASSO_ERR_ABORTED: return "experiment aborted";
    case ULASSO_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case ULASSO_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* ulasso_last_error(void)
{
    return g_last_error.c_str();
}

void ulasso_options_default(ulasso_options* opts)
{
    if (!opts) return;
    opts->grid_points = 100;
    opts->grid_ratio = 1e-4;
    opts->tol = 1e-7;
    opts->max_sweeps = 10000;
    opts->standardize = 0;
}

ulasso_status ulasso_dataset_create(int64_t n_rows, int64_t p, const double* x, const double* s, const double* y,
                                    ulasso_dataset** out)
{
    if (!out || !s || (p > 0 && !x)) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    *out = nullptr;
    return guarded([&] {
        ulasso::require(n_rows >= 1 && p >= 0, ulasso::ErrorKind::domain, "dataset: invalid dimensions");
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        ulasso::Matrix xm = p > 0 ? ulasso::Matrix(Eigen::Map<const RowMajor>(x, n_rows, p))
                                  : ulasso::Matrix(n_rows, 0);
        ulasso::Vector sv = Eigen::Map<const ulasso::Vector>(s, n_rows);
        std::optional<ulasso::Vector> yv;
        if (y) yv = Eigen::Map<const ulasso::Vector>(y, n_rows);
        std::vector<std::string> names;
        for (int64_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
        auto* h = new ulasso_dataset{ulasso::CsvData{ulasso::Dataset(std::move(xm), std::move(sv), std::move(yv)),
                                                     std::move(names), "s",
                                                     y ? std::optional<std::string>("y") : std::nullopt}};
        *out = h;
    });
}

ulasso_status ulasso_dataset_load_csv(const char* path, const char* s_col, const char* y_col,
                                      const char* const* log1p_cols, size_t n_log1p, int standardize,
                                      ulasso_dataset** out)
{
    if (!out || !path || !s_col || (n_log1p > 0 && !log1p_cols)) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    *out = nullptr;
    return guarded([&] {
        ulasso::CsvOptions opts;
        opts.s_column = s_col;
        if (y_col) opts.y_column = std::string(y_col);
        for (size_t i = 0; i < n_log1p; ++i) {
            ulasso::require(log1p_cols[i] != nullptr, ulasso::ErrorKind::domain, "null log1p column name");
            opts.log1p_columns.emplace_back(log1p_cols[i]);
        }
        opts.standardize = standardize != 0;
        *out = new ulasso_dataset{ulasso::load_csv(path, opts)};
    });
}

ulasso_status ulasso_dataset_write_csv(const ulasso_dataset* ds, const char* path)
{
    if (!ds || !path) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    return guarded([&] { ulasso::write_csv(ds->data, path); });
}

ulasso_status ulasso_dataset_dims(const ulasso_dataset* ds, int64_t* n_rows, int64_t* p, int* labeled)
{
    if (!ds) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    g_last_error.clear();
    if (n_rows) *n_rows = ds->data.data.n_rows();
    if (p) *p = ds->data.data.p();
    if (labeled) *labeled = ds->data.data.labeled() ? 1 : 0;
    return ULASSO_OK;
}

void ulasso_dataset_free(ulasso_dataset* ds)
{
    delete ds;
}

ulasso_status ulasso_fit_ulasso(const ulasso_dataset* ds, double q, const ulasso_options* opts, ulasso_fit** out)
{
    if (!ds || !out) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new ulasso_fit{ulasso::fit_ulasso(ds->data.data, q, to_cpp(opts))}; });
}

ulasso_status ulasso_fit_get_info(const ulasso_fit* fit, ulasso_fit_info* info)
{
    if (!fit || !info) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    g_last_error.clear();
    const ulasso::FitResult& f = fit->fit.fit;
    const ulasso::ExtremeSubset& s = fit->fit.subset;
    info->q = s.q();
    info->lambda = f.lambda;
    info->delta_lo = s.delta_lo();
    info->delta_hi = s.delta_hi();
    info->kkt_residual = f.kkt_residual;
    info->objective = f.objective;
    info->intercept = f.intercept;
    info->n_q = s.n_q();
    info->support_size = static_cast<int64_t>(f.support.size());
    info->n_iterations = f.n_iterations;
    info->converged = f.converged ? 1 : 0;
    return ULASSO_OK;
}

ulasso_status ulasso_fit_get_beta(const ulasso_fit* fit, double* out, size_t len)
{
    if (!fit || !out) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    const ulasso::Vector& b = fit->fit.fit.beta_hat;
    if (len < static_cast<size_t>(b.size())) return set_error(ULASSO_ERR_BUFFER_TOO_SMALL, "output buffer shorter than p");
    g_last_error.clear();
    std::memcpy(out, b.data(), sizeof(double) * static_cast<size_t>(b.size()));
    return ULASSO_OK;
}

void ulasso_fit_free(ulasso_fit* fit)
{
    delete fit;
}

ulasso_status ulasso_fit_real_report(const ulasso_dataset* ds, const double* qs, size_t n_q,
                                     const ulasso_options* opts, char** json_out)
{
    if (!ds || !qs || !json_out) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    *json_out = nullptr;
    return guarded([&] {
        const std::vector<double> q_values(qs, qs + n_q);
        *json_out = copy_string(ulasso::fit_real(ds->data, q_values, to_cpp(opts)).dump(2) + '\n');
    });
}

ulasso_status ulasso_simulate(const char* config_json, const char* out_dir, int workers, const char* format,
                              char** summary_out)
{
    if (!config_json || !out_dir) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    if (summary_out) *summary_out = nullptr;
    return guarded([&] {
        ulasso::Json doc;
        try {
            doc = ulasso::Json::parse(config_json);
        } catch (const nlohmann::json::parse_error& e) {
            ulasso::fail(ulasso::ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
        }
        ulasso::ExperimentConfig cfg = ulasso::parse_config(doc);
        cfg.output_path = out_dir;
        const std::string fmt = format ? format : "csv";
        ulasso::require(fmt == "csv" || fmt == "json", ulasso::ErrorKind::config, "format must be csv or json");
        ulasso::require(workers >= 1, ulasso::ErrorKind::config, "workers must be at least 1");
        const ulasso::ExperimentResult result = ulasso::run_experiment(cfg, workers);
        ulasso::emit_tables(result, cfg, out_dir, fmt == "csv" ? ulasso::TableFormat::csv : ulasso::TableFormat::json);
        if (summary_out) {
            ulasso::Json summary;
            summary["replications"] = cfg.n_replications;
            summary["failed_replications"] = result.failures.size();
            summary["rows"] = ulasso::rows_to_json(result.rows);
            *summary_out = copy_string(summary.dump(2) + '\n');
        }
    });
}

ulasso_status ulasso_oracle_report(const char* design_json, double q, char** json_out)
{
    if (!design_json || !json_out) return set_error(ULASSO_ERR_NULL_ARG, "null argument");
    *json_out = nullptr;
    return guarded([&] {
        ulasso::Json doc;
        try {
            doc = ulasso::Json::parse(design_json);
        } catch (const nlohmann::json::parse_error& e) {
            ulasso::fail(ulasso::ErrorKind::config, std::string("design is not valid JSON: ") + e.what());
        }
        const ulasso::DesignSpec spec = ulasso::design_from_json(doc);
        *json_out = copy_string(ulasso::theory_report_json(ulasso::theory_report(spec, q)).dump(2) + '\n');
    });
}

void ulasso_string_free(char* s)
{
    std::free(s);
}

} // extern "C"
