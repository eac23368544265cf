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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ulasso/model.hpp"
#include "ulasso/oracle.hpp"
#include "ulasso/sampler.hpp"
#include "ulasso/tuning.hpp"

namespace ulasso {

using Json = nlohmann::ordered_json;

struct ExperimentConfig
{
    SimulationConfig sim;        ///< sim.seed fixes the xi realization
    std::vector<double> q_values{0.02, 0.04};
    std::vector<Index> supervised_sizes{300, 500};
    int n_replications = 50;
    Index validation_size = 100000;
    std::uint64_t seed = 1;      ///< root of every per-replication stream
    GridParams grid;
    SolverOptions solver;
    std::string output_path;

    void validate() const;
};

/// Reads a nested config document. Unknown keys are rejected. When the document
/// has no xi seed, the replication seed is used.
ExperimentConfig parse_config(const Json& doc);
Json config_to_json(const ExperimentConfig& cfg);

/// "I" for the normal xi law, "II" for the uniform one.
std::string setting_label(XiLaw law);

/// Aggregated metrics of one estimator at one q.
struct ResultRow
{
    std::string setting;
    double rho = 0.0;
    double q = 0.0;
    Index p = 0;
    std::string estimator;
    double mse = 0.0;
    std::map<std::string, double> re_vs;  ///< reference estimator -> MSE(reference) / MSE(this)
    double auc = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    Index n_q = 0;
    double pi_q_hat = 0.0;

    bool operator==(const ResultRow&) const = default;
};

/// Metrics of one estimator in one replication.
struct RepRecord
{
    int rep = 0;
    double q = 0.0;
    std::string estimator;
    double mse = 0.0;
    double auc = 0.0;  ///< NaN when the estimate is degenerate
    double tpr = 0.0;
    double fpr = 0.0;
    Index n_q = 0;
    double pi_q_hat = 0.0;
};

struct RepFailure
{
    int rep;
    std::string message;
};

struct ExperimentResult
{
    std::vector<ResultRow> rows;
    std::vector<RepRecord> records;  ///< successful replications, in replication order
    std::vector<RepFailure> failures;
};

/// Estimator names used in rows and records.
namespace estimator {
inline const std::string ulasso = "U_LASSO";
inline const std::string combined = "U_LASSO_combined";
inline const std::string alpha0 = "alpha0";
inline const std::string beta0 = "beta0";
std::string slasso(Index n);
} // namespace estimator

/// Runs every replication on up to `workers` threads. Output does not depend on
/// the worker count. Throws an aborted error when more than 10% of replications fail.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 1);

/// Means over replication records, grouped by (q, estimator) in first-seen order.
std::vector<ResultRow> aggregate(const ExperimentConfig& cfg, const std::vector<RepRecord>& records);

enum class TableFormat { csv, json };

/// Writes results, the RE / AUC / selection tables and the replication log to dir.
void emit_tables(const ExperimentResult& result, const ExperimentConfig& cfg, const std::string& dir,
                 TableFormat format);

extern const std::vector<std::string> kResultColumns;

Json rows_to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_json(const Json& doc);
std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::string records_to_csv(const std::vector<RepRecord>& records);
std::vector<RepRecord> records_from_csv(const std::string& text);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

struct CsvData
{
    Dataset data;
    std::vector<std::string> x_names;
    std::string s_name;
    std::optional<std::string> y_name;
};

struct CsvOptions
{
    std::string s_column;
    std::optional<std::string> y_column;
    std::vector<std::string> log1p_columns;  ///< x -> log(1 + x), applied before scaling
    bool standardize = false;                ///< center and scale X columns to unit variance
};

CsvData load_csv(const std::string& path, const CsvOptions& opts);
void write_csv(const CsvData& data, const std::string& path);

/// Real-data workflow: per-q fits, the combined direction, and the least-squares
/// surrogate direction used to orient every estimate.
Json fit_real(const CsvData& data, const std::vector<double>& q_values, const UlassoOptions& opts = {});

/// Either explicit {"sigma" | "rho", "beta0", "alpha0", "noise_sd"} or a simulation block.
DesignSpec design_from_json(const Json& doc);

Json theory_report_json(const TheoryReport& report);

} // namespace ulasso
