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

// Command-line front end. Links only the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ulasso/ulasso.h"

namespace {

using Json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kAborted = 4 };

int exit_code_for(ulasso_status st, bool domain_is_data)
{
    switch (st) {
    case ULASSO_OK: return kOk;
    case ULASSO_ERR_CONFIG: return kConfig;
    case ULASSO_ERR_ABORTED: return kAborted;
    case ULASSO_ERR_PARSE:
    case ULASSO_ERR_IO:
    case ULASSO_ERR_DEGENERATE_TAILS:
    case ULASSO_ERR_DEGENERATE_DESIGN:
    case ULASSO_ERR_PRECONDITION: return kData;
    case ULASSO_ERR_DOMAIN: return domain_is_data ? kData : kConfig;
    default: return kOther;
    }
}

int report_failure(ulasso_status st, bool domain_is_data)
{
    std::cerr << "ulasso: " << ulasso_status_string(st) << ": " << ulasso_last_error() << '\n';
    return exit_code_for(st, domain_is_data);
}

bool read_file(const std::string& path, std::string& out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

int emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty()) {
        std::cout << text;
        return kOk;
    }
    std::ofstream out(out_path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "ulasso: cannot write " << out_path << '\n';
        return kData;
    }
    return kOk;
}

struct SimulateArgs
{
    std::string config_path;
    std::uint64_t seed = 0;
    int reps = 0;
    std::string out_dir;
    int workers = 1;
    std::string format = "csv";
    std::optional<std::string> setting;
    std::optional<long long> p;
    std::optional<double> rho;
    std::optional<long long> n_pop;
    std::optional<std::uint64_t> xi_seed;
    std::vector<double> q_values;
    std::vector<long long> sizes;
    std::optional<long long> validation_size;
    std::optional<int> grid_points;
    std::optional<double> grid_ratio;
};

int run_simulate(const SimulateArgs& a)
{
    Json doc = Json::object();
    if (!a.config_path.empty()) {
        std::string text;
        if (!read_file(a.config_path, text)) {
            std::cerr << "ulasso: cannot read config " << a.config_path << '\n';
            return kConfig;
        }
        try {
            doc = Json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "ulasso: config is not valid JSON: " << e.what() << '\n';
            return kConfig;
        }
        if (!doc.is_object()) {
            std::cerr << "ulasso: config must be a JSON object\n";
            return kConfig;
        }
    }
    doc["seed"] = a.seed;
    doc["replications"] = a.reps;
    Json& sim = doc["simulation"];
    if (sim.is_null()) sim = Json::object();
    if (a.setting) sim["setting"] = *a.setting;
    if (a.p) sim["p"] = *a.p;
    if (a.rho) sim["rho"] = *a.rho;
    if (a.n_pop) sim["n_pop"] = *a.n_pop;
    if (a.xi_seed) sim["xi_seed"] = *a.xi_seed;
    if (!a.q_values.empty()) doc["q_values"] = a.q_values;
    if (!a.sizes.empty()) doc["supervised_sizes"] = a.sizes;
    if (a.validation_size) doc["validation_size"] = *a.validation_size;
    if (a.grid_points) doc["grid"]["n_points"] = *a.grid_points;
    if (a.grid_ratio) doc["grid"]["ratio"] = *a.grid_ratio;

    char* summary = nullptr;
    const ulasso_status st = ulasso_simulate(doc.dump().c_str(), a.out_dir.c_str(), a.workers, a.format.c_str(), &summary);
    if (st != ULASSO_OK) return report_failure(st, false);
    std::cout << summary;
    ulasso_string_free(summary);
    return kOk;
}

struct FitArgs
{
    std::string data;
    std::string s_col;
    std::string y_col;
    std::vector<double> q_values;
    std::vector<std::string> log1p;
    bool standardize = false;
    std::string out;
    int grid_points = 100;
    double grid_ratio = 1e-4;
    double tol = 1e-7;
};

int run_fit(const FitArgs& a)
{
    std::vector<const char*> log1p;
    for (const std::string& c : a.log1p) log1p.push_back(c.c_str());
    ulasso_dataset* ds = nullptr;
    ulasso_status st = ulasso_dataset_load_csv(a.data.c_str(), a.s_col.c_str(), a.y_col.empty() ? nullptr : a.y_col.c_str(),
                                               log1p.data(), log1p.size(), a.standardize ? 1 : 0, &ds);
    if (st != ULASSO_OK) return report_failure(st, true);

    ulasso_options opts;
    ulasso_options_default(&opts);
    opts.grid_points = a.grid_points;
    opts.grid_ratio = a.grid_ratio;
    opts.tol = a.tol;
    char* json = nullptr;
    st = ulasso_fit_real_report(ds, a.q_values.data(), a.q_values.size(), &opts, &json);
    ulasso_dataset_free(ds);
    if (st != ULASSO_OK) return report_failure(st, true);
    const int rc = emit(json, a.out);
    ulasso_string_free(json);
    return rc;
}

struct OracleArgs
{
    std::string spec_path;
    std::string setting = "I";
    long long p = 20;
    double rho = 0.0;
    long long n_pop = 100000;
    std::uint64_t xi_seed = 1;
    double q = 0.02;
    std::string out;
};

int run_oracle(const OracleArgs& a)
{
    std::string text;
    if (!a.spec_path.empty()) {
        if (!read_file(a.spec_path, text)) {
            std::cerr << "ulasso: cannot read design " << a.spec_path << '\n';
            return kConfig;
        }
    } else {
        text = Json{{"setting", a.setting}, {"p", a.p}, {"rho", a.rho}, {"n_pop", a.n_pop}, {"xi_seed", a.xi_seed}}.dump();
    }
    char* json = nullptr;
    const ulasso_status st = ulasso_oracle_report(text.c_str(), a.q, &json);
    if (st != ULASSO_OK) return report_failure(st, false);
    const int rc = emit(json, a.out);
    ulasso_string_free(json);
    return rc;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Unsupervised LASSO with extreme-tail surrogate labels"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ulasso_version()));

    SimulateArgs sa;
    CLI::App* sim = app.add_subcommand("simulate", "Run a seeded simulation experiment and write result tables");
    sim->add_option("--config", sa.config_path, "JSON experiment config; flags override its keys")->check(CLI::ExistingFile);
    sim->add_option("--seed", sa.seed, "Root seed for every replication stream")->required();
    sim->add_option("--reps", sa.reps, "Number of replications")->required()->check(CLI::PositiveNumber);
    sim->add_option("--out", sa.out_dir, "Output directory")->required();
    sim->add_option("--workers", sa.workers, "Concurrent replications")->check(CLI::PositiveNumber);
    sim->add_option("--format", sa.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
    sim->add_option("--setting", sa.setting, "xi law: I (normal) or II (uniform)")->check(CLI::IsMember({"I", "II"}));
    sim->add_option("--p", sa.p, "Dimension");
    sim->add_option("--rho", sa.rho, "AR(1) correlation");
    sim->add_option("--n-pop", sa.n_pop, "Unlabeled population size N");
    sim->add_option("--xi-seed", sa.xi_seed, "Seed of the fixed xi draw (defaults to --seed)");
    sim->add_option("--q", sa.q_values, "Tail level; repeatable");
    sim->add_option("--sizes", sa.sizes, "Labeled sizes for the supervised baseline; repeatable");
    sim->add_option("--validation-size", sa.validation_size, "Rows of each validation population");
    sim->add_option("--grid-points", sa.grid_points, "Lambda grid size");
    sim->add_option("--grid-ratio", sa.grid_ratio, "Smallest over largest lambda");

    FitArgs fa;
    CLI::App* fit = app.add_subcommand("fit", "Fit U_LASSO on a CSV file and print a JSON report");
    fit->add_option("--data", fa.data, "CSV with a header row")->required()->check(CLI::ExistingFile);
    fit->add_option("--s-col", fa.s_col, "Surrogate column")->required();
    fit->add_option("--y-col", fa.y_col, "Optional 0/1 outcome column");
    fit->add_option("--q", fa.q_values, "Tail level; repeatable")->required();
    fit->add_option("--log1p", fa.log1p, "Covariates to transform as log(1 + x); repeatable");
    fit->add_flag("--standardize", fa.standardize, "Scale covariates to unit variance");
    fit->add_option("--out", fa.out, "Write the report here instead of stdout");
    fit->add_option("--grid-points", fa.grid_points, "Lambda grid size");
    fit->add_option("--grid-ratio", fa.grid_ratio, "Smallest over largest lambda");
    fit->add_option("--tol", fa.tol, "Coordinate descent tolerance");

    OracleArgs oa;
    CLI::App* orc = app.add_subcommand("oracle", "Print closed-form tail quantities for a design and q");
    orc->add_option("--spec", oa.spec_path, "JSON design file")->check(CLI::ExistingFile);
    orc->add_option("--setting", oa.setting, "xi law when no design file is given")->check(CLI::IsMember({"I", "II"}));
    orc->add_option("--p", oa.p, "Dimension");
    orc->add_option("--rho", oa.rho, "AR(1) correlation");
    orc->add_option("--n-pop", oa.n_pop, "Population size N used in alpha0");
    orc->add_option("--xi-seed", oa.xi_seed, "Seed of the xi draw");
    orc->add_option("--q", oa.q, "Tail level")->required();
    orc->add_option("--out", oa.out, "Write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    if (sim->parsed()) return run_simulate(sa);
    if (fit->parsed()) return run_fit(fa);
    return run_oracle(oa);
}
