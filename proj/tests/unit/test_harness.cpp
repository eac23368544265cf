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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "ulasso/harness.hpp"
#include "ulasso/extremes.hpp"
#include "ulasso/metrics.hpp"
#include "ulasso/sampler.hpp"
#include "ulasso/tuning.hpp"

using namespace ulasso;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.sim.p = 9;
    cfg.sim.n_pop = 5000;
    cfg.q_values = {0.04, 0.1};
    cfg.supervised_sizes = {200};
    cfg.n_replications = 3;
    cfg.validation_size = 2000;
    cfg.seed = 5;
    cfg.sim.seed = 5;
    cfg.grid.n_points = 30;
    cfg.grid.ratio = 1e-3;
    return cfg;
}

fs::path temp_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("ulasso_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string write_file(const fs::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
    return path.string();
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorKind kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::aborted;
}

} // namespace

TEST(Config, Defaults)
{
    const ExperimentConfig cfg = parse_config(Json::object());
    EXPECT_EQ(cfg.sim.p, 20);
    EXPECT_EQ(cfg.q_values, (std::vector<double>{0.02, 0.04}));
    EXPECT_EQ(cfg.supervised_sizes, (std::vector<Index>{300, 500}));
    EXPECT_EQ(cfg.n_replications, 50);
    EXPECT_EQ(cfg.validation_size, 100000);
    EXPECT_EQ(cfg.sim.xi_law, XiLaw::normal_3_1);
}

TEST(Config, NestedKeysAndSeedFallback)
{
    const Json doc = Json::parse(R"({"seed": 9, "simulation": {"setting": "II", "p": 50, "rho": 0.2},
                                     "q_values": [0.02], "grid": {"n_points": 50}, "solver": {"tol": 1e-6}})");
    const ExperimentConfig cfg = parse_config(doc);
    EXPECT_EQ(cfg.sim.xi_law, XiLaw::uniform_2_5);
    EXPECT_EQ(cfg.sim.p, 50);
    EXPECT_EQ(cfg.sim.rho, 0.2);
    EXPECT_EQ(cfg.sim.seed, 9u);
    EXPECT_EQ(cfg.grid.n_points, 50);
    EXPECT_EQ(cfg.solver.tol, 1e-6);
}

TEST(Config, Errors)
{
    EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"replicates": 3})")); }), ErrorKind::config);
    EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"grid": {"points": 3}})")); }), ErrorKind::config);
    EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"q_values": "0.02"})")); }), ErrorKind::config);
    EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"q_values": [1.5]})")); }), ErrorKind::config);
    EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"simulation": {"setting": "III"}})")); }), ErrorKind::config);
    EXPECT_EQ(kind_of([] { parse_config(Json::parse(R"({"simulation": {"n_pop": 100}, "supervised_sizes": [300]})")); }),
              ErrorKind::config);
}

TEST(Config, JsonRoundTrip)
{
    ExperimentConfig cfg = small_config();
    cfg.sim.xi_law = XiLaw::uniform_2_5;
    cfg.sim.rho = 0.2;
    const ExperimentConfig back = parse_config(config_to_json(cfg));
    EXPECT_EQ(config_to_json(back).dump(), config_to_json(cfg).dump());
}

TEST(Experiment, EstimatorsAndInvariants)
{
    const ExperimentConfig cfg = small_config();
    const ExperimentResult res = run_experiment(cfg, 1);
    EXPECT_TRUE(res.failures.empty());
    std::vector<std::string> names;
    for (const ResultRow& r : res.rows)
        if (r.q == 0.04) names.push_back(r.estimator);
    EXPECT_NE(std::find(names.begin(), names.end(), "U_LASSO"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "U_LASSO_combined"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "alpha0"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "beta0"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "S_LASSO_200"), names.end());
    for (const ResultRow& r : res.rows) {
        EXPECT_TRUE(std::isfinite(r.mse));
        EXPECT_GE(r.auc, 0.0);
        EXPECT_LE(r.auc, 1.0);
        EXPECT_EQ(r.setting, "I");
        if (r.estimator == "beta0") EXPECT_EQ(r.mse, 0.0);
        if (r.estimator == "U_LASSO") {
            EXPECT_EQ(r.n_q, 2 * tail_count(5000, r.q));
            EXPECT_TRUE(r.re_vs.count("S_LASSO_200"));
            EXPECT_TRUE(r.re_vs.count("alpha0"));
            EXPECT_FALSE(r.re_vs.count("beta0"));
        }
    }
}

TEST(Experiment, DeterministicAcrossRunsAndWorkers)
{
    ExperimentConfig cfg = small_config();
    cfg.n_replications = 1;
    EXPECT_EQ(run_experiment(cfg, 1).rows, run_experiment(cfg, 1).rows);

    cfg.n_replications = 4;
    const ExperimentResult a = run_experiment(cfg, 1);
    const ExperimentResult b = run_experiment(cfg, 3);
    EXPECT_EQ(a.rows, b.rows);
    EXPECT_EQ(records_to_csv(a.records), records_to_csv(b.records));
}

TEST(Experiment, AggregatesEqualMeansOfPersistedLog)
{
    const ExperimentConfig cfg = small_config();
    const ExperimentResult res = run_experiment(cfg, 2);
    const std::vector<RepRecord> back = records_from_csv(records_to_csv(res.records));
    EXPECT_EQ(aggregate(cfg, back), res.rows);
    for (const ResultRow& row : res.rows) {
        double mse = 0.0, tpr = 0.0;
        int n = 0;
        for (const RepRecord& r : back)
            if (r.q == row.q && r.estimator == row.estimator) {
                mse += r.mse;
                tpr += r.tpr;
                ++n;
            }
        ASSERT_EQ(n, cfg.n_replications);
        EXPECT_NEAR(row.mse, mse / n, 1e-15);
        EXPECT_NEAR(row.tpr, tpr / n, 1e-15);
    }
}

TEST(Tables, JsonRoundTripAndCsvHeader)
{
    ResultRow r;
    r.setting = "I";
    r.rho = 0.2;
    r.q = 0.02;
    r.p = 20;
    r.estimator = "U_LASSO";
    r.mse = 0.0123456789012345;
    r.re_vs = {{"S_LASSO_500", 2.22}, {"alpha0", std::numeric_limits<double>::infinity()}};
    r.auc = 0.881;
    r.tpr = 1.0;
    r.fpr = 0.0;
    r.n_q = 2000;
    r.pi_q_hat = 0.0085;
    ResultRow s = r;
    s.estimator = "beta0";
    s.re_vs.clear();
    const std::vector<ResultRow> rows{r, s};
    EXPECT_EQ(rows_from_json(rows_to_json(rows)), rows);
    EXPECT_EQ(rows_from_json(Json::parse(rows_to_json(rows).dump())), rows);

    const std::string csv = rows_to_csv(rows);
    std::string header;
    for (std::size_t k = 0; k < kResultColumns.size(); ++k) header += (k ? "," : "") + kResultColumns[k];
    EXPECT_EQ(csv.substr(0, csv.find('\n')), header);
    EXPECT_EQ(header, "setting,rho,q,p,estimator,mse,re_vs,auc,tpr,fpr,n_q,pi_q_hat");
}

TEST(Tables, EmitWritesEveryFileAndRejectsEmpty)
{
    const ExperimentConfig cfg = small_config();
    ExperimentResult empty;
    EXPECT_EQ(kind_of([&] { emit_tables(empty, cfg, temp_dir("empty").string(), TableFormat::csv); }),
              ErrorKind::domain);

    const ExperimentResult res = run_experiment(cfg, 1);
    const fs::path csv = temp_dir("csv");
    emit_tables(res, cfg, csv.string(), TableFormat::csv);
    for (const char* f : {"results.csv", "table_re.csv", "table_auc.csv", "table_selection.csv", "replications.csv",
                          "failures.csv", "config.json"})
        EXPECT_TRUE(fs::exists(csv / f)) << f;
    const fs::path js = temp_dir("json");
    emit_tables(res, cfg, js.string(), TableFormat::json);
    EXPECT_EQ(rows_from_json(Json::parse(slurp(js / "results.json"))), res.rows);
    EXPECT_EQ(parse_config(Json::parse(slurp(js / "config.json"))).seed, cfg.seed);
}

TEST(Tables, FormatDoubleRoundTrips)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(i % 40) - 20);
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Csv, SmallFile)
{
    const fs::path d = temp_dir("csv_small");
    const std::string path = write_file(d / "a.csv", "S,X1,X2\n1,2,3\n4,5,6\n7,8,9\n");
    const CsvData data = load_csv(path, CsvOptions{"S"});
    EXPECT_EQ(data.data.n_rows(), 3);
    EXPECT_EQ(data.data.p(), 2);
    EXPECT_EQ(data.x_names, (std::vector<std::string>{"X1", "X2"}));
    EXPECT_EQ(data.data.x()(2, 1), 9.0);
    EXPECT_EQ(data.data.s()[1], 4.0);
    EXPECT_FALSE(data.data.labeled());
}

TEST(Csv, HeaderQuotesBomAndColumnOrder)
{
    const fs::path d = temp_dir("csv_bom");
    const std::string path = write_file(d / "a.csv", "\xEF\xBB\xBF\"X1\",\"S\",\"Y\",X2\r\n1,2,0,3\r\n4,5,1,6\r\n");
    CsvOptions opts{"S"};
    opts.y_column = "Y";
    const CsvData data = load_csv(path, opts);
    EXPECT_EQ(data.x_names, (std::vector<std::string>{"X1", "X2"}));
    EXPECT_EQ(data.data.s(), (Vector{{2.0, 5.0}}));
    EXPECT_EQ(*data.data.y(), (Vector{{0.0, 1.0}}));
}

TEST(Csv, ParseErrorsCarryLocation)
{
    const fs::path d = temp_dir("csv_err");
    CsvOptions opts{"S"};
    opts.y_column = "Y";
    const std::string bad_y = write_file(d / "y.csv", "S,X1,Y\n1,2,0\n3,4,2\n");
    try {
        load_csv(bad_y, opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("'Y'"), std::string::npos);
    }
    const std::string bad_cell = write_file(d / "c.csv", "S,X1\n1,abc\n");
    try {
        load_csv(bad_cell, CsvOptions{"S"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_NE(std::string(e.what()).find("row 2, column 'X1'"), std::string::npos);
    }
    const std::string ok = write_file(d / "ok.csv", "S,X1\n1,2\n");
    EXPECT_EQ(kind_of([&] { load_csv(ok, CsvOptions{"T"}); }), ErrorKind::parse);
    EXPECT_EQ(kind_of([&] { load_csv(write_file(d / "short.csv", "S,X1\n1\n"), CsvOptions{"S"}); }), ErrorKind::parse);
    EXPECT_EQ(kind_of([&] { load_csv((d / "missing.csv").string(), CsvOptions{"S"}); }), ErrorKind::io);
}

TEST(Csv, Transforms)
{
    const fs::path d = temp_dir("csv_tf");
    const std::string path = write_file(d / "a.csv", "S,C,Z\n1,0,1\n2,3,2\n3,7,6\n");
    CsvOptions opts{"S"};
    opts.log1p_columns = {"C"};
    const CsvData logd = load_csv(path, opts);
    EXPECT_NEAR(logd.data.x()(1, 0), std::log(4.0), 1e-15);
    EXPECT_EQ(logd.data.x()(0, 0), 0.0);
    opts.log1p_columns.clear();
    opts.standardize = true;
    const CsvData st = load_csv(path, opts);
    for (Index j = 0; j < 2; ++j) {
        EXPECT_NEAR(st.data.x().col(j).mean(), 0.0, 1e-15);
        EXPECT_NEAR(st.data.x().col(j).squaredNorm() / 3.0, 1.0, 1e-14);
    }
    opts.standardize = false;
    opts.log1p_columns = {"S"};
    EXPECT_EQ(kind_of([&] { load_csv(path, opts); }), ErrorKind::parse);
}

TEST(Csv, WriteLoadRoundTrip)
{
    std::mt19937_64 rng(3);
    const Matrix x = ref::random_matrix(50, 4, rng) * 1e3;
    const Vector s = ref::random_vector(50, rng);
    Vector y = Vector::Zero(50);
    y.head(20).setOnes();
    const CsvData data{Dataset(x, s, y), {"a", "b", "c", "d"}, "s", std::string("y")};
    const fs::path d = temp_dir("csv_rt");
    write_csv(data, (d / "rt.csv").string());
    CsvOptions opts{"s"};
    opts.y_column = "y";
    const CsvData back = load_csv((d / "rt.csv").string(), opts);
    EXPECT_LE((back.data.x() - x).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((back.data.s() - s).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(*back.data.y(), y);
    EXPECT_EQ(back.x_names, data.x_names);
}

TEST(FitReal, RecoversSupportFromSampledCsv)
{
    SimulationConfig sim;
    const DesignSpec spec = simulation_design(sim);
    const Dataset pop = gen_population(spec, 100000, 21);
    std::vector<std::string> names;
    for (Index j = 0; j < 20; ++j) names.push_back("x" + std::to_string(j + 1));
    const fs::path d = temp_dir("fit_real");
    write_csv(CsvData{pop, names, "s", std::string("y")}, (d / "pop.csv").string());
    CsvOptions opts{"s"};
    opts.y_column = "y";
    const CsvData data = load_csv((d / "pop.csv").string(), opts);

    const Json rep = fit_real(data, {0.02});
    const Json& f = rep.at("fits").at(0);
    EXPECT_EQ(f.at("support").get<std::vector<Index>>(), FitResult::support_of(spec.beta0()));
    EXPECT_EQ(f.at("n_q").get<Index>(), 2000);
    EXPECT_TRUE(f.contains("pi_q_hat"));
    EXPECT_TRUE(f.contains("auc"));
    // Same answer as the simulation path on the same rows.
    const UlassoFit direct = fit_ulasso(pop, 0.02);
    EXPECT_EQ(f.at("lambda_selected").get<double>(), direct.fit.lambda);
}

TEST(FitReal, RepeatedLevelAndUnlabeledInput)
{
    SimulationConfig sim;
    sim.p = 6;
    const Dataset pop = gen_population(simulation_design(sim), 5000, 22);
    const CsvData data{Dataset(pop.x(), pop.s()), {"a", "b", "c", "d", "e", "f"}, "s", std::nullopt};
    const Json rep = fit_real(data, {0.1, 0.1});
    EXPECT_EQ(rep.at("combined").at("direction"), rep.at("fits").at(0).at("direction"));
    EXPECT_FALSE(rep.at("fits").at(0).contains("pi_q_hat"));
    EXPECT_FALSE(rep.at("fits").at(0).contains("auc"));
    EXPECT_FALSE(rep.at("combined").contains("auc"));
    for (const char* key : {"beta_hat", "lambda_selected", "support", "n_q", "delta_lo", "delta_hi", "bic_trace"})
        EXPECT_TRUE(rep.at("fits").at(0).contains(key)) << key;
}

TEST(DesignJson, ExplicitAndSimulation)
{
    const DesignSpec a = design_from_json(Json::parse(R"({"beta0": [1, 0], "alpha0": [1, 1], "rho": 0.5})"));
    EXPECT_EQ(a.sigma()(0, 1), 0.5);
    EXPECT_EQ(a.surrogate_noise_sd(), 1.0);
    const DesignSpec b = design_from_json(Json::parse(R"({"simulation": {"p": 9, "n_pop": 1000}, "seed": 3})"));
    EXPECT_EQ(b.p(), 9);
    EXPECT_EQ(kind_of([] { design_from_json(Json::parse(R"({"beta0": [1, 0], "alpha0": [1, 1], "extra": 1})")); }),
              ErrorKind::config);
    const Json rep = theory_report_json(theory_report(a, 0.04));
    EXPECT_TRUE(rep.is_object());
    EXPECT_FALSE(rep.empty());
}
