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

#include "ulasso/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "ulasso/extremes.hpp"
#include "ulasso/metrics.hpp"

namespace ulasso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- config

template <class T>
T get_or(const Json& obj, const char* key, T fallback)
{
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(ErrorKind::config, std::string("config: key '") + key + "' has the wrong type");
    }
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const char* where)
{
    require(obj.is_object(), ErrorKind::config, "config: expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        const bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
        if (!ok) fail(ErrorKind::config, std::string("config: unknown key '") + key + "' in " + where);
    }
}

XiLaw parse_setting(const std::string& s)
{
    if (s == "I") return XiLaw::normal_3_1;
    if (s == "II") return XiLaw::uniform_2_5;
    fail(ErrorKind::config, "config: setting must be \"I\" or \"II\"");
}

SimulationConfig parse_simulation(const Json& sim, std::uint64_t fallback_seed)
{
    reject_unknown(sim, {"setting", "p", "rho", "n_pop", "xi_seed"}, "simulation");
    SimulationConfig out;
    out.xi_law = parse_setting(get_or<std::string>(sim, "setting", "I"));
    out.p = get_or<Index>(sim, "p", out.p);
    out.rho = get_or<double>(sim, "rho", out.rho);
    out.n_pop = get_or<Index>(sim, "n_pop", out.n_pop);
    out.seed = get_or<std::uint64_t>(sim, "xi_seed", fallback_seed);
    return out;
}

// ---------------------------------------------------------------- formatting

std::string join_re(const std::map<std::string, double>& re)
{
    std::string out;
    for (const auto& [k, v] : re) {
        if (!out.empty()) out += ';';
        out += k + '=' + format_double(v);
    }
    return out;
}

double parse_double(std::string_view text, const std::string& where)
{
    if (text == "nan") return kNaN;
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) fail(ErrorKind::parse, "non-numeric value at " + where);
    return v;
}

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string unquote(std::string_view s)
{
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_lines(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

Json number_json(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double json_number(const Json& v)
{
    if (v.is_null()) return kNaN;
    if (v.is_string()) return parse_double(v.get<std::string>(), "json value");
    return v.get<double>();
}

Json vector_json(const Vector& v)
{
    Json arr = Json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(number_json(v[i]));
    return arr;
}

Json index_json(const std::vector<Index>& v)
{
    Json arr = Json::array();
    for (Index i : v) arr.push_back(i);
    return arr;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << text;
    out.close();
    if (!out) fail(ErrorKind::io, "failed writing " + path.string());
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------- replications

struct RepContext
{
    const ExperimentConfig& cfg;
    const DesignSpec& spec;
    Direction truth;
    Direction alpha_dir;
    std::vector<Index> true_support;
};

Vector scores_of(const Matrix& x, const Direction& d)
{
    return x * d.v();
}

double auc_of(const Dataset& val, const Direction& d)
{
    if (d.is_degenerate()) return kNaN;
    return auc(scores_of(val.x(), d), *val.y());
}

std::vector<Index> union_support(const std::vector<std::vector<Index>>& supports)
{
    std::set<Index> all;
    for (const auto& s : supports) all.insert(s.begin(), s.end());
    return {all.begin(), all.end()};
}

std::vector<Index> sample_without_replacement(Index n_pop, Index n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<Index> idx(static_cast<std::size_t>(n_pop));
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index i = 0; i < n; ++i) {
        std::uniform_int_distribution<Index> pick(i, n_pop - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(n));
    return idx;
}

std::vector<RepRecord> run_replication(const RepContext& ctx, int rep)
{
    const ExperimentConfig& cfg = ctx.cfg;
    const auto r = static_cast<std::uint64_t>(rep);
    const Index p = ctx.spec.p();
    const Dataset pop = gen_population(ctx.spec, cfg.sim.n_pop, stream_seed(cfg.seed, r, 0));
    const Dataset val = gen_population(ctx.spec, cfg.validation_size, stream_seed(cfg.seed, r, 1));

    UlassoOptions uopts;
    uopts.grid = cfg.grid;
    uopts.solver = cfg.solver;

    struct PerQ
    {
        Direction dir;
        std::vector<Index> support;
        Index n_q;
        double pi_hat;
    };
    std::vector<PerQ> per_q;
    for (double q : cfg.q_values) {
        UlassoFit uf = fit_ulasso(pop, q, uopts);
        if (!uf.fit.converged) fail(ErrorKind::aborted, "U_LASSO fit did not converge");
        per_q.push_back({normalize_direction(uf.fit.beta_hat, ctx.spec.sigma(), ctx.spec.beta0()),
                         uf.fit.support, uf.subset.n_q(), estimate_pi_q(uf.subset)});
    }

    std::vector<Direction> dirs;
    std::vector<std::vector<Index>> supports;
    for (const PerQ& pq : per_q) {
        dirs.push_back(pq.dir);
        supports.push_back(pq.support);
    }
    const Direction combined = combine_directions(dirs);
    const std::vector<Index> combined_support = union_support(supports);

    struct Named
    {
        std::string name;
        Direction dir;
        std::vector<Index> support;
    };
    std::vector<Named> fixed;
    fixed.push_back({estimator::combined, combined, combined_support});

    LogisticPathOptions sopts;
    sopts.grid = cfg.grid;
    for (std::size_t k = 0; k < cfg.supervised_sizes.size(); ++k) {
        const Index n = cfg.supervised_sizes[k];
        const std::vector<Index> rows = sample_without_replacement(pop.n_rows(), n, stream_seed(cfg.seed, r, 2 + k));
        Matrix xs(n, p);
        Vector ys(n);
        for (Index i = 0; i < n; ++i) {
            xs.row(i) = pop.x().row(rows[static_cast<std::size_t>(i)]);
            ys[i] = (*pop.y())[rows[static_cast<std::size_t>(i)]];
        }
        SlassoFit sf = fit_slasso(xs, ys, sopts);
        if (!sf.fit.converged) fail(ErrorKind::aborted, "S_LASSO fit did not converge at n=" + std::to_string(n));
        fixed.push_back({estimator::slasso(n), normalize_direction(sf.fit.beta_hat, ctx.spec.sigma(), ctx.spec.beta0()),
                         sf.fit.support});
    }
    fixed.push_back({estimator::alpha0, ctx.alpha_dir, FitResult::support_of(ctx.spec.alpha0())});
    fixed.push_back({estimator::beta0, ctx.truth, ctx.true_support});

    std::vector<double> fixed_auc;
    for (const Named& nm : fixed) fixed_auc.push_back(auc_of(val, nm.dir));

    std::vector<RepRecord> out;
    for (std::size_t i = 0; i < cfg.q_values.size(); ++i) {
        const PerQ& pq = per_q[i];
        auto make = [&](const std::string& name, const Direction& d, const std::vector<Index>& supp, double a) {
            const Rates rt = tpr_fpr(supp, ctx.true_support, p);
            return RepRecord{rep, cfg.q_values[i], name, mse_direction(d, ctx.truth), a, rt.tpr, rt.fpr, pq.n_q, pq.pi_hat};
        };
        out.push_back(make(estimator::ulasso, pq.dir, pq.support, auc_of(val, pq.dir)));
        for (std::size_t k = 0; k < fixed.size(); ++k)
            out.push_back(make(fixed[k].name, fixed[k].dir, fixed[k].support, fixed_auc[k]));
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------- public: config

std::string estimator::slasso(Index n)
{
    return "S_LASSO_" + std::to_string(n);
}

std::string setting_label(XiLaw law)
{
    return law == XiLaw::normal_3_1 ? "I" : "II";
}

void ExperimentConfig::validate() const
{
    sim.validate();
    require(!q_values.empty(), ErrorKind::config, "config: q_values must not be empty");
    for (double q : q_values) {
        require(q > 0.0 && q <= 1.0, ErrorKind::config, "config: every q must lie in (0, 1]");
        require(2 * tail_count(sim.n_pop, q) <= sim.n_pop, ErrorKind::config, "config: q too large for N");
    }
    for (Index n : supervised_sizes)
        require(n >= 2 && n <= sim.n_pop, ErrorKind::config, "config: supervised sizes must lie in [2, N]");
    require(n_replications >= 1, ErrorKind::config, "config: need at least one replication");
    require(validation_size >= 2, ErrorKind::config, "config: validation size must be at least 2");
    require(grid.n_points >= 2 && grid.ratio > 0.0 && grid.ratio < 1.0, ErrorKind::config, "config: invalid grid");
    require(solver.tol > 0.0 && solver.max_sweeps >= 1, ErrorKind::config, "config: invalid solver options");
}

ExperimentConfig parse_config(const Json& doc)
{
    reject_unknown(doc, {"simulation", "q_values", "supervised_sizes", "replications", "validation_size", "seed",
                         "grid", "solver", "output_path"},
                   "config");
    ExperimentConfig cfg;
    cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
    cfg.sim = parse_simulation(doc.contains("simulation") ? doc.at("simulation") : Json::object(), cfg.seed);
    cfg.q_values = get_or<std::vector<double>>(doc, "q_values", cfg.q_values);
    cfg.supervised_sizes = get_or<std::vector<Index>>(doc, "supervised_sizes", cfg.supervised_sizes);
    cfg.n_replications = get_or<int>(doc, "replications", cfg.n_replications);
    cfg.validation_size = get_or<Index>(doc, "validation_size", cfg.validation_size);
    cfg.output_path = get_or<std::string>(doc, "output_path", cfg.output_path);
    if (doc.contains("grid")) {
        const Json& g = doc.at("grid");
        reject_unknown(g, {"n_points", "ratio"}, "grid");
        cfg.grid.n_points = get_or<int>(g, "n_points", cfg.grid.n_points);
        cfg.grid.ratio = get_or<double>(g, "ratio", cfg.grid.ratio);
    }
    if (doc.contains("solver")) {
        const Json& s = doc.at("solver");
        reject_unknown(s, {"tol", "max_sweeps"}, "solver");
        cfg.solver.tol = get_or<double>(s, "tol", cfg.solver.tol);
        cfg.solver.max_sweeps = get_or<int>(s, "max_sweeps", cfg.solver.max_sweeps);
    }
    cfg.validate();
    return cfg;
}

Json config_to_json(const ExperimentConfig& cfg)
{
    Json doc;
    doc["simulation"] = {{"setting", setting_label(cfg.sim.xi_law)},
                         {"p", cfg.sim.p},
                         {"rho", cfg.sim.rho},
                         {"n_pop", cfg.sim.n_pop},
                         {"xi_seed", cfg.sim.seed}};
    doc["q_values"] = cfg.q_values;
    doc["supervised_sizes"] = cfg.supervised_sizes;
    doc["replications"] = cfg.n_replications;
    doc["validation_size"] = cfg.validation_size;
    doc["seed"] = cfg.seed;
    doc["grid"] = {{"n_points", cfg.grid.n_points}, {"ratio", cfg.grid.ratio}};
    doc["solver"] = {{"tol", cfg.solver.tol}, {"max_sweeps", cfg.solver.max_sweeps}};
    return doc;
}

// ---------------------------------------------------------------- public: experiment

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers)
{
    cfg.validate();
    const DesignSpec spec = simulation_design(cfg.sim);
    RepContext ctx{cfg, spec,
                   normalize_direction(spec.beta0(), spec.sigma(), spec.beta0()),
                   normalize_direction(spec.alpha0(), spec.sigma(), spec.beta0()),
                   FitResult::support_of(spec.beta0())};

    const int reps = cfg.n_replications;
    std::vector<std::vector<RepRecord>> per_rep(static_cast<std::size_t>(reps));
    std::vector<std::string> errors(static_cast<std::size_t>(reps));
    std::vector<char> failed(static_cast<std::size_t>(reps), 0);
    std::atomic<int> next{0};

    auto worker = [&]() {
        for (int r = next++; r < reps; r = next++) {
            const auto i = static_cast<std::size_t>(r);
            try {
                per_rep[i] = run_replication(ctx, r);
            } catch (const std::exception& e) {
                failed[i] = 1;
                errors[i] = e.what();
            }
        }
    };
    const int n_threads = std::clamp(workers, 1, reps);
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    ExperimentResult result;
    for (int r = 0; r < reps; ++r) {
        const auto i = static_cast<std::size_t>(r);
        if (failed[i]) {
            result.failures.push_back({r, errors[i]});
            continue;
        }
        for (RepRecord& rec : per_rep[i]) result.records.push_back(std::move(rec));
    }
    if (10 * result.failures.size() > static_cast<std::size_t>(reps))
        fail(ErrorKind::aborted, std::to_string(result.failures.size()) + " of " + std::to_string(reps) +
                                     " replications failed; first: " + result.failures.front().message);
    result.rows = aggregate(cfg, result.records);
    return result;
}

std::vector<ResultRow> aggregate(const ExperimentConfig& cfg, const std::vector<RepRecord>& records)
{
    struct Acc
    {
        double q;
        std::string name;
        double mse = 0, auc = 0, tpr = 0, fpr = 0, pi = 0;
        Index n_q = 0;
        int count = 0;
        int auc_count = 0;
    };
    std::vector<Acc> accs;
    for (const RepRecord& rec : records) {
        auto it = std::find_if(accs.begin(), accs.end(),
                               [&](const Acc& a) { return a.q == rec.q && a.name == rec.estimator; });
        if (it == accs.end()) {
            accs.push_back(Acc{rec.q, rec.estimator});
            it = accs.end() - 1;
        }
        it->mse += rec.mse;
        it->tpr += rec.tpr;
        it->fpr += rec.fpr;
        it->pi += rec.pi_q_hat;
        it->n_q = rec.n_q;
        it->count += 1;
        if (std::isfinite(rec.auc)) {
            it->auc += rec.auc;
            it->auc_count += 1;
        }
    }

    std::vector<ResultRow> rows;
    for (const Acc& a : accs) {
        ResultRow row;
        row.setting = setting_label(cfg.sim.xi_law);
        row.rho = cfg.sim.rho;
        row.q = a.q;
        row.p = cfg.sim.p;
        row.estimator = a.name;
        row.mse = a.mse / a.count;
        row.auc = a.auc_count > 0 ? a.auc / a.auc_count : kNaN;
        row.tpr = a.tpr / a.count;
        row.fpr = a.fpr / a.count;
        row.n_q = a.n_q;
        row.pi_q_hat = a.pi / a.count;
        rows.push_back(std::move(row));
    }
    // Relative efficiencies of the unsupervised estimators against every other
    // estimator at the same q, except the oracle whose error is zero by construction.
    for (ResultRow& row : rows) {
        if (row.estimator != estimator::ulasso && row.estimator != estimator::combined) continue;
        for (const ResultRow& other : rows) {
            if (other.q != row.q || other.estimator == row.estimator || other.estimator == estimator::beta0) continue;
            row.re_vs[other.estimator] = relative_efficiency(row.mse, other.mse);
        }
    }
    return rows;
}

// ---------------------------------------------------------------- public: tables

const std::vector<std::string> kResultColumns{"setting", "rho", "q",   "p",   "estimator", "mse",
                                              "re_vs",   "auc", "tpr", "fpr", "n_q",       "pi_q_hat"};

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string rows_to_csv(const std::vector<ResultRow>& rows)
{
    std::string out;
    for (std::size_t i = 0; i < kResultColumns.size(); ++i) out += (i ? "," : "") + kResultColumns[i];
    out += '\n';
    for (const ResultRow& r : rows) {
        out += r.setting + ',' + format_double(r.rho) + ',' + format_double(r.q) + ',' + std::to_string(r.p) + ',' +
               r.estimator + ',' + format_double(r.mse) + ',' + join_re(r.re_vs) + ',' + format_double(r.auc) + ',' +
               format_double(r.tpr) + ',' + format_double(r.fpr) + ',' + std::to_string(r.n_q) + ',' +
               format_double(r.pi_q_hat) + '\n';
    }
    return out;
}

Json rows_to_json(const std::vector<ResultRow>& rows)
{
    Json arr = Json::array();
    for (const ResultRow& r : rows) {
        Json re = Json::object();
        for (const auto& [k, v] : r.re_vs) re[k] = number_json(v);
        arr.push_back({{"setting", r.setting},
                       {"rho", number_json(r.rho)},
                       {"q", number_json(r.q)},
                       {"p", r.p},
                       {"estimator", r.estimator},
                       {"mse", number_json(r.mse)},
                       {"re_vs", re},
                       {"auc", number_json(r.auc)},
                       {"tpr", number_json(r.tpr)},
                       {"fpr", number_json(r.fpr)},
                       {"n_q", r.n_q},
                       {"pi_q_hat", number_json(r.pi_q_hat)}});
    }
    return arr;
}

std::vector<ResultRow> rows_from_json(const Json& doc)
{
    require(doc.is_array(), ErrorKind::parse, "rows_from_json: expected an array");
    std::vector<ResultRow> rows;
    try {
        for (const Json& j : doc) {
            ResultRow r;
            r.setting = j.at("setting").get<std::string>();
            r.rho = json_number(j.at("rho"));
            r.q = json_number(j.at("q"));
            r.p = j.at("p").get<Index>();
            r.estimator = j.at("estimator").get<std::string>();
            r.mse = json_number(j.at("mse"));
            for (const auto& [k, v] : j.at("re_vs").items()) r.re_vs[k] = json_number(v);
            r.auc = json_number(j.at("auc"));
            r.tpr = json_number(j.at("tpr"));
            r.fpr = json_number(j.at("fpr"));
            r.n_q = j.at("n_q").get<Index>();
            r.pi_q_hat = json_number(j.at("pi_q_hat"));
            rows.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, std::string("rows_from_json: ") + e.what());
    }
    return rows;
}

std::string records_to_csv(const std::vector<RepRecord>& records)
{
    std::string out = "rep,q,estimator,mse,auc,tpr,fpr,n_q,pi_q_hat\n";
    for (const RepRecord& r : records) {
        out += std::to_string(r.rep) + ',' + format_double(r.q) + ',' + r.estimator + ',' + format_double(r.mse) + ',' +
               format_double(r.auc) + ',' + format_double(r.tpr) + ',' + format_double(r.fpr) + ',' +
               std::to_string(r.n_q) + ',' + format_double(r.pi_q_hat) + '\n';
    }
    return out;
}

std::vector<RepRecord> records_from_csv(const std::string& text)
{
    const std::vector<std::string> lines = split_lines(text);
    require(!lines.empty(), ErrorKind::parse, "records_from_csv: empty input");
    std::vector<RepRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_commas(lines[i]);
        const std::string where = "line " + std::to_string(i + 1);
        require(f.size() == 9, ErrorKind::parse, "records_from_csv: wrong field count");
        RepRecord r;
        r.rep = static_cast<int>(parse_double(f[0], where));
        r.q = parse_double(f[1], where);
        r.estimator = std::string(f[2]);
        r.mse = parse_double(f[3], where);
        r.auc = parse_double(f[4], where);
        r.tpr = parse_double(f[5], where);
        r.fpr = parse_double(f[6], where);
        r.n_q = static_cast<Index>(parse_double(f[7], where));
        r.pi_q_hat = parse_double(f[8], where);
        out.push_back(std::move(r));
    }
    return out;
}

void emit_tables(const ExperimentResult& result, const ExperimentConfig& cfg, const std::string& dir,
                 TableFormat format)
{
    require(!result.rows.empty(), ErrorKind::domain, "emit_tables: no result rows");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create output directory " + dir);
    const std::filesystem::path base(dir);

    auto prefix = [](const ResultRow& r) {
        return r.setting + ',' + format_double(r.rho) + ',' + format_double(r.q) + ',' + std::to_string(r.p) + ',' +
               r.estimator;
    };
    auto key_json = [](const ResultRow& r) {
        return Json{{"setting", r.setting}, {"rho", r.rho}, {"q", r.q}, {"p", r.p}, {"estimator", r.estimator}};
    };

    if (format == TableFormat::csv) {
        std::string re = "setting,rho,q,p,estimator,reference,re\n";
        std::string au = "setting,rho,q,p,estimator,auc\n";
        std::string sel = "setting,rho,q,p,estimator,tpr,fpr\n";
        for (const ResultRow& r : result.rows) {
            for (const auto& [ref, v] : r.re_vs) re += prefix(r) + ',' + ref + ',' + format_double(v) + '\n';
            au += prefix(r) + ',' + format_double(r.auc) + '\n';
            sel += prefix(r) + ',' + format_double(r.tpr) + ',' + format_double(r.fpr) + '\n';
        }
        write_text(base / "results.csv", rows_to_csv(result.rows));
        write_text(base / "table_re.csv", re);
        write_text(base / "table_auc.csv", au);
        write_text(base / "table_selection.csv", sel);
    } else {
        Json re = Json::array(), au = Json::array(), sel = Json::array();
        for (const ResultRow& r : result.rows) {
            for (const auto& [ref, v] : r.re_vs) {
                Json j = key_json(r);
                j["reference"] = ref;
                j["re"] = number_json(v);
                re.push_back(std::move(j));
            }
            Json a = key_json(r);
            a["auc"] = number_json(r.auc);
            au.push_back(std::move(a));
            Json s = key_json(r);
            s["tpr"] = number_json(r.tpr);
            s["fpr"] = number_json(r.fpr);
            sel.push_back(std::move(s));
        }
        write_text(base / "results.json", rows_to_json(result.rows).dump(2) + '\n');
        write_text(base / "table_re.json", re.dump(2) + '\n');
        write_text(base / "table_auc.json", au.dump(2) + '\n');
        write_text(base / "table_selection.json", sel.dump(2) + '\n');
    }
    write_text(base / "replications.csv", records_to_csv(result.records));
    std::string fails = "rep,message\n";
    for (const RepFailure& f : result.failures) {
        std::string msg = f.message;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        fails += std::to_string(f.rep) + ',' + msg + '\n';
    }
    write_text(base / "failures.csv", fails);
    write_text(base / "config.json", config_to_json(cfg).dump(2) + '\n');
}

// ---------------------------------------------------------------- public: CSV data

CsvData load_csv(const std::string& path, const CsvOptions& opts)
{
    std::string text = read_text(path);
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
    const std::vector<std::string> lines = split_lines(text);
    require(!lines.empty(), ErrorKind::parse, "load_csv: missing header row");

    std::vector<std::string> header;
    for (std::string_view h : split_commas(lines[0])) header.push_back(unquote(h));
    const Index n_cols = static_cast<Index>(header.size());
    auto find_col = [&](const std::string& name) -> Index {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) fail(ErrorKind::parse, "load_csv: column '" + name + "' not found in header");
        return it - header.begin();
    };
    const Index s_idx = find_col(opts.s_column);
    const Index y_idx = opts.y_column ? find_col(*opts.y_column) : -1;
    require(y_idx != s_idx, ErrorKind::parse, "load_csv: S and Y must be different columns");

    std::vector<Index> x_idx;
    CsvData out{Dataset(Matrix::Zero(1, 0), Vector::Zero(1)), {}, opts.s_column, opts.y_column};
    for (Index c = 0; c < n_cols; ++c) {
        if (c == s_idx || c == y_idx) continue;
        x_idx.push_back(c);
        out.x_names.push_back(header[static_cast<std::size_t>(c)]);
    }

    const Index n = static_cast<Index>(lines.size()) - 1;
    require(n >= 1, ErrorKind::parse, "load_csv: no data rows");
    const Index p = static_cast<Index>(x_idx.size());
    Matrix x(n, p);
    Vector s(n);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        const auto fields = split_commas(lines[static_cast<std::size_t>(i + 1)]);
        const std::string row_label = "row " + std::to_string(i + 2);
        if (static_cast<Index>(fields.size()) != n_cols)
            fail(ErrorKind::parse, "load_csv: " + row_label + " has " + std::to_string(fields.size()) +
                                       " fields, header has " + std::to_string(n_cols));
        auto cell = [&](Index c) {
            const std::string where = row_label + ", column '" + header[static_cast<std::size_t>(c)] + "'";
            const double v = parse_double(trim(fields[static_cast<std::size_t>(c)]), where);
            if (!std::isfinite(v)) fail(ErrorKind::parse, "load_csv: non-finite value at " + where);
            return v;
        };
        s[i] = cell(s_idx);
        for (Index j = 0; j < p; ++j) x(i, j) = cell(x_idx[static_cast<std::size_t>(j)]);
        if (y_idx >= 0) {
            y[i] = cell(y_idx);
            if (y[i] != 0.0 && y[i] != 1.0)
                fail(ErrorKind::parse, "load_csv: label at " + row_label + ", column '" + *opts.y_column +
                                           "' must be 0 or 1");
        }
    }

    for (const std::string& name : opts.log1p_columns) {
        auto it = std::find(out.x_names.begin(), out.x_names.end(), name);
        if (it == out.x_names.end()) fail(ErrorKind::parse, "load_csv: log1p column '" + name + "' is not a covariate");
        const Index j = it - out.x_names.begin();
        for (Index i = 0; i < n; ++i) {
            if (!(x(i, j) > -1.0))
                fail(ErrorKind::parse, "load_csv: log1p needs values above -1 at row " + std::to_string(i + 2) +
                                           ", column '" + name + "'");
            x(i, j) = std::log1p(x(i, j));
        }
    }
    if (opts.standardize) {
        for (Index j = 0; j < p; ++j) {
            const double mean = x.col(j).mean();
            x.col(j).array() -= mean;
            const double sd = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n));
            if (sd > 0.0) x.col(j) /= sd;
        }
    }
    out.data = Dataset(std::move(x), std::move(s), y_idx >= 0 ? std::optional<Vector>(std::move(y)) : std::nullopt);
    return out;
}

void write_csv(const CsvData& data, const std::string& path)
{
    const Dataset& ds = data.data;
    std::string out = data.s_name;
    for (const std::string& name : data.x_names) out += ',' + name;
    if (data.y_name) out += ',' + *data.y_name;
    out += '\n';
    for (Index i = 0; i < ds.n_rows(); ++i) {
        out += format_double(ds.s()[i]);
        for (Index j = 0; j < ds.p(); ++j) out += ',' + format_double(ds.x()(i, j));
        if (data.y_name) out += ',' + format_double((*ds.y())[i]);
        out += '\n';
    }
    write_text(path, out);
}

// ---------------------------------------------------------------- public: real-data workflow

Json fit_real(const CsvData& data, const std::vector<double>& q_values, const UlassoOptions& opts)
{
    require(!q_values.empty(), ErrorKind::domain, "fit_real: no q values");
    const Dataset& ds = data.data;
    const Index p = ds.p();
    require(p >= 1, ErrorKind::domain, "fit_real: no covariate columns");
    const Matrix identity = Matrix::Identity(p, p);

    // Least-squares direction of S on X over the full data; it orients every estimate.
    const Matrix xc = ds.x().rowwise() - ds.x().colwise().mean();
    const Vector sc = ds.s().array() - ds.s().mean();
    const Vector alpha_hat = xc.completeOrthogonalDecomposition().solve(sc);
    const Direction alpha_dir = normalize_direction(alpha_hat, identity, alpha_hat, Orientation::surrogate_alpha);
    const std::optional<Vector> ref =
        alpha_dir.is_degenerate() ? std::nullopt : std::optional<Vector>(alpha_dir.v());

    auto names_of = [&](const std::vector<Index>& idx) {
        Json arr = Json::array();
        for (Index j : idx) arr.push_back(data.x_names[static_cast<std::size_t>(j)]);
        return arr;
    };
    auto auc_json = [&](const Direction& d) -> Json {
        if (!ds.labeled() || d.is_degenerate()) return nullptr;
        return number_json(auc(ds.x() * d.v(), *ds.y()));
    };

    Json report;
    report["n_rows"] = ds.n_rows();
    report["p"] = p;
    report["s_column"] = data.s_name;
    report["covariates"] = data.x_names;
    report["labeled"] = ds.labeled();
    report["orientation"] = "surrogate_alpha";

    Json fits = Json::array();
    std::vector<Direction> dirs;
    std::vector<std::vector<Index>> supports;
    for (double q : q_values) {
        UlassoFit uf = fit_ulasso(ds, q, opts);
        const Direction dir = normalize_direction(uf.fit.beta_hat, identity, ref, Orientation::surrogate_alpha);
        Json trace = Json::array();
        for (std::size_t k = 0; k < uf.trace.lambdas.size(); ++k)
            trace.push_back({{"lambda", uf.trace.lambdas[k]},
                             {"bic", uf.trace.bic_values[k]},
                             {"df", uf.trace.fits[k].support.size()}});
        Json f;
        f["q"] = q;
        f["beta_hat"] = vector_json(uf.fit.beta_hat);
        f["direction"] = vector_json(dir.v());
        f["degenerate"] = dir.is_degenerate();
        f["lambda_selected"] = uf.fit.lambda;
        f["support"] = index_json(uf.fit.support);
        f["support_names"] = names_of(uf.fit.support);
        f["n_q"] = uf.subset.n_q();
        f["delta_lo"] = uf.subset.delta_lo();
        f["delta_hi"] = uf.subset.delta_hi();
        f["kkt_residual"] = uf.fit.kkt_residual;
        f["converged"] = uf.fit.converged;
        f["bic_trace"] = std::move(trace);
        if (ds.labeled()) {
            f["pi_q_hat"] = estimate_pi_q(uf.subset);
            f["auc"] = auc_json(dir);
        }
        fits.push_back(std::move(f));
        dirs.push_back(dir);
        supports.push_back(uf.fit.support);
    }
    report["fits"] = std::move(fits);

    const Direction combined = combine_directions(dirs);
    const std::vector<Index> combined_support = union_support(supports);
    Json comb;
    comb["direction"] = vector_json(combined.v());
    comb["degenerate"] = combined.is_degenerate();
    comb["support"] = index_json(combined_support);
    comb["support_names"] = names_of(combined_support);
    if (ds.labeled()) comb["auc"] = auc_json(combined);
    report["combined"] = std::move(comb);

    Json alpha;
    alpha["coefficients"] = vector_json(alpha_hat);
    alpha["direction"] = vector_json(alpha_dir.v());
    alpha["degenerate"] = alpha_dir.is_degenerate();
    if (ds.labeled()) alpha["auc"] = auc_json(alpha_dir);
    report["alpha_direction"] = std::move(alpha);
    return report;
}

// ---------------------------------------------------------------- public: theory

DesignSpec design_from_json(const Json& doc)
{
    try {
        if (doc.contains("beta0")) {
            reject_unknown(doc, {"sigma", "rho", "beta0", "alpha0", "noise_sd"}, "design");
            const auto b = doc.at("beta0").get<std::vector<double>>();
            const auto a = doc.at("alpha0").get<std::vector<double>>();
            const auto p = static_cast<Index>(b.size());
            Matrix sigma = Matrix::Identity(p, p);
            if (doc.contains("sigma")) {
                const auto rows = doc.at("sigma").get<std::vector<std::vector<double>>>();
                require(static_cast<Index>(rows.size()) == p, ErrorKind::config, "design: sigma must be p x p");
                for (Index i = 0; i < p; ++i) {
                    require(static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) == p, ErrorKind::config,
                            "design: sigma must be p x p");
                    for (Index j = 0; j < p; ++j) sigma(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                }
            } else if (doc.contains("rho")) {
                sigma = ar1_covariance(p, doc.at("rho").get<double>());
            }
            Vector bv = Eigen::Map<const Vector>(b.data(), p);
            Vector av = Eigen::Map<const Vector>(a.data(), static_cast<Index>(a.size()));
            return DesignSpec(std::move(sigma), std::move(bv), std::move(av), get_or<double>(doc, "noise_sd", 1.0));
        }
        const Json& sim = doc.contains("simulation") ? doc.at("simulation") : doc;
        const auto seed = get_or<std::uint64_t>(doc, "seed", 1);
        return simulation_design(parse_simulation(sim, seed));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, std::string("design: ") + e.what());
    }
}

Json theory_report_json(const TheoryReport& r)
{
    const TheoryParams& tp = r.params;
    Json j;
    j["q"] = r.q;
    j["params"] = {{"sigma_s", tp.sigma_s},
                   {"alpha_var", tp.alpha_var},
                   {"gamma0", vector_json(tp.gamma0)},
                   {"eta0", tp.eta0},
                   {"rho0", tp.rho0},
                   {"rho_tilde", tp.rho_tilde},
                   {"beta_gamma", tp.beta_gamma},
                   {"lambda_max_sigma", tp.lambda_max_sigma},
                   {"z_q", tp.z_q},
                   {"z_bar_q", tp.z_bar_q}};
    j["tail_moments"] = {{"mean_hi", r.moments.mean_hi},
                         {"mean_lo", r.moments.mean_lo},
                         {"var_s", r.moments.var_s},
                         {"mean_x_scale", r.moments.mean_x_scale}};
    j["envelope_s"] = {{"variance", r.envelope_s.variance}, {"prefactor", r.envelope_s.prefactor}};
    j["envelope_x"] = {{"variance", r.envelope_x.variance}, {"prefactor", r.envelope_x.prefactor}};
    if (r.pi_bounds)
        j["pi_q_bounds"] = {{"bound1", number_json(r.pi_bounds->bound1)},
                            {"bound2", number_json(r.pi_bounds->bound2)},
                            {"bound3_unit_constant", number_json(r.pi_bounds->bound3)}};
    else
        j["pi_q_bounds"] = nullptr;
    j["threshold_bounds"] = {{"upper", r.quantile_bounds.upper},
                             {"lower", r.quantile_bounds.lower ? Json(*r.quantile_bounds.lower) : Json(nullptr)}};
    j["xi"] = {{"xi_q", r.xi.xi_q}, {"xi_tilde_q", r.xi.xi_tilde_q}, {"xi_star_q", r.xi.xi_star_q}};
    j["alpha_bar"] = vector_json(r.alpha_bar);
    j["lambda_min_sigma_q"] = r.lambda_min_sigma_q;
    j["c1_holds"] = r.c1_holds;
    if (r.deviation_unit)
        j["deviation_constants"] = {{"d_bar", r.deviation_unit->d_bar},
                                    {"d1", r.deviation_unit->d1},
                                    {"d2", r.deviation_unit->d2},
                                    {"c_min", r.deviation_unit->c_min},
                                    {"c_max", r.deviation_unit->c_max},
                                    {"bound_per_lambda_over_kappa", r.deviation_unit->bound}};
    else
        j["deviation_constants"] = nullptr;
    return j;
}

} // namespace ulasso
