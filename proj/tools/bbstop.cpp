// Command-line front-end: boundary solves, volatility inference with
// confidence curves, the coverage and payoff studies, and data-bundle
// profit aggregation. Every run writes a manifest next to its outputs.
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bbstop/boundary.hpp"
#include "bbstop/bridge.hpp"
#include "bbstop/csv.hpp"
#include "bbstop/inference.hpp"
#include "bbstop/market_data.hpp"
#include "bbstop/parallel.hpp"
#include "bbstop/simulation.hpp"
#include "bbstop/types.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

using nlohmann::json;

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot digest missing file: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

struct Manifest {
    std::string command;
    json config = json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string error;

    void write(const std::string& path) const {
        json j;
        j["command"] = command;
        j["version"] = kToolVersion;
        j["config"] = config;
        j["seed"] = seed;
        json in = json::object();
        for (const auto& f : inputs) in[f] = file_digest(f);
        j["inputs"] = in;
        json out = json::object();
        for (const auto& f : outputs) {
            std::ifstream probe(f);
            out[f] = probe ? file_digest(f) : "missing";
        }
        j["outputs"] = out;
        if (!error.empty()) j["error"] = error;
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot write manifest: " + path);
        os << j.dump(2) << '\n';
    }
};

// Runs the body, writing the manifest on both success and failure.
int guarded(Manifest& manifest, const std::string& manifest_path,
            const std::function<void()>& body) {
    try {
        body();
        manifest.write(manifest_path);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        manifest.error = e.what();
        try {
            manifest.write(manifest_path);
        } catch (const std::exception& me) {
            std::cerr << "error: " << me.what() << '\n';
        }
        return 1;
    }
}

bbstop::TimeGrid make_grid(const std::string& kind, std::size_t nodes, double horizon) {
    if (kind == "uniform") return bbstop::uniform_grid(nodes, horizon);
    return bbstop::log_grid(nodes, horizon);
}

double jget(const json& j, const char* field) {
    if (!j.contains(field)) throw std::runtime_error(std::string("config: missing field '") + field + "'");
    if (!j[field].is_number()) throw std::runtime_error(std::string("config: field '") + field + "' must be a number");
    return j[field].get<double>();
}

std::uint64_t jget_u64(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number_unsigned())
        throw std::runtime_error(std::string("config: field '") + field +
                                 "' must be a non-negative integer");
    return j[field].get<std::uint64_t>();
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
    double strike = 0.0, horizon = 1.0, sigma = 0.0, lambda = 0.0, delta = 1e-3;
    std::size_t nodes = 200;
    std::string grid = "log", side = "put", out;
};

int run_solve(const SolveArgs& a) {
    Manifest m;
    m.command = "solve";
    m.config = {{"strike", a.strike}, {"horizon", a.horizon}, {"sigma", a.sigma},
                {"lambda", a.lambda}, {"delta", a.delta},     {"nodes", a.nodes},
                {"grid", a.grid},     {"side", a.side},       {"out", a.out}};
    const std::string csv = a.out + ".csv";
    const std::string js = a.out + ".json";
    m.outputs = {csv, js};
    return guarded(m, a.out + ".manifest.json", [&] {
        bbstop::BridgeSpec spec{a.strike, a.horizon, a.sigma, a.lambda};
        bbstop::SolverConfig config{a.delta, 1000, make_grid(a.grid, a.nodes, a.horizon)};
        bbstop::SolverStats stats;
        bbstop::Boundary b = bbstop::solve_boundary(spec, config, &stats);
        if (a.side == "call") b = bbstop::call_boundary_from_put(b, a.strike);
        bbstop::write_boundary_csv(b, csv);
        bbstop::write_boundary_json(b, spec, a.delta, &stats, js);
        std::cout << "solved " << a.side << " boundary on " << a.nodes << "+1 nodes, b(0)="
                  << bbstop::format_full(b.values.front()) << '\n';
    });
}

// ---------------------------------------------------------------- infer

struct InferArgs {
    std::string path, out;
    double use_fraction = 1.0, alpha = 0.05, fd_step = 1e-2, delta = 1e-3;
    double strike = 0.0, horizon = 1.0, lambda = 0.0;
    std::size_t nodes = 200;
};

int run_infer(const InferArgs& a) {
    Manifest m;
    m.command = "infer";
    m.config = {{"path", a.path},         {"use-fraction", a.use_fraction},
                {"alpha", a.alpha},       {"fd-step", a.fd_step},
                {"delta", a.delta},       {"strike", a.strike},
                {"horizon", a.horizon},   {"lambda", a.lambda},
                {"nodes", a.nodes},       {"out", a.out}};
    m.inputs = {a.path};
    const std::string band_csv = a.out + ".csv";
    m.outputs = {band_csv};
    return guarded(m, a.out + ".manifest.json", [&] {
        bbstop::PricePath full = bbstop::read_price_path_csv(a.path);
        if (!(a.use_fraction > 0.0 && a.use_fraction <= 1.0))
            throw std::runtime_error("infer: --use-fraction must lie in (0, 1]");
        const std::size_t last = full.size() - 1;
        const std::size_t cut =
            static_cast<std::size_t>(std::floor(a.use_fraction * static_cast<double>(last)));
        bbstop::PricePath history;
        history.times.assign(full.times.begin(), full.times.begin() + cut + 1);
        history.values.assign(full.values.begin(), full.values.begin() + cut + 1);

        bbstop::BridgeSpec spec{a.strike, a.horizon, 1.0, a.lambda};
        bbstop::VolEstimate est = bbstop::mle_sigma(history, spec);
        if (est.degenerate())
            throw std::runtime_error("infer: degenerate estimate sigma_hat = 0 "
                                     "(path lies on the deterministic bridge line)");
        std::cout << "sigma_hat=" << bbstop::format_full(est.sigma_hat) << " n=" << est.n
                  << " fisher=" << bbstop::format_full(est.fisher) << '\n';
        bbstop::SolverConfig config{a.delta, 1000, bbstop::log_grid(a.nodes, a.horizon)};
        bbstop::ConfidenceBand band =
            bbstop::confidence_curves(est, spec, config, a.alpha, a.fd_step);
        bbstop::write_band_csv(band, band_csv);
    });
}

// ---------------------------------------------------------------- study

struct StudyArgs {
    std::string kind, config, out;
    int workers = bbstop::default_workers();
};

int run_study(const StudyArgs& a) {
    Manifest m;
    m.command = "study";
    m.config = {{"kind", a.kind}, {"config", a.config}, {"out", a.out}};
    m.inputs = {a.config};
    const std::string csv = a.out + ".csv";
    m.outputs = {csv};
    return guarded(m, a.out + ".manifest.json", [&] {
        std::ifstream in(a.config);
        if (!in) throw std::runtime_error("cannot open config: " + a.config);
        json j = json::parse(in);

        if (a.kind == "coverage") {
            bbstop::BridgeSpec spec{jget(j, "strike"), jget(j, "horizon"), jget(j, "sigma"),
                                    jget(j, "lambda")};
            m.seed = jget_u64(j, "seed");
            bbstop::CoverageResult res = bbstop::coverage_experiment(
                jget(j, "sigma"), static_cast<std::size_t>(jget(j, "n")),
                static_cast<std::size_t>(jget(j, "nodes")),
                static_cast<std::size_t>(jget(j, "replications")), jget(j, "alpha"), spec,
                jget(j, "x0"), m.seed, a.workers);
            bbstop::write_coverage_csv(res, csv);
            std::cout << "coverage: " << res.replications << " replications, " << res.failures
                      << " failures, reference band [" << bbstop::format_full(res.band_lower)
                      << ", " << bbstop::format_full(res.band_upper) << "]\n";
        } else if (a.kind == "payoff") {
            if (!j.contains("spec")) throw std::runtime_error("config: missing field 'spec'");
            const json& s = j["spec"];
            bbstop::ExperimentConfig cfg;
            cfg.spec = bbstop::BridgeSpec{jget(s, "strike"), jget(s, "horizon"),
                                          jget(s, "sigma"), jget(s, "lambda")};
            cfg.x0 = jget(j, "x0");
            cfg.base_nodes = static_cast<std::size_t>(jget(j, "base_nodes"));
            cfg.frequency = static_cast<std::size_t>(jget(j, "frequency"));
            cfg.replications = static_cast<std::size_t>(jget(j, "replications"));
            if (!j.contains("quantiles") || !j["quantiles"].is_array())
                throw std::runtime_error("config: field 'quantiles' must be an array");
            cfg.quantiles = j["quantiles"].get<std::vector<double>>();
            if (!j.contains("eval_indices") || !j["eval_indices"].is_array())
                throw std::runtime_error("config: field 'eval_indices' must be an array");
            cfg.eval_indices = j["eval_indices"].get<std::vector<std::size_t>>();
            if (j.contains("estimation_fraction"))
                cfg.estimation_fraction = jget(j, "estimation_fraction");
            if (j.contains("alpha")) cfg.alpha = jget(j, "alpha");
            if (j.contains("fd_step")) cfg.fd_step = jget(j, "fd_step");
            if (j.contains("delta")) cfg.delta = jget(j, "delta");
            cfg.seed = jget_u64(j, "seed");
            cfg.workers = a.workers;
            m.seed = cfg.seed;
            bbstop::PayoffStudy study = bbstop::run_payoff_study(cfg);
            bbstop::write_payoff_csv(study, csv);
            std::cout << "payoff study: " << study.cells.size() << " cells\n";
        } else {
            throw std::runtime_error("study: --kind must be coverage or payoff");
        }
    });
}

// ---------------------------------------------------------------- data

struct DataArgs {
    std::string bundle, out, side = "put";
    std::vector<std::string> strategies;  // name=boundary.csv
    std::vector<double> rho;
    std::vector<double> thresholds;
};

std::vector<std::vector<std::string>> read_csv_rows(const std::string& file,
                                                    const std::string& header,
                                                    std::size_t columns) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open: " + file);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(file + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw std::runtime_error(file + ": expected header '" + header + "'");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) fields.push_back(cell);
        if (fields.size() != columns)
            throw std::runtime_error(file + ": wrong column count in row '" + line + "'");
        rows.push_back(std::move(fields));
    }
    return rows;
}

int run_data(const DataArgs& a) {
    Manifest m;
    m.command = "data";
    m.config = {{"bundle", a.bundle}, {"side", a.side},  {"strategies", a.strategies},
                {"rho", a.rho},       {"thresholds", a.thresholds}, {"out", a.out}};
    const std::string profit_csv = a.out + "_profit.csv";
    const std::string relative_csv = a.out + "_relative.csv";
    m.outputs = {profit_csv};

    return guarded(m, a.out + ".manifest.json", [&] {
        if (a.strategies.empty()) throw std::runtime_error("data: at least one --strategy required");
        const bbstop::OptionSide side =
            a.side == "call" ? bbstop::OptionSide::call : bbstop::OptionSide::put;

        std::vector<std::pair<std::string, bbstop::StoppingRule>> rules;
        for (const std::string& s : a.strategies) {
            const auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
                throw std::runtime_error("data: --strategy must be name=boundary.csv, got '" + s + "'");
            const std::string name = s.substr(0, eq);
            const std::string file = s.substr(eq + 1);
            m.inputs.push_back(file);
            rules.emplace_back(name, bbstop::StoppingRule{bbstop::read_boundary_csv(file, side)});
        }

        const std::string meta = a.bundle + "/meta.csv";
        m.inputs.push_back(meta);
        const auto meta_rows = read_csv_rows(meta, "id,strike,expiry", 3);
        if (meta_rows.empty()) throw std::runtime_error(meta + ": no options listed");

        std::map<long, double> rates;
        {
            std::ifstream probe(a.bundle + "/rates.csv");
            if (probe) {
                m.inputs.push_back(a.bundle + "/rates.csv");
                for (const auto& r : read_csv_rows(a.bundle + "/rates.csv", "date,rate", 2))
                    rates[std::stol(r[0])] = std::stod(r[1]);
            }
        }

        std::vector<bbstop::ProfitSample> samples;
        for (const auto& row : meta_rows) {
            bbstop::OptionRecord rec;
            rec.id = row[0];
            rec.strike = std::stod(row[1]);
            const std::string path_file = a.bundle + "/path_" + rec.id + ".csv";
            m.inputs.push_back(path_file);
            rec.path = bbstop::read_price_path_csv(path_file);
            bbstop::PricePath norm = bbstop::normalize(rec);
            const double dev = bbstop::pinning_deviance(norm);
            const double lifespan_days = rec.path.times.back() - rec.path.times.front();

            for (double rho : a.rho) {
                bbstop::SplitPath split = bbstop::split_path(norm, rho);
                if (split.history_degenerate) continue;
                double lambda = 0.0;
                if (!rates.empty()) {
                    const long day = static_cast<long>(
                        std::floor(rec.path.times[split.split_index]));
                    const auto it = rates.find(day);
                    // Annualized rate scaled to the normalized lifetime.
                    if (it != rates.end()) lambda = it->second * lifespan_days / 365.0;
                }
                for (const auto& [name, rule] : rules) {
                    const double profit =
                        bbstop::discounted_payoff(split.future, rule, 1.0, lambda, 0);
                    samples.push_back({rec.id, dev, rho, name, profit});
                }
            }
        }
        if (samples.empty()) throw std::runtime_error("data: no usable (option, rho) pairs");

        std::vector<bbstop::ProfitAggregate> aggregates;
        for (double p : a.thresholds)
            aggregates.push_back(bbstop::aggregate_profit(samples, p));
        bbstop::write_profit_csv(aggregates, profit_csv);
        if (rules.size() >= 2) {
            m.outputs.push_back(relative_csv);
            bbstop::write_relative_profit_csv(aggregates, rules[0].first, rules[1].first,
                                              relative_csv);
        }
        std::cout << "data: " << samples.size() << " profit samples over " << meta_rows.size()
                  << " options\n";
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal exercise boundaries under a pinned-at-the-strike bridge model"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    SolveArgs sa;
    CLI::App* solve = app.add_subcommand("solve", "Solve the stopping boundary");
    solve->add_option("--strike", sa.strike)->required();
    solve->add_option("--horizon", sa.horizon);
    solve->add_option("--sigma", sa.sigma)->required();
    solve->add_option("--lambda", sa.lambda);
    solve->add_option("--nodes", sa.nodes);
    solve->add_option("--delta", sa.delta);
    solve->add_option("--grid", sa.grid)->check(CLI::IsMember({"log", "uniform"}));
    solve->add_option("--side", sa.side)->check(CLI::IsMember({"put", "call"}));
    solve->add_option("--out", sa.out)->required();

    InferArgs ia;
    CLI::App* infer = app.add_subcommand("infer", "Estimate volatility and confidence curves");
    infer->add_option("--path", ia.path)->required()->check(CLI::ExistingFile);
    infer->add_option("--use-fraction", ia.use_fraction);
    infer->add_option("--alpha", ia.alpha);
    infer->add_option("--fd-step", ia.fd_step);
    infer->add_option("--nodes", ia.nodes);
    infer->add_option("--delta", ia.delta);
    infer->add_option("--strike", ia.strike)->required();
    infer->add_option("--horizon", ia.horizon);
    infer->add_option("--lambda", ia.lambda);
    infer->add_option("--out", ia.out)->required();

    StudyArgs ta;
    CLI::App* study = app.add_subcommand("study", "Run a coverage or payoff study");
    study->add_option("--kind", ta.kind)->required()->check(CLI::IsMember({"coverage", "payoff"}));
    study->add_option("--config", ta.config)->required()->check(CLI::ExistingFile);
    study->add_option("--workers", ta.workers);
    study->add_option("--out", ta.out)->required();

    DataArgs da;
    da.rho = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    CLI::App* data = app.add_subcommand("data", "Aggregate strategy profits over a data bundle");
    data->add_option("--bundle", da.bundle)->required()->check(CLI::ExistingDirectory);
    data->add_option("--strategy", da.strategies)->required();
    data->add_option("--side", da.side)->check(CLI::IsMember({"put", "call"}));
    data->add_option("--rho", da.rho);
    data->add_option("--thresholds", da.thresholds)->required();
    data->add_option("--out", da.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (solve->parsed()) return run_solve(sa);
    if (infer->parsed()) return run_infer(ia);
    if (study->parsed()) return run_study(ta);
    if (data->parsed()) return run_data(da);
    return 2;
}
