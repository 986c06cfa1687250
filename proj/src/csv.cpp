#include "bbstop/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bbstop {

namespace {

std::ofstream open_out(const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file);
    return out;
}

std::ifstream open_in(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open for reading: " + file);
    return in;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const std::string& file) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(file + ": malformed numeric field '" + s + "'");
    }
}

// Reads a two-numeric-column CSV, checking the expected header.
std::pair<std::vector<double>, std::vector<double>> read_two_columns(
    const std::string& file, const std::string& header) {
    std::ifstream in = open_in(file);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(file + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw std::runtime_error(file + ": expected header '" + header + "', got '" + line + "'");
    std::vector<double> a, b;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != 2) throw std::runtime_error(file + ": expected two columns");
        a.push_back(parse_double(fields[0], file));
        b.push_back(parse_double(fields[1], file));
    }
    return {std::move(a), std::move(b)};
}

}  // namespace

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_price_path_csv(const PricePath& path, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "t,x\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        out << format_full(path.times[i]) << ',' << format_full(path.values[i]) << '\n';
    }
}

PricePath read_price_path_csv(const std::string& file) {
    auto [times, values] = read_two_columns(file, "t,x");
    PricePath path{std::move(times), std::move(values)};
    path.validate();
    return path;
}

void write_boundary_csv(const Boundary& boundary, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "t,b\n";
    for (std::size_t i = 0; i < boundary.grid.size(); ++i) {
        out << format_full(boundary.grid[i]) << ',' << format_full(boundary.values[i]) << '\n';
    }
}

Boundary read_boundary_csv(const std::string& file, OptionSide side) {
    auto [times, values] = read_two_columns(file, "t,b");
    return Boundary(TimeGrid(std::move(times)), std::move(values), side);
}

void write_boundary_json(const Boundary& boundary, const BridgeSpec& spec, double delta,
                         const SolverStats* stats, const std::string& file) {
    nlohmann::json j;
    j["spec"] = {{"S", spec.strike},
                 {"T", spec.horizon},
                 {"sigma", spec.sigma},
                 {"lambda", spec.lambda}};
    j["side"] = to_string(boundary.side);
    j["grid"] = boundary.grid.nodes;
    j["values"] = boundary.values;
    j["solver"] = {{"delta", delta}, {"N", boundary.grid.size() - 1}};
    if (stats) j["solver"]["iterations-per-node"] = stats->iterations;
    std::ofstream out = open_out(file);
    out << j.dump(2) << '\n';
}

void write_band_csv(const ConfidenceBand& band, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "t,lower,center,upper\n";
    for (std::size_t i = 0; i < band.grid.size(); ++i) {
        out << format_full(band.grid[i]) << ',' << format_full(band.lower[i]) << ','
            << format_full(band.center[i]) << ',' << format_full(band.upper[i]) << '\n';
    }
}

void write_coverage_csv(const CoverageResult& coverage, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "t,proportion,failures\n";
    for (std::size_t i = 0; i < coverage.grid.size(); ++i) {
        out << format_full(coverage.grid[i]) << ',' << format_full(coverage.proportion[i]) << ','
            << coverage.failures << '\n';
    }
}

void write_payoff_csv(const PayoffStudy& study, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "t,q,rule,mean,variance,se,count,failures\n";
    for (const PayoffCell& c : study.cells) {
        out << format_full(c.t) << ',' << format_full(c.q) << ',' << c.rule << ','
            << format_full(c.mean) << ',' << format_full(c.variance) << ',' << format_full(c.se)
            << ',' << c.count << ',' << c.failures << '\n';
    }
}

void write_profit_csv(const std::vector<ProfitAggregate>& aggregates, const std::string& file) {
    std::ofstream out = open_out(file);
    out << "p,strategy,mean_profit\n";
    for (const ProfitAggregate& agg : aggregates) {
        if (agg.empty_cohort) {
            out << format_full(agg.threshold) << ",none,nan\n";
            continue;
        }
        for (const auto& [strategy, profit] : agg.mean_profit) {
            out << format_full(agg.threshold) << ',' << strategy << ',' << format_full(profit)
                << '\n';
        }
    }
}

void write_relative_profit_csv(const std::vector<ProfitAggregate>& aggregates,
                               const std::string& strategy_a, const std::string& strategy_b,
                               const std::string& file) {
    std::ofstream out = open_out(file);
    out << "p,relative_profit\n";
    for (const ProfitAggregate& agg : aggregates) {
        if (agg.empty_cohort) {
            out << format_full(agg.threshold) << ",nan\n";
            continue;
        }
        out << format_full(agg.threshold) << ','
            << format_full(relative_profit(agg, strategy_a, strategy_b)) << '\n';
    }
}

}  // namespace bbstop
