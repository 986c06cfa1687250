// CSV and JSON serialization of the library's data products.
#pragma once

#include <string>
#include <vector>

#include "bbstop/boundary.hpp"
#include "bbstop/inference.hpp"
#include "bbstop/market_data.hpp"
#include "bbstop/simulation.hpp"
#include "bbstop/types.hpp"

namespace bbstop {

// All numeric output is written with 17 significant digits.
std::string format_full(double x);

void write_price_path_csv(const PricePath& path, const std::string& file);
PricePath read_price_path_csv(const std::string& file);

void write_boundary_csv(const Boundary& boundary, const std::string& file);
Boundary read_boundary_csv(const std::string& file, OptionSide side = OptionSide::put);

void write_boundary_json(const Boundary& boundary, const BridgeSpec& spec, double delta,
                         const SolverStats* stats, const std::string& file);

void write_band_csv(const ConfidenceBand& band, const std::string& file);
void write_coverage_csv(const CoverageResult& coverage, const std::string& file);
void write_payoff_csv(const PayoffStudy& study, const std::string& file);

void write_profit_csv(const std::vector<ProfitAggregate>& aggregates, const std::string& file);
void write_relative_profit_csv(const std::vector<ProfitAggregate>& aggregates,
                               const std::string& strategy_a, const std::string& strategy_b,
                               const std::string& file);

}  // namespace bbstop
