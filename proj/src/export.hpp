#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "chain.hpp"
#include "matrix.hpp"
#include "oracle.hpp"

// CSV and JSON renderings. Numbers use the shortest text that reads back to
// the same double, so repeated runs give byte-identical files.
namespace bds::io {

std::string format_number(double v);

// Columns of equal length under a header; the first column is the row index
// when `index_name` is non-empty.
std::string columns_csv(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns,
                        const std::string& index_name = "x");
std::string distribution_csv(const chain::Distribution& dist);
// Header "x,0,1,...", one row per x.
std::string matrix_csv(const Matrix& m);

nlohmann::json to_json(const oracle::ChiSquare& chi);
nlohmann::json to_json(const oracle::OracleReport& report);
nlohmann::json to_json(const chain::Distribution& dist);

// JSON numbers that may be infinite or NaN are written as strings.
nlohmann::json number_json(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Reads a two-column "x,value" CSV (header optional) into a distribution.
chain::Distribution read_distribution_csv(const std::string& path, std::size_t points);

}  // namespace bds::io
