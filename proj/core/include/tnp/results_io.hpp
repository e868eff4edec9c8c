#pragma once

#include "tnp/experiments.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tnp::io {

/// Renders a real with 6 significant digits ("%.6g").
std::string format_real(double v);

struct DetailRow {
    std::string config_id;
    std::string method;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    double type1 = 0.0;
    double type2 = 0.0;
    double accuracy = 0.0;
};

/// Flattens experiment results into detail rows. Metric values are passed
/// through their 6-significant-digit text form so the aggregate file is
/// recomputable byte-for-byte from the detail file.
std::vector<DetailRow> detail_rows(const std::vector<ExperimentResult>& results);

std::string detail_csv(const std::vector<DetailRow>& rows);
std::vector<DetailRow> parse_detail_csv(const std::string& text);

/// Aggregate CSV with one row per (config, method), grouped in order of
/// first appearance in the detail rows.
std::string aggregate_csv(const std::vector<DetailRow>& rows, double alpha);

}  // namespace tnp::io
