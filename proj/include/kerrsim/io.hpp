#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kerrsim/metrology.hpp"

namespace kerrsim {

// Doubles rendered with 17 significant digits so repeated runs diff byte-for-byte.
std::string format_double(double x);

// Writes header + rows; all values full precision.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// Metadata sidecar next to a CSV: "<path>.meta.json".
void write_sidecar(const std::string& csv_path, const nlohmann::json& meta);

void write_qfi_report(const std::string& csv_path, const QfiReport& report,
                      const nlohmann::json& extra_meta = {});

}  // namespace kerrsim
