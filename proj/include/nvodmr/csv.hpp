#pragma once

#include "nvodmr/electrometry.hpp"
#include "nvodmr/spectrum.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nvodmr {

namespace csv_header {
inline constexpr std::string_view kSpectrum = "frequency_mhz,strength";
inline constexpr std::string_view kSweep = "param_value,freq_of_max,ds_max,freq_of_min,ds_min";
inline constexpr std::string_view kSensitivity = "frequency_mhz,delta_s";
inline constexpr std::string_view kScanCurve = "phi_mw_deg,strength";
inline constexpr std::string_view kScanMap = "phi_mw_deg,frequency_mhz,strength";
inline constexpr std::string_view kReport = "quantity,value";
}  // namespace csv_header

// Round-trip decimal form with up to 17 significant digits.
std::string format_number(double v);
// Throws FormatError on anything but a complete decimal number.
double parse_number(std::string_view s);

using CsvRow = std::vector<std::string>;

/// Writes `# ` comment lines, the header and the rows, LF-terminated.
void write_csv(std::ostream& os, const std::vector<std::string>& comments, std::string_view header,
               const std::vector<CsvRow>& rows);
void write_csv(std::ostream& os, const std::vector<std::string>& comments, std::string_view header,
               const std::vector<std::vector<double>>& rows);

struct CsvData {
  std::vector<std::string> comments;
  std::vector<std::vector<double>> rows;
};

/// Numeric CSV with '#' comment lines before the header. Throws
/// FormatError naming `expected_header` when the header differs.
CsvData read_csv(std::istream& is, std::string_view expected_header);

Spectrum spectrum_from_csv(const CsvData& data);
PolarizationCurve scan_curve_from_csv(const CsvData& data, double frequency);
// Rows must be grouped by angle, each group on the same uniform grid.
ScanMap scan_map_from_csv(const CsvData& data);

}  // namespace nvodmr
