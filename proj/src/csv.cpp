#include "nvodmr/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace nvodmr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

FrequencyGrid uniform_grid(const std::vector<double>& f) {
  if (f.empty()) throw FormatError("no frequency rows");
  if (f.size() == 1) return FrequencyGrid::single(f[0]);
  const double step = (f.back() - f.front()) / static_cast<double>(f.size() - 1);
  if (!(step > 0.0)) throw FormatError("frequencies must be strictly ascending");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double expect = f.front() + static_cast<double>(i) * step;
    if (std::abs(f[i] - expect) > 1e-6 * step) throw FormatError("frequency grid is not uniform");
  }
  return FrequencyGrid(f.front(), step, f.size());
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError("not a number: '" + std::string(s) + "'");
  return v;
}

void write_csv(std::ostream& os, const std::vector<std::string>& comments, std::string_view header,
               const std::vector<CsvRow>& rows) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<std::string>& comments, std::string_view header,
               const std::vector<std::vector<double>>& rows) {
  std::vector<CsvRow> text;
  text.reserve(rows.size());
  for (const auto& r : rows) {
    CsvRow t;
    for (double v : r) t.push_back(format_number(v));
    text.push_back(std::move(t));
  }
  write_csv(os, comments, header, text);
}

CsvData read_csv(std::istream& is, std::string_view expected_header) {
  CsvData data;
  std::string line;
  bool have_header = false;
  std::size_t columns = 1;
  for (char c : expected_header)
    if (c == ',') ++columns;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (!have_header) {
      if (t.empty()) continue;
      if (t.front() == '#') {
        std::string_view c = t.substr(1);
        if (!c.empty() && c.front() == ' ') c.remove_prefix(1);
        data.comments.emplace_back(c);
        continue;
      }
      if (t != expected_header)
        throw FormatError("unexpected CSV header '" + std::string(t) + "'; expected '" +
                          std::string(expected_header) + "'");
      have_header = true;
      continue;
    }
    if (t.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = t.find(',', start);
      const std::string_view cell = t.substr(start, comma == std::string_view::npos ? t.npos : comma - start);
      try {
        row.push_back(parse_number(cell));
      } catch (const FormatError& e) {
        throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (row.size() != columns)
      throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                        " columns");
    data.rows.push_back(std::move(row));
  }
  if (!have_header)
    throw FormatError("missing CSV header; expected '" + std::string(expected_header) + "'");
  return data;
}

Spectrum spectrum_from_csv(const CsvData& data) {
  std::vector<double> f;
  Spectrum s;
  for (const auto& r : data.rows) {
    f.push_back(r.at(0));
    s.values.push_back(r.at(1));
  }
  s.grid = uniform_grid(f);
  return s;
}

PolarizationCurve scan_curve_from_csv(const CsvData& data, double frequency) {
  PolarizationCurve c;
  c.frequency = frequency;
  for (const auto& r : data.rows) {
    c.phi_mw.push_back(r.at(0) * kPi / 180.0);
    c.strength.push_back(r.at(1));
  }
  return c;
}

ScanMap scan_map_from_csv(const CsvData& data) {
  ScanMap m;
  std::vector<double> freqs;
  std::vector<double> first_freqs;
  std::size_t group = 0;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& r = data.rows[i];
    if (m.phi_mw.empty() || r[0] != data.rows[i - 1][0]) {
      if (!m.phi_mw.empty()) {
        if (group == 0) first_freqs = freqs;
        else if (freqs != first_freqs) throw FormatError("scan map angles use different frequency grids");
        ++group;
        freqs.clear();
      }
      m.phi_mw.push_back(r[0] * kPi / 180.0);
    }
    freqs.push_back(r[1]);
    m.values.push_back(r[2]);
  }
  if (m.phi_mw.empty()) throw FormatError("scan map has no rows");
  if (group > 0 && freqs != first_freqs) throw FormatError("scan map angles use different frequency grids");
  m.grid = uniform_grid(freqs);
  return m;
}

}  // namespace nvodmr
