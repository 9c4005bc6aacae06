#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "capm.hpp"
#include "errors.hpp"
#include "pricing.hpp"
#include "scenario.hpp"

namespace crisk {

namespace detail {

inline std::string location(const std::string& path, std::size_t line, std::size_t col) {
    std::ostringstream os;
    os << path << ":" << line << ":" << col;
    return os.str();
}

inline std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline double parse_number(const std::string& field, const std::string& path, std::size_t line,
                           std::size_t col) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    // tolerate surrounding spaces
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw data_error(location(path, line, col) + ": cannot parse number '" + field + "'");
    if (!std::isfinite(value))
        throw data_error(location(path, line, col) + ": non-finite value '" + field + "'");
    return value;
}

inline bool looks_like_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    // strip a UTF-8 BOM if present
    if (!lines.empty() && lines[0].size() >= 3 && lines[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
        lines[0].erase(0, 3);
    return lines;
}

} // namespace detail

struct CsvOptions {
    std::optional<std::string> index_label;
};

// Return history: header `date,<label1>,...,<labeld>`, then one ISO-8601
// date and d decimal returns per row (0.01 = 1%). Rows are oldest first.
// One uniformly weighted scenario per data row.
inline ScenarioSet load_returns(const std::string& path, const CsvOptions& opts = {}) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw data_error(path + ": empty file");

    const auto header = detail::split_csv_line(lines[0]);
    if (header.size() < 2 || header[0] != "date")
        throw data_error(detail::location(path, 1, 1) +
                         ": header must be 'date,<label1>,...,<labeld>'");
    std::vector<std::string> labels(header.begin() + 1, header.end());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].empty())
            throw data_error(detail::location(path, 1, i + 2) + ": empty asset label");
        for (std::size_t j = 0; j < i; ++j)
            if (labels[j] == labels[i])
                throw data_error(detail::location(path, 1, i + 2) + ": duplicate asset label '" +
                                 labels[i] + "'");
    }
    const std::size_t d = labels.size();

    std::vector<double> values;
    std::size_t rows = 0;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty() || lines[ln] == "\r") continue;
        const auto fields = detail::split_csv_line(lines[ln]);
        if (fields.size() != d + 1)
            throw data_error(detail::location(path, ln + 1, fields.size() + 1) + ": expected " +
                             std::to_string(d + 1) + " fields, got " +
                             std::to_string(fields.size()));
        if (!detail::looks_like_iso_date(fields[0]))
            throw data_error(detail::location(path, ln + 1, 1) + ": expected ISO-8601 date, got '" +
                             fields[0] + "'");
        for (std::size_t i = 0; i < d; ++i)
            values.push_back(detail::parse_number(fields[i + 1], path, ln + 1, i + 2));
        ++rows;
    }
    if (rows == 0) throw data_error(path + ": no data rows after the header");

    ScenarioSet out;
    out.outcomes = Matrix(rows, d);
    out.outcomes.data = std::move(values);
    out.weights.assign(rows, 1.0 / static_cast<double>(rows));
    out.labels = std::move(labels);
    out.units = OutcomeUnits::Returns;
    if (opts.index_label) out.index_col = find_label(out, *opts.index_label);
    validate_scenarios(out);
    return out;
}

// Agent table: header `endowment,aversion`, then one positive pair per row.
inline Economy load_economy(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw data_error(path + ": empty file");
    const auto header = detail::split_csv_line(lines[0]);
    if (header.size() != 2 || header[0] != "endowment" || header[1] != "aversion")
        throw data_error(detail::location(path, 1, 1) + ": header must be 'endowment,aversion'");
    Economy e;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (lines[ln].empty() || lines[ln] == "\r") continue;
        const auto fields = detail::split_csv_line(lines[ln]);
        if (fields.size() != 2)
            throw data_error(detail::location(path, ln + 1, 1) + ": expected 2 fields");
        e.endowments.push_back(detail::parse_number(fields[0], path, ln + 1, 1));
        e.aversions.push_back(detail::parse_number(fields[1], path, ln + 1, 2));
    }
    if (e.endowments.empty()) throw data_error(path + ": no data rows after the header");
    try {
        validate_economy(e);
    } catch (const std::invalid_argument& err) {
        throw data_error(path + ": " + err.what());
    }
    return e;
}

// Tabulated payoff: two numeric columns (S1, F) sorted strictly increasing
// in S1; an optional non-numeric first line is treated as a header.
inline PayoffTable load_payoff_table(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw data_error(path + ": empty file");
    PayoffTable table;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (lines[ln].empty() || lines[ln] == "\r" || lines[ln][0] == '#') continue;
        const auto fields = detail::split_csv_line(lines[ln]);
        if (ln == 0) {
            double probe = 0.0;
            const auto res =
                std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), probe);
            if (res.ec != std::errc{}) continue; // header line
        }
        if (fields.size() != 2)
            throw data_error(detail::location(path, ln + 1, 1) + ": expected 2 fields");
        table.s.push_back(detail::parse_number(fields[0], path, ln + 1, 1));
        table.f.push_back(detail::parse_number(fields[1], path, ln + 1, 2));
    }
    try {
        validate_payoff_table(table);
    } catch (const std::invalid_argument& err) {
        throw data_error(path + ": " + err.what());
    }
    return table;
}

} // namespace crisk
