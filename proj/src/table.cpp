#include "ozonecast/table.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ozonecast/errors.hpp"
#include "ozonecast/rng.hpp"

namespace ozonecast {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(std::string_view(line).substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

bool is_nan_token(const std::string& cell) {
    if (cell.size() != 3) return false;
    auto lc = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
    return lc(cell[0]) == 'n' && lc(cell[1]) == 'a' && lc(cell[2]) == 'n';
}

// Returns a gap for the recognized sentinels, throws ParseError otherwise.
double parse_cell(const std::string& cell, std::size_t line_no, const std::string& column) {
    if (cell.empty() || is_nan_token(cell)) return gap_cell();
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size()) {
        throw ParseError(line_no, "bad numeric value '" + cell + "' in column " + column);
    }
    if (v == -99.0) return gap_cell();  // RAMA export sentinel
    return v;
}

}  // namespace

int TimeSeriesTable::col_index(std::string_view name) const {
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == name) return static_cast<int>(j);
    }
    return -1;
}

const std::vector<double>& TimeSeriesTable::col(std::string_view name) const {
    const int j = col_index(name);
    if (j < 0) throw SchemaError("unknown column " + std::string(name));
    return cols[static_cast<std::size_t>(j)];
}

std::vector<double>& TimeSeriesTable::col(std::string_view name) {
    const int j = col_index(name);
    if (j < 0) throw SchemaError("unknown column " + std::string(name));
    return cols[static_cast<std::size_t>(j)];
}

std::size_t TimeSeriesTable::gap_count() const {
    std::size_t n = 0;
    for (const auto& c : cols) {
        for (double v : c) n += is_gap(v) ? 1 : 0;
    }
    return n;
}

const std::vector<std::string>& default_schema() {
    static const std::vector<std::string> schema = {"CO",    "NO",  "NO2", "NOX",
                                                    "O3",    "PM10", "PM2.5", "SO2",
                                                    "RH",    "TMP", "WDR", "WSP"};
    return schema;
}

TimeSeriesTable parse_csv(const std::filesystem::path& path,
                          const std::vector<std::string>& schema) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_line(line);
    if (header.size() < 2) throw ParseError(1, "header must contain a date column and data columns");

    // Map each schema column to its position in the file.
    std::vector<std::size_t> file_pos;
    file_pos.reserve(schema.size());
    for (const auto& name : schema) {
        auto it = std::find(header.begin() + 1, header.end(), name);
        if (it == header.end()) throw SchemaError("missing column " + name + " in " + path.string());
        file_pos.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    struct Row {
        Date date;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, got " +
                                          std::to_string(cells.size()));
        }
        const auto date = Date::parse(cells[0]);
        if (!date) throw ParseError(line_no, "bad date '" + cells[0] + "'");
        Row row;
        row.date = *date;
        row.values.reserve(schema.size());
        for (std::size_t j = 0; j < schema.size(); ++j) {
            row.values.push_back(parse_cell(cells[file_pos[j]], line_no, schema[j]));
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw DuplicateDateError("duplicate date " + rows[i].date.to_string());
        }
    }

    TimeSeriesTable table;
    table.names = schema;
    table.dates.reserve(rows.size());
    table.cols.assign(schema.size(), {});
    for (auto& c : table.cols) c.reserve(rows.size());
    for (const auto& row : rows) {
        table.dates.push_back(row.date);
        for (std::size_t j = 0; j < schema.size(); ++j) table.cols[j].push_back(row.values[j]);
    }
    return table;
}

void write_csv(const TimeSeriesTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "date";
    for (const auto& name : table.names) out << ',' << name;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        out << table.dates[i].to_string();
        for (std::size_t j = 0; j < table.n_cols(); ++j) {
            const double v = table.cols[j][i];
            out << ',';
            if (!is_gap(v)) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out << buf;
            }
        }
        out << '\n';
    }
}

TimeSeriesTable fill_gaps(const TimeSeriesTable& table, int max_run, double max_fraction) {
    if (max_run < 1) throw Error("max_run must be >= 1");
    if (!(max_fraction > 0.0 && max_fraction <= 1.0)) throw Error("max_fraction must be in (0,1]");

    TimeSeriesTable out = table;
    const std::size_t n = table.n_rows();
    for (std::size_t j = 0; j < out.n_cols(); ++j) {
        auto& col = out.cols[j];
        const std::string& name = out.names[j];

        // Validate runs and budget before touching any cell.
        std::size_t gaps = 0;
        for (std::size_t i = 0; i < n;) {
            if (!is_gap(col[i])) {
                ++i;
                continue;
            }
            std::size_t run = 0;
            const std::size_t start = i;
            while (i < n && is_gap(col[i])) {
                ++run;
                ++i;
            }
            if (run > static_cast<std::size_t>(max_run)) throw GapRunError(name, start, run);
            gaps += run;
        }
        if (gaps == 0) continue;
        const double fraction = static_cast<double>(gaps) / static_cast<double>(n);
        if (fraction > max_fraction) throw GapBudgetError(name, fraction);
        if (gaps == n) throw GapRunError(name, 0, n);

        for (std::size_t i = 0; i < n;) {
            if (!is_gap(col[i])) {
                ++i;
                continue;
            }
            const std::size_t start = i;
            while (i < n && is_gap(col[i])) ++i;
            const std::size_t end = i;  // one past the run
            const bool has_left = start > 0;
            const bool has_right = end < n;
            if (has_left && has_right) {
                const double left = col[start - 1];
                const double right = col[end];
                const double run_len = static_cast<double>(end - start + 1);
                for (std::size_t k = start; k < end; ++k) {
                    const double frac = static_cast<double>(k - start + 1) / run_len;
                    col[k] = left + (right - left) * frac;
                }
            } else if (has_right) {
                for (std::size_t k = start; k < end; ++k) col[k] = col[end];
            } else {
                for (std::size_t k = start; k < end; ++k) col[k] = col[start - 1];
            }
        }
    }
    return out;
}

SplitIndices make_split(std::size_t n, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw SplitError("train_fraction must be in (0,1)");
    }
    const auto n_train =
        static_cast<std::size_t>(std::ceil(spec.train_fraction * static_cast<double>(n)));
    if (n_train < 2 || n - n_train < 2) {
        throw SplitError("split leaves fewer than 2 rows on one side (n=" + std::to_string(n) +
                         ", train=" + std::to_string(n_train) + ")");
    }

    SplitIndices out;
    if (spec.mode == SplitSpec::Mode::kChronological) {
        for (std::size_t i = 0; i < n; ++i) {
            (i < n_train ? out.train : out.test).push_back(static_cast<int>(i));
        }
    } else {
        Rng rng(spec.seed);
        std::vector<int> perm = rng.permutation(n);
        out.train.assign(perm.begin(), perm.begin() + static_cast<long>(n_train));
        out.test.assign(perm.begin() + static_cast<long>(n_train), perm.end());
        std::sort(out.train.begin(), out.train.end());
        std::sort(out.test.begin(), out.test.end());
    }
    return out;
}

SplitIndices split(const TimeSeriesTable& table, const SplitSpec& spec) {
    if (table.has_gaps()) throw SplitError("table contains gaps; fill them first");
    return make_split(table.n_rows(), spec);
}

}  // namespace ozonecast
