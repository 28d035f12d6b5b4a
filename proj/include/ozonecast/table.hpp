#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ozonecast/date.hpp"

namespace ozonecast {

/// Gaps are stored as quiet NaN cells.
inline bool is_gap(double v) { return std::isnan(v); }
inline double gap_cell() { return std::nan(""); }

/// Dated table of named numeric columns. Dates are strictly increasing,
/// one row per day is not required but duplicates are rejected.
struct TimeSeriesTable {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;  // cols[j][i], aligned with names

    std::size_t n_rows() const { return dates.size(); }
    std::size_t n_cols() const { return names.size(); }

    /// Index of a column, -1 if absent.
    int col_index(std::string_view name) const;

    /// Column by name; throws SchemaError if absent.
    const std::vector<double>& col(std::string_view name) const;
    std::vector<double>& col(std::string_view name);

    std::size_t gap_count() const;
    bool has_gaps() const { return gap_count() > 0; }
};

/// The twelve monitored variables in file order.
const std::vector<std::string>& default_schema();

/// Name of the target variable.
inline constexpr std::string_view kTargetColumn = "O3";

/// Parses a comma-separated file with a header row and an ISO date first
/// column. Cells that are empty, "NaN" (any case) or the sentinel -99 are
/// recorded as gaps. Rows are sorted by date; columns are returned in
/// schema order, extra file columns are ignored.
TimeSeriesTable parse_csv(const std::filesystem::path& path,
                          const std::vector<std::string>& schema = default_schema());

/// Writes the table in the same format parse_csv reads (gaps as empty
/// cells, values in round-trippable %.17g).
void write_csv(const TimeSeriesTable& table, const std::filesystem::path& path);

/// Replaces interior gap runs of length <= max_run by linear interpolation
/// between the flanking observed values; leading/trailing runs take the
/// nearest observed value. Validation happens before any filling: a run
/// longer than max_run raises GapRunError, a per-column gap fraction above
/// max_fraction raises GapBudgetError. Observed cells are never altered.
TimeSeriesTable fill_gaps(const TimeSeriesTable& table, int max_run = 12,
                          double max_fraction = 0.005);

struct SplitSpec {
    enum class Mode { kChronological, kSeededRandom };
    Mode mode = Mode::kChronological;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;  // random mode only
};

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> test;
};

/// Partition of {0..n-1}. Chronological: first ceil(f*n) rows train.
/// Random: seeded permutation. Both sides must end up with >= 2 rows.
SplitIndices make_split(std::size_t n, const SplitSpec& spec);

/// Table-level wrapper; requires a gap-free table.
SplitIndices split(const TimeSeriesTable& table, const SplitSpec& spec);

}  // namespace ozonecast
