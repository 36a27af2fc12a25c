#include "ozlasso/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "ozlasso/error.hpp"
#include "ozlasso/textio.hpp"

namespace ozlasso {

namespace {

constexpr std::array<std::string_view, kNumVariables> kVariableNames = {
    "o3",          "so2",       "no",           "no2",            "nox",
    "co",          "pm25",      "temperature",  "dew_point",      "rel_humidity",
    "wind_direction", "wind_speed", "visibility", "pressure"};

std::optional<int> parse_hour(std::string_view s) {
    s = trim(s);
    // Accept "14", "14:00", "14:00:00".
    if (const auto colon = s.find(':'); colon != std::string_view::npos) {
        const auto rest = s.substr(colon + 1);
        if (rest.find_first_not_of("0:") != std::string_view::npos) return std::nullopt;
        s = s.substr(0, colon);
    }
    int h = -1;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), h);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    if (h < 0 || h >= kHoursPerDay) return std::nullopt;
    return h;
}

struct Timestamp {
    Date date;
    int hour;
};

std::optional<Timestamp> parse_timestamp(std::string_view date_cell, std::optional<std::string_view> hour_cell) {
    date_cell = trim(date_cell);
    if (hour_cell) {
        auto d = Date::parse(date_cell);
        auto h = parse_hour(*hour_cell);
        if (!d || !h) return std::nullopt;
        return Timestamp{*d, *h};
    }
    if (date_cell.size() < 13 || (date_cell[10] != ' ' && date_cell[10] != 'T')) return std::nullopt;
    auto d = Date::parse(date_cell.substr(0, 10));
    auto h = parse_hour(date_cell.substr(11));
    if (!d || !h) return std::nullopt;
    return Timestamp{*d, *h};
}

long slot_key(const Date& d, int hour) { return d.serial() * kHoursPerDay + hour; }

std::string timestamp_text(const Date& d, int hour) {
    std::string s = d.iso() + " ";
    if (hour < 10) s += '0';
    s += std::to_string(hour) + ":00";
    return s;
}

bool record_less(const HourlyRecord& a, const HourlyRecord& b) {
    return slot_key(a.date, a.hour) < slot_key(b.date, b.hour);
}

}  // namespace

std::string_view variable_name(Variable v) { return kVariableNames[index_of(v)]; }

std::optional<Variable> variable_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNumVariables; ++i)
        if (kVariableNames[i] == name) return variable_at(i);
    return std::nullopt;
}

double normalize_degrees(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r >= 360.0) r = 0.0;
    return r;
}

IngestSchema IngestSchema::canonical() {
    IngestSchema s;
    for (std::size_t i = 0; i < kNumVariables; ++i)
        s.columns[variable_at(i)] = std::string(kVariableNames[i]);
    return s;
}

IngestSchema IngestSchema::pollutants_only() {
    IngestSchema s;
    for (auto v : kPollutants) s.columns[v] = std::string(variable_name(v));
    return s;
}

IngestSchema IngestSchema::meteorology_only() {
    IngestSchema s;
    for (auto v : kMeteo) s.columns[v] = std::string(variable_name(v));
    return s;
}

ParseResult parse_hourly_file(const std::filesystem::path& path, const IngestSchema& schema) {
    if (!std::filesystem::exists(path)) throw IoError("file not found: " + path.string());
    return parse_hourly_text(read_file(path), schema, path.string());
}

ParseResult parse_hourly_text(std::string_view text, const IngestSchema& schema, std::string_view source) {
    const std::string src(source);
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start < text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            lines.push_back(text.substr(start, end - start));
            start = end + 1;
        }
    }
    // Skip leading blank lines to find the header.
    std::size_t header_idx = 0;
    while (header_idx < lines.size() && trim(lines[header_idx]).empty()) ++header_idx;
    if (header_idx == lines.size()) throw ParseError(src + ": empty input (no header row)");

    const auto header = split_fields(lines[header_idx], schema.delimiter);
    auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        return std::nullopt;
    };

    const auto date_col = find_col(schema.date_column);
    if (!date_col) throw ParseError(src + ": malformed header: missing column '" + schema.date_column + "'");
    std::optional<std::size_t> hour_col;
    if (!schema.hour_column.empty()) {
        hour_col = find_col(schema.hour_column);
        if (!hour_col)
            throw ParseError(src + ": malformed header: missing column '" + schema.hour_column + "'");
    }
    std::vector<std::pair<Variable, std::size_t>> mapped;
    for (const auto& [var, name] : schema.columns) {
        const auto c = find_col(name);
        if (!c) throw ParseError(src + ": malformed header: missing column '" + name + "'");
        mapped.emplace_back(var, *c);
    }
    std::size_t needed = *date_col;
    if (hour_col) needed = std::max(needed, *hour_col);
    for (const auto& [v, c] : mapped) needed = std::max(needed, c);

    const std::unordered_set<std::string> sentinels(schema.missing_tokens.begin(),
                                                    schema.missing_tokens.end());
    ParseResult out;
    std::unordered_set<long> seen;
    for (std::size_t li = header_idx + 1; li < lines.size(); ++li) {
        const auto line = lines[li];
        if (trim(line).empty()) continue;
        const std::size_t line_no = li + 1;
        ++out.rows_read;
        const auto fields = split_fields(line, schema.delimiter);
        if (fields.size() <= needed) {
            out.rejected.push_back({line_no, "expected at least " + std::to_string(needed + 1) +
                                                 " fields, found " + std::to_string(fields.size())});
            continue;
        }
        const auto ts = parse_timestamp(fields[*date_col],
                                        hour_col ? std::optional<std::string_view>(fields[*hour_col])
                                                 : std::nullopt);
        if (!ts) {
            out.rejected.push_back({line_no, "unparseable timestamp"});
            continue;
        }
        if (!seen.insert(slot_key(ts->date, ts->hour)).second)
            throw ParseError(src + ": duplicate timestamp " + timestamp_text(ts->date, ts->hour) +
                             " at line " + std::to_string(line_no));

        HourlyRecord rec;
        rec.date = ts->date;
        rec.hour = ts->hour;
        for (const auto& [var, col] : mapped) {
            const std::string cell(trim(fields[col]));
            std::optional<double> v;
            if (!sentinels.count(cell)) v = parse_double(cell);
            if (v && var == Variable::WindDirection) v = normalize_degrees(*v);
            if (v && var == Variable::RelHumidity && (*v < 0.0 || *v > 100.0)) v.reset();
            if (!v) ++out.cells_missing;
            rec[var] = v;
        }
        out.records.push_back(rec);
    }
    std::sort(out.records.begin(), out.records.end(), record_less);
    return out;
}

std::vector<HourlyRecord> merge_records(std::span<const HourlyRecord> primary,
                                        std::span<const HourlyRecord> secondary) {
    std::map<long, HourlyRecord> slots;
    for (const auto& r : primary) slots.emplace(slot_key(r.date, r.hour), r);
    for (const auto& r : secondary) {
        auto [it, inserted] = slots.emplace(slot_key(r.date, r.hour), r);
        if (inserted) continue;
        for (std::size_t i = 0; i < kNumVariables; ++i)
            if (!it->second.values[i] && r.values[i]) it->second.values[i] = r.values[i];
    }
    std::vector<HourlyRecord> out;
    out.reserve(slots.size());
    for (auto& [k, r] : slots) out.push_back(std::move(r));
    return out;
}

namespace {

void fill_channel(DayBlock& day, Variable var, int max_gap) {
    const auto vi = index_of(var);
    auto at = [&](int h) -> std::optional<double>& { return day.hours[static_cast<std::size_t>(h)].values[vi]; };
    bool complete = true;
    int filled = 0;
    int h = 0;
    while (h < kHoursPerDay) {
        if (at(h)) {
            ++h;
            continue;
        }
        int end = h;
        while (end < kHoursPerDay && !at(end)) ++end;
        const int len = end - h;
        const bool interior = h > 0 && end < kHoursPerDay;
        if (!interior || len > max_gap) {
            complete = false;
        } else {
            const double a = *at(h - 1);
            const double b = *at(end);
            for (int k = 1; k <= len; ++k) {
                const double t = static_cast<double>(k) / (len + 1);
                double v;
                if (var == Variable::WindDirection) {
                    const double delta = std::fmod(b - a + 540.0, 360.0) - 180.0;
                    v = normalize_degrees(a + delta * t);
                } else {
                    v = a + (b - a) * t;
                }
                at(h + k - 1) = v;
            }
            filled += len;
        }
        h = end;
    }
    day.complete[vi] = complete;
    day.filled[vi] = filled;
}

}  // namespace

std::vector<DayBlock> assemble_days(std::span<const HourlyRecord> records, int max_gap_hours) {
    std::vector<HourlyRecord> sorted(records.begin(), records.end());
    std::stable_sort(sorted.begin(), sorted.end(), record_less);

    std::vector<DayBlock> days;
    for (const auto& r : sorted) {
        if (days.empty() || !(days.back().date == r.date)) {
            DayBlock blk;
            blk.date = r.date;
            for (int h = 0; h < kHoursPerDay; ++h) {
                blk.hours[static_cast<std::size_t>(h)].date = r.date;
                blk.hours[static_cast<std::size_t>(h)].hour = h;
            }
            days.push_back(blk);
        }
        days.back().hours[static_cast<std::size_t>(r.hour)].values = r.values;
    }
    for (auto& day : days)
        for (std::size_t i = 0; i < kNumVariables; ++i) fill_channel(day, variable_at(i), max_gap_hours);
    return days;
}

namespace {

std::string header_line(std::span<const Variable> vars, char delim) {
    std::string s = "date";
    s += delim;
    s += "hour";
    for (auto v : vars) {
        s += delim;
        s += variable_name(v);
    }
    s += '\n';
    return s;
}

void append_record(std::string& out, const HourlyRecord& r, std::span<const Variable> vars, char delim) {
    out += r.date.iso();
    out += delim;
    out += std::to_string(r.hour);
    for (auto v : vars) {
        out += delim;
        if (r[v]) out += format_double(*r[v]);
    }
    out += '\n';
}

}  // namespace

std::string canonical_hourly_text(std::span<const DayBlock> days, char delimiter) {
    std::array<Variable, kNumVariables> all{};
    for (std::size_t i = 0; i < kNumVariables; ++i) all[i] = variable_at(i);
    std::string out = header_line(all, delimiter);
    for (const auto& d : days)
        for (const auto& r : d.hours) append_record(out, r, all, delimiter);
    return out;
}

std::string hourly_records_text(std::span<const HourlyRecord> records, std::span<const Variable> variables,
                                char delimiter) {
    std::string out = header_line(variables, delimiter);
    for (const auto& r : records) append_record(out, r, variables, delimiter);
    return out;
}

}  // namespace ozlasso
