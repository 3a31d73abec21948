#include "tabwm/dataset.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tabwm {
namespace {

// Splits one CSV record with RFC-4180 quoting. `line` must already contain
// the full record (embedded newlines inside quotes are handled by the caller).
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

bool parse_finite(const std::string& token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

int count_decimals(const std::string& token) {
    auto dot = token.find('.');
    if (dot == std::string::npos) return 0;
    int n = 0;
    for (std::size_t i = dot + 1; i < token.size(); ++i) {
        char c = token[i];
        if (c < '0' || c > '9') break;
        ++n;
    }
    return n;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> read_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::vector<std::vector<std::string>> records;
    std::string line, record;
    bool in_quotes = false;
    record.clear();
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!record.empty()) record += '\n';
        record += line;
        // A record is complete when quotes are balanced.
        in_quotes = false;
        for (char c : record)
            if (c == '"') in_quotes = !in_quotes;
        if (in_quotes) continue;
        if (!record.empty()) records.push_back(split_record(record));
        record.clear();
    }
    if (!record.empty()) records.push_back(split_record(record));
    return records;
}

}  // namespace

std::size_t TabularDataset::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return i;
    throw IndexError("no such column: " + name);
}

TabularDataset TabularDataset::from_columns(
    std::vector<std::pair<std::string, std::vector<double>>> cols) {
    TabularDataset ds;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        Column c;
        c.name = std::move(cols[i].first);
        c.values = std::move(cols[i].second);
        ds.columns.push_back(std::move(c));
        ds.file_pos.push_back(i);
    }
    for (std::size_t i = 1; i < ds.columns.size(); ++i)
        if (ds.columns[i].values.size() != ds.columns[0].values.size())
            throw ShapeMismatch("columns differ in length");
    return ds;
}

TabularDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    auto records = read_records(path);
    if (records.empty()) throw EmptyDataset("empty file: " + path.string());

    std::vector<std::string> header;
    std::size_t first_data = 0;
    if (options.header) {
        header = records[0];
        first_data = 1;
    } else {
        header.resize(records[0].size());
        for (std::size_t i = 0; i < header.size(); ++i) header[i] = "c" + std::to_string(i + 1);
    }
    const std::size_t ncols = header.size();
    const std::size_t m = records.size() - first_data;
    if (m == 0) throw EmptyDataset("no data rows in " + path.string());

    std::vector<bool> selected(ncols, options.select.empty());
    for (const auto& name : options.select) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw IndexError("no such column: " + name);
        selected[static_cast<std::size_t>(it - header.begin())] = true;
    }

    for (std::size_t r = first_data; r < records.size(); ++r)
        if (records[r].size() != ncols)
            throw ParseError("row has " + std::to_string(records[r].size()) + " fields, expected " +
                                 std::to_string(ncols),
                             r - first_data + 1, "");

    // In auto mode, demote selected columns that do not fully parse.
    if (options.auto_numeric) {
        for (std::size_t c = 0; c < ncols; ++c) {
            if (!selected[c]) continue;
            double v;
            for (std::size_t r = first_data; r < records.size(); ++r) {
                if (!parse_finite(records[r][c], v)) {
                    selected[c] = false;
                    break;
                }
            }
        }
    }

    TabularDataset ds;
    for (std::size_t c = 0; c < ncols; ++c) {
        if (selected[c]) {
            Column col;
            col.name = header[c];
            col.values.reserve(m);
            col.text.reserve(m);
            for (std::size_t r = first_data; r < records.size(); ++r) {
                double v;
                if (!parse_finite(records[r][c], v))
                    throw ParseError("cell \"" + records[r][c] + "\" is not a finite number",
                                     r - first_data + 1, header[c]);
                col.values.push_back(v);
                col.max_decimals = std::max(col.max_decimals, count_decimals(records[r][c]));
                col.text.push_back(records[r][c]);
            }
            ds.columns.push_back(std::move(col));
            ds.file_pos.push_back(c);
        } else {
            PassthroughColumn col;
            col.name = header[c];
            col.file_pos = c;
            col.cells.reserve(m);
            for (std::size_t r = first_data; r < records.size(); ++r) col.cells.push_back(records[r][c]);
            ds.passthrough.push_back(std::move(col));
        }
    }
    if (ds.columns.empty() && ds.passthrough.empty()) throw EmptyDataset("no columns selected");
    return ds;
}

std::string format_cell(double v, int decimals) {
    char buf[64];
    if (decimals >= 0)
        std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    else
        std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string to_csv_string(const TabularDataset& ds, const CsvWriteOptions& options) {
    const std::size_t m = ds.rows();
    // Reassemble in original file order.
    std::size_t total = ds.columns.size() + ds.passthrough.size();
    std::vector<const Column*> num_at(total, nullptr);
    std::vector<const PassthroughColumn*> pass_at(total, nullptr);
    for (std::size_t i = 0; i < ds.columns.size(); ++i) {
        std::size_t pos = i < ds.file_pos.size() ? ds.file_pos[i] : i;
        num_at[std::min(pos, total - 1)] = &ds.columns[i];
    }
    for (const auto& p : ds.passthrough) pass_at[std::min(p.file_pos, total - 1)] = &p;

    std::string out;
    bool first = true;
    for (std::size_t pos = 0; pos < total; ++pos) {
        const std::string* name = nullptr;
        if (num_at[pos]) name = &num_at[pos]->name;
        if (pass_at[pos]) name = &pass_at[pos]->name;
        if (!name) continue;
        if (!first) out += ',';
        out += quote_if_needed(*name);
        first = false;
    }
    out += '\n';
    for (std::size_t r = 0; r < m; ++r) {
        first = true;
        for (std::size_t pos = 0; pos < total; ++pos) {
            const Column* nc = num_at[pos];
            const PassthroughColumn* pc = pass_at[pos];
            if (!nc && !pc) continue;
            if (!first) out += ',';
            first = false;
            if (nc) {
                if (!nc->text.empty())
                    out += nc->text[r];
                else
                    out += format_cell(nc->values[r], options.decimals);
            } else {
                out += quote_if_needed(pc->cells[r]);
            }
        }
        out += '\n';
    }
    return out;
}

void write_csv(const TabularDataset& ds, const std::filesystem::path& path,
               const CsvWriteOptions& options) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << to_csv_string(ds, options);
}

std::pair<TabularDataset, AffineMap> normalize_unit(const TabularDataset& ds, std::size_t col) {
    if (col >= ds.cols()) throw IndexError("column index out of range");
    TabularDataset out = ds;
    Column& c = out.columns[col];
    auto [lo_it, hi_it] = std::minmax_element(c.values.begin(), c.values.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) throw ConstantColumn("cannot normalize constant column \"" + c.name + "\"");
    AffineMap map{lo, hi};
    for (double& v : c.values) v = map.to_unit(v);
    c.map = map;
    c.text.clear();
    return {std::move(out), map};
}

SplitReal split_fractional(double x) {
    assert(std::isfinite(x));
    double ip = std::floor(x);
    double frac = x - ip;
    // Guard the tiny-negative case where x - floor(x) rounds up to 1.0.
    if (frac >= 1.0) {
        ip += 1.0;
        frac = 0.0;
    }
    return {ip, frac};
}

}  // namespace tabwm
