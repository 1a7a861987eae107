#include "selfpump/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "selfpump/error.hpp"

namespace selfpump
{
namespace
{
std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}
} // namespace

std::string format_number(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string csv_line(std::span<const double> values)
{
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            line += ',';
        line += format_number(values[i]);
    }
    line += '\n';
    return line;
}

std::string csv_line(std::span<const std::string> fields)
{
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            line += ',';
        line += fields[i];
    }
    line += '\n';
    return line;
}

std::size_t CsvTable::column(std::string_view name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw InvalidArgument("CSV has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::values(std::string_view name) const
{
    const auto c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto &row : rows)
        out.push_back(row[c]);
    return out;
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto fields = split(line);
        if (table.header.empty()) {
            for (auto f : fields) {
                if (f.empty())
                    throw ParseError(line_no, "empty column name in header");
                table.header.emplace_back(f);
            }
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError(line_no, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                          std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) {
            double v = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size())
                throw ParseError(line_no, "field '" + std::string(f) + "' is not a number");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty())
        throw ParseError(line_no, "missing header row");
    return table;
}

CsvTable read_csv(const std::filesystem::path &path) { return parse_csv(read_text_file(path)); }

void write_text_file(const std::filesystem::path &path, std::string_view content)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace selfpump
