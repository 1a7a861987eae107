#ifndef SELFPUMP_CSV_HPP
#define SELFPUMP_CSV_HPP

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selfpump
{
// Shortest round-trip decimal representation, independent of locale.
std::string format_number(double value);

// Comma-separated line terminated by '\n'.
std::string csv_line(std::span<const double> values);
std::string csv_line(std::span<const std::string> fields);

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // Throws InvalidArgument if the column is absent.
    std::size_t column(std::string_view name) const;
    std::vector<double> values(std::string_view name) const;
};

// Numeric CSV with one header row. Lines starting with '#' and blank lines
// are skipped. Missing files raise IoError; malformed rows raise ParseError
// naming the 1-based line.
CsvTable read_csv(const std::filesystem::path &path);
CsvTable parse_csv(std::string_view text);

// Writes bytes verbatim (no newline translation). Creates parent directories.
void write_text_file(const std::filesystem::path &path, std::string_view content);
std::string read_text_file(const std::filesystem::path &path);

} // namespace selfpump

#endif // SELFPUMP_CSV_HPP
