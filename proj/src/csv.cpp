#include "ecb/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "ecb/error.hpp"

namespace ecb {

std::string format_value(double value)
{
    char buf[64];
    // to_chars ignores the C locale, so the separator is always '.'.
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    if (ec != std::errc{}) {
        throw Error(ErrorCode::IoError, "failed to format value");
    }
    return std::string(buf, end);
}

SeriesCsvWriter::SeriesCsvWriter(std::ostream& out) : out_(out)
{
    out_ << "t,series,value\n";
}

void SeriesCsvWriter::row(long long t, const std::string& series, double value)
{
    out_ << t << ',' << series << ',' << format_value(value) << '\n';
}

void write_series_csv(std::ostream& out, std::span<const NamedSeries> series)
{
    const std::size_t length = series.empty() ? 0 : series.front().values.size();
    for (const auto& s : series) {
        if (s.values.size() != length) {
            throw Error(ErrorCode::HorizonMismatch, "series '" + s.label + "' has a different length");
        }
    }
    SeriesCsvWriter writer(out);
    for (std::size_t k = 0; k < length; ++k) {
        for (const auto& s : series) {
            writer.row(static_cast<long long>(k + 1), s.label, s.values[k]);
        }
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed");
    }
}

std::map<std::string, std::vector<double>> read_series_csv(std::istream& in)
{
    std::map<std::string, std::vector<double>> out;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || line != "t,series,value") {
        throw Error(ErrorCode::IoError, "line 1: expected header 't,series,value'");
    }
    ++line_no;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto first = line.find(',');
        const auto last = line.rfind(',');
        if (first == std::string::npos || first == last) {
            throw Error(ErrorCode::IoError, "line " + std::to_string(line_no) + ": expected three fields");
        }
        const std::string label = line.substr(first + 1, last - first - 1);
        double value = 0.0;
        const char* begin = line.data() + last + 1;
        const char* end = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end) {
            throw Error(ErrorCode::IoError, "line " + std::to_string(line_no) + ": bad value");
        }
        out[label].push_back(value);
    }
    return out;
}

}  // namespace ecb
