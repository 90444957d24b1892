#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ecb {

/// Value formatting shared by every CSV the tools emit: 17 significant
/// digits, '.' decimal separator, independent of the global locale.
std::string format_value(double value);

/// Writer for the long-format `t,series,value` schema. Lines end in LF.
class SeriesCsvWriter {
public:
    explicit SeriesCsvWriter(std::ostream& out);

    void row(long long t, const std::string& series, double value);

private:
    std::ostream& out_;
};

struct NamedSeries {
    std::string label;
    std::span<const double> values;  // index k holds t = k + 1
};

/// Writes header plus one row per (t, series), t outermost, series in the
/// given order. All series must have equal length.
void write_series_csv(std::ostream& out, std::span<const NamedSeries> series);

/// Parses a `t,series,value` file back into label -> values (ordered by t).
/// Throws IoError naming the offending line on malformed input.
std::map<std::string, std::vector<double>> read_series_csv(std::istream& in);

}  // namespace ecb
