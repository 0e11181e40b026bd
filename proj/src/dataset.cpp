#include "raf/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "raf/error.hpp"

namespace raf {

using json = nlohmann::json;

std::vector<TimeSeries> read_dataset(std::istream& in, const std::string& source)
{
    std::vector<TimeSeries> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(line_no);
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, where + ": " + e.what());
        }
        if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() || !rec.contains("values") ||
            !rec["values"].is_array()) {
            throw Error(ErrorCode::ParseError, where + ": record needs a string 'id' and a 'values' array");
        }
        TimeSeries ts;
        ts.id = rec["id"].get<std::string>();
        if (ts.id.empty()) {
            throw Error(ErrorCode::ParseError, where + ": empty series id");
        }
        if (rec.contains("freq")) {
            if (!rec["freq"].is_string()) {
                throw Error(ErrorCode::ParseError, where + ": 'freq' must be a string");
            }
            ts.freq = rec["freq"].get<std::string>();
        }
        for (const auto& v : rec["values"]) {
            if (v.is_null()) {
                ts.values.push_back(std::numeric_limits<double>::quiet_NaN());
            } else if (v.is_number()) {
                ts.values.push_back(v.get<double>());
            } else {
                throw Error(ErrorCode::ParseError, where + ": values must be numbers or null");
            }
        }
        if (ts.values.empty()) {
            throw Error(ErrorCode::EmptySeries, where + ": series '" + ts.id + "' has no values");
        }
        if (!seen.insert(ts.id).second) {
            throw Error(ErrorCode::DuplicateId, where + ": series id '" + ts.id + "' appears twice");
        }
        out.push_back(std::move(ts));
    }
    return out;
}

std::vector<TimeSeries> load_dataset(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open dataset " + path.string());
    }
    return read_dataset(in, path.string());
}

void write_dataset(std::ostream& out, std::span<const TimeSeries> series)
{
    for (const auto& ts : series) {
        json values = json::array();
        for (double v : ts.values) {
            values.push_back(std::isnan(v) ? json(nullptr) : json(v));
        }
        out << json{{"id", ts.id}, {"freq", ts.freq}, {"values", std::move(values)}}.dump() << '\n';
    }
}

void save_dataset(const std::filesystem::path& path, std::span<const TimeSeries> series)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    }
    write_dataset(out, series);
}

} // namespace raf
