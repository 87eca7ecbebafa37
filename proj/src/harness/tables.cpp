#include <ostream>

#include <json.hpp>

#include "qlab/error.hpp"
#include "qlab/harness.hpp"

namespace qlab::harness {

Format parse_format(const std::string &name) {
    if (name == "csv")
        return Format::Csv;
    if (name == "json")
        return Format::Json;
    throw Error(Errc::InvalidArgument, "unknown format '" + name + "' (csv or json)");
}

void write_csv(std::ostream &out, const Table &table) {
    auto line = [&](const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(table.header);
    for (const auto &row : table.rows)
        line(row);
}

void write_json(std::ostream &out, const Table &table) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto &row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < table.header.size() && i < row.size(); ++i)
            obj[table.header[i]] = row[i];
        arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
}

void write_table(std::ostream &out, const Table &table, Format format) {
    if (format == Format::Csv)
        write_csv(out, table);
    else
        write_json(out, table);
}

} // namespace qlab::harness
