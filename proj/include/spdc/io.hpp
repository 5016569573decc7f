#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "spdc/structures.hpp"

namespace spdc {

/// Build identifier (git describe at configure time).
const char* version();

namespace io {

using json = nlohmann::json;

/// position: 17 significant digits; derived: 10.
enum class ColumnKind { position, derived, integer, text };

using Cell = std::variant<double, std::int64_t, std::string>;

struct Column {
    std::string name;
    ColumnKind kind;
};

struct Table {
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;

    Table() = default;
    explicit Table(std::vector<Column> cols) : columns(std::move(cols)) {}
    /// Throws std::logic_error on an arity mismatch.
    void add_row(std::vector<Cell> row);
    std::size_t size() const { return rows.size(); }
};

std::string format_number(double v, int significant);
/// Comma-separated, '.' decimal, header row, '\n' line ends.
std::string to_csv(const Table& t);

/// Minimal reader for the files written by to_csv: header plus numeric/text cells.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvData parse_csv(const std::string& text);

std::string read_file(const std::filesystem::path& p);

/// Writes into a staging directory next to the target and renames it into place on
/// commit(). An uncommitted bundle removes its staging directory. An existing target is
/// replaced only if it holds a previous run (metadata.json present) or is empty.
class OutputBundle {
public:
    explicit OutputBundle(std::filesystem::path target);
    ~OutputBundle();
    OutputBundle(const OutputBundle&) = delete;
    OutputBundle& operator=(const OutputBundle&) = delete;

    void write_text(const std::string& name, const std::string& content);
    void write_csv(const std::string& name, const Table& t) { write_text(name, to_csv(t)); }
    void write_json(const std::string& name, const json& j);
    void commit();

    const std::filesystem::path& target() const { return target_; }
    const std::vector<std::string>& files() const { return files_; }

private:
    std::filesystem::path target_;
    std::filesystem::path staging_;
    std::vector<std::string> files_;
    bool committed_ = false;
};

std::string dump_json(const json& j);

/// Boundaries as "index,z" with 17 significant digits plus a sidecar <path>.json with the
/// kind, counts and any extra metadata.
void save_structure(const std::filesystem::path& path, const PolingStructure& s,
                    const json& extra = json::object());
PolingStructure load_structure(const std::filesystem::path& path);

} // namespace io
} // namespace spdc
