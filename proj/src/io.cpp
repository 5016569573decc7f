#include "spdc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "spdc/errors.hpp"

#ifndef SPDC_VERSION
#define SPDC_VERSION "unknown"
#endif

namespace spdc {

const char* version()
{
    return SPDC_VERSION;
}

namespace io {

namespace fs = std::filesystem;

void Table::add_row(std::vector<Cell> row)
{
    if (row.size() != columns.size())
        throw std::logic_error("table row has " + std::to_string(row.size()) + " cells, expected " +
                               std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

std::string format_number(double v, int significant)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (v == 0.0)
        return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, v);
    return buf;
}

namespace {

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_cell(const Cell& c, ColumnKind kind)
{
    if (const auto* d = std::get_if<double>(&c)) {
        switch (kind) {
        case ColumnKind::position: return format_number(*d, 17);
        case ColumnKind::integer: return format_number(*d, 17);
        default: return format_number(*d, 10);
        }
    }
    if (const auto* i = std::get_if<std::int64_t>(&c))
        return std::to_string(*i);
    return quote(std::get<std::string>(c));
}

void write_file(const fs::path& p, const std::string& content)
{
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open '" + p.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f)
        throw IoError("write to '" + p.string() + "' failed");
}

} // namespace

std::string to_csv(const Table& t)
{
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c)
            out += ',';
        out += quote(t.columns[c].name);
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            out += format_cell(row[c], t.columns[c].kind);
        }
        out += '\n';
    }
    return out;
}

CsvData parse_csv(const std::string& text)
{
    CsvData d;
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false, any = false;
    auto end_row = [&]() {
        fields.push_back(cur);
        cur.clear();
        if (d.header.empty())
            d.header = std::move(fields);
        else
            d.rows.push_back(std::move(fields));
        fields.clear();
        any = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += ch;
            }
            continue;
        }
        if (ch == '"') {
            in_quotes = true;
            any = true;
        } else if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
            any = true;
        } else if (ch == '\n') {
            end_row();
        } else if (ch != '\r') {
            cur += ch;
            any = true;
        }
    }
    if (in_quotes)
        throw IoError("unterminated quote in CSV");
    if (any || !fields.empty())
        end_row();
    for (const auto& r : d.rows)
        if (r.size() != d.header.size())
            throw IoError("CSV row width differs from header");
    return d;
}

std::string read_file(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f)
        throw IoError("cannot open '" + p.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad())
        throw IoError("read from '" + p.string() + "' failed");
    return ss.str();
}

std::string dump_json(const json& j)
{
    return j.dump(2) + "\n";
}

OutputBundle::OutputBundle(fs::path target) : target_(std::move(target))
{
    if (target_.empty())
        throw IoError("empty output directory");
    if (!target_.has_filename())
        target_ = target_.parent_path();
    staging_ = target_;
    staging_ += ".partial";
    std::error_code ec;
    if (target_.has_parent_path())
        fs::create_directories(target_.parent_path(), ec);
    if (ec)
        throw IoError("cannot create '" + target_.parent_path().string() + "': " + ec.message());
    fs::remove_all(staging_, ec);
    if (!fs::create_directory(staging_, ec) || ec)
        throw IoError("cannot create staging directory '" + staging_.string() + "'");
}

OutputBundle::~OutputBundle()
{
    if (!committed_) {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }
}

void OutputBundle::write_text(const std::string& name, const std::string& content)
{
    if (committed_)
        throw std::logic_error("bundle already committed");
    if (name.empty() || name.find('/') != std::string::npos)
        throw IoError("invalid output file name '" + name + "'");
    write_file(staging_ / name, content);
    files_.push_back(name);
}

void OutputBundle::write_json(const std::string& name, const json& j)
{
    write_text(name, dump_json(j));
}

void OutputBundle::commit()
{
    if (committed_)
        return;
    std::error_code ec;
    fs::path old;
    if (fs::exists(target_, ec)) {
        const bool previous = fs::is_directory(target_) &&
                              (fs::is_empty(target_) || fs::exists(target_ / "metadata.json"));
        if (!previous)
            throw IoError("output directory '" + target_.string() +
                          "' exists and does not hold a previous run");
        old = target_;
        old += ".old";
        fs::remove_all(old, ec);
        fs::rename(target_, old, ec);
        if (ec)
            throw IoError("cannot move previous output aside: " + ec.message());
    }
    fs::rename(staging_, target_, ec);
    if (ec) {
        if (!old.empty())
            fs::rename(old, target_, ec);
        throw IoError("cannot move outputs into '" + target_.string() + "'");
    }
    committed_ = true;
    if (!old.empty())
        fs::remove_all(old, ec);
}

void save_structure(const fs::path& path, const PolingStructure& s, const json& extra)
{
    Table t({{"index", ColumnKind::integer}, {"z", ColumnKind::position}});
    for (std::size_t n = 0; n < s.boundaries.size(); ++n)
        t.add_row({static_cast<std::int64_t>(n), s.boundaries[n]});
    write_file(path, to_csv(t));
    json side = extra;
    side["kind"] = kind_name(s.kind);
    side["domains"] = s.domain_count();
    side["length"] = s.boundaries.empty() ? 0.0 : s.length();
    side["rejections"] = s.rejections;
    fs::path sp = path;
    sp += ".json";
    write_file(sp, dump_json(side));
}

PolingStructure load_structure(const fs::path& path)
{
    const auto csv = parse_csv(read_file(path));
    if (csv.header.size() != 2 || csv.header[0] != "index" || csv.header[1] != "z")
        throw IoError("'" + path.string() + "': expected header index,z");
    PolingStructure s;
    s.boundaries.reserve(csv.rows.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        char* end = nullptr;
        const long long idx = std::strtoll(row[0].c_str(), &end, 10);
        if (*end != '\0' || idx != static_cast<long long>(r))
            throw IoError("'" + path.string() + "': bad index on row " + std::to_string(r + 1));
        const double z = std::strtod(row[1].c_str(), &end);
        if (row[1].empty() || *end != '\0' || !std::isfinite(z))
            throw IoError("'" + path.string() + "': bad position on row " + std::to_string(r + 1));
        s.boundaries.push_back(z);
    }
    fs::path sp = path;
    sp += ".json";
    if (fs::exists(sp)) {
        json side;
        try {
            side = json::parse(read_file(sp));
            if (side.contains("kind"))
                s.kind = kind_from_name(side.at("kind").get<std::string>());
            if (side.contains("rejections"))
                s.rejections = side.at("rejections").get<std::size_t>();
        } catch (const json::exception& e) {
            throw IoError("'" + sp.string() + "': " + e.what());
        } catch (const ParameterError& e) {
            throw IoError("'" + sp.string() + "': " + e.what());
        }
    }
    s.validate();
    return s;
}

} // namespace io
} // namespace spdc
