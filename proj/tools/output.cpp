#include "output.hpp"

#include "mf/errors.hpp"
#include "mf/version.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mftool {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw mf::ArgumentError("cannot write " + tmp.string());
        os << content;
        os.flush();
        if (!os)
            throw mf::ArgumentError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string render_csv(const Table& t)
{
    std::ostringstream os;
    os << "# version = " << mf::version << '\n';
    for (const auto& [k, v] : t.config)
        os << "# " << k << " = " << v << '\n';
    for (const auto& [k, v] : t.results)
        os << "# result." << k << " = " << v << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

std::string render_json(const Table& t)
{
    nlohmann::ordered_json j;
    j["version"] = mf::version;
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.config)
        j["config"][k] = v;
    j["results"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.results)
        j["results"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    return j.dump(1) + "\n";
}

void write_table(const fs::path& dir, const Table& t, bool json)
{
    write_atomic(dir / (t.stem + ".csv"), render_csv(t));
    if (json)
        write_atomic(dir / (t.stem + ".json"), render_json(t));
}

KeyValues read_key_values(const fs::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw mf::ArgumentError("cannot read " + path.string());
    KeyValues out;
    std::string line;
    int n = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw mf::ArgumentError(path.string() + ":" + std::to_string(n) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

} // namespace mftool
