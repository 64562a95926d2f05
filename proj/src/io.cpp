#include "fpcavity/io.hpp"

#include "fpcavity/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fpcavity::io
{
namespace
{
std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
    {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep))
    {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == sep)
    {
        out.emplace_back();
    }
    return out;
}

std::optional<double> to_double(const std::string &s)
{
    if (s.empty())
    {
        return std::nullopt;
    }
    double v = 0.0;
    const char *first = s.data();
    const char *last = s.data() + s.size();
    if (*first == '+')
    {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
    {
        return std::nullopt;
    }
    return v;
}

std::string where(const std::string &source, std::size_t line_no)
{
    return source + ":" + std::to_string(line_no) + ": ";
}

std::ifstream open(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw IoError("cannot open " + path.string());
    }
    return in;
}

double json_number(const nlohmann::json &obj, const char *key, double fallback, const std::string &ctx)
{
    if (!obj.contains(key))
    {
        return fallback;
    }
    if (!obj.at(key).is_number())
    {
        throw IoError(ctx + ": '" + key + "' must be a number");
    }
    return obj.at(key).get<double>();
}
} // namespace

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

scan::ScanTrace parse_scan_csv(std::istream &in, const std::string &source)
{
    scan::ScanTrace trace;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line))
    {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty())
        {
            continue;
        }
        if (t.rfind("#meta", 0) == 0)
        {
            const std::string kv = trim(t.substr(5));
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
            {
                throw IoError(where(source, line_no) + "#meta line needs key=value");
            }
            const std::string key = trim(kv.substr(0, eq));
            const std::string value = trim(kv.substr(eq + 1));
            try
            {
                if (key == "units")
                {
                    trace.meta.units = value;
                }
                else if (key == "temperature_K" || key == "temperature_k")
                {
                    const auto v = to_double(value);
                    if (!v)
                    {
                        throw IoError("bad temperature");
                    }
                    trace.meta.temperature_k = *v;
                }
                else if (key == "excitation_nm")
                {
                    const auto v = to_double(value);
                    if (!v)
                    {
                        throw IoError("bad excitation wavelength");
                    }
                    trace.meta.excitation_nm = *v;
                }
                else if (key == "channel")
                {
                    trace.meta.channel = scan::channel_from_string(value);
                }
                else
                {
                    trace.meta.extra[key] = value;
                }
            }
            catch (const std::exception &e)
            {
                throw IoError(where(source, line_no) + "invalid #meta " + key + ": " + e.what());
            }
            continue;
        }
        if (t.front() == '#')
        {
            continue;
        }
        const auto cells = split(t, ',');
        if (cells.size() != 2)
        {
            throw IoError(where(source, line_no) + "expected 2 columns, found " + std::to_string(cells.size()));
        }
        const auto x = to_double(cells[0]);
        const auto y = to_double(cells[1]);
        if (!x || !y)
        {
            if (!header_seen && trace.abscissa.empty())
            {
                header_seen = true;
                continue;
            }
            throw IoError(where(source, line_no) + "non-numeric value");
        }
        trace.abscissa.push_back(*x);
        trace.ordinate.push_back(*y);
    }
    try
    {
        trace.validate();
    }
    catch (const ValidationError &e)
    {
        throw IoError(source + ": " + e.what());
    }
    return trace;
}

scan::ScanTrace read_scan_csv(const std::filesystem::path &path)
{
    auto in = open(path);
    return parse_scan_csv(in, path.string());
}

std::string scan_to_csv(const scan::ScanTrace &trace)
{
    std::ostringstream os;
    os << "#meta units=" << trace.meta.units << "\n";
    os << "#meta channel=" << scan::to_string(trace.meta.channel) << "\n";
    if (trace.meta.temperature_k)
    {
        os << "#meta temperature_K=" << format_number(*trace.meta.temperature_k) << "\n";
    }
    if (trace.meta.excitation_nm)
    {
        os << "#meta excitation_nm=" << format_number(*trace.meta.excitation_nm) << "\n";
    }
    for (const auto &[k, v] : trace.meta.extra)
    {
        os << "#meta " << k << "=" << v << "\n";
    }
    os << "abscissa,value\n";
    for (std::size_t i = 0; i < trace.abscissa.size(); ++i)
    {
        os << format_number(trace.abscissa[i]) << "," << format_number(trace.ordinate[i]) << "\n";
    }
    return os.str();
}

optics::LayerStack stack_from_json(const nlohmann::json &doc)
{
    optics::LayerStack stack;
    const nlohmann::json *layers = &doc;
    if (doc.is_object())
    {
        if (!doc.contains("layers"))
        {
            throw IoError("stack JSON object needs a 'layers' array");
        }
        layers = &doc.at("layers");
        if (doc.contains("label") && doc.at("label").is_string())
        {
            stack.label = doc.at("label").get<std::string>();
        }
    }
    if (!layers->is_array())
    {
        throw IoError("stack layers must be a JSON array");
    }
    std::size_t k = 0;
    for (const auto &entry : *layers)
    {
        const std::string ctx = "layer " + std::to_string(k++);
        if (!entry.is_object())
        {
            throw IoError(ctx + ": expected an object");
        }
        for (const auto &[key, value] : entry.items())
        {
            (void)value;
            if (key != "index_real" && key != "index_imag" && key != "thickness_nm" && key != "semi_infinite" &&
                key != "dispersion" && key != "name")
            {
                throw IoError(ctx + ": unknown key '" + key + "'");
            }
        }
        if (!entry.contains("index_real"))
        {
            throw IoError(ctx + ": missing index_real");
        }
        optics::OpticalLayer layer;
        layer.index = {json_number(entry, "index_real", 1.0, ctx), json_number(entry, "index_imag", 0.0, ctx)};
        layer.thickness_nm = json_number(entry, "thickness_nm", 0.0, ctx);
        layer.semi_infinite = entry.value("semi_infinite", false);
        if (entry.contains("dispersion"))
        {
            for (const auto &s : entry.at("dispersion"))
            {
                layer.dispersion.push_back({json_number(s, "wavelength_nm", 0.0, ctx),
                                            {json_number(s, "index_real", 1.0, ctx), json_number(s, "index_imag", 0.0, ctx)}});
            }
        }
        stack.layers.push_back(std::move(layer));
    }
    return stack;
}

nlohmann::json stack_to_json(const optics::LayerStack &stack)
{
    nlohmann::json layers = nlohmann::json::array();
    for (const auto &l : stack.layers)
    {
        nlohmann::json j = {{"index_real", l.index.real()}, {"index_imag", l.index.imag()}};
        if (l.semi_infinite)
        {
            j["semi_infinite"] = true;
        }
        else
        {
            j["thickness_nm"] = l.thickness_nm;
        }
        if (!l.dispersion.empty())
        {
            nlohmann::json table = nlohmann::json::array();
            for (const auto &s : l.dispersion)
            {
                table.push_back({{"wavelength_nm", s.wavelength_nm},
                                 {"index_real", s.index.real()},
                                 {"index_imag", s.index.imag()}});
            }
            j["dispersion"] = table;
        }
        layers.push_back(j);
    }
    nlohmann::json out = {{"layers", layers}};
    if (!stack.label.empty())
    {
        out["label"] = stack.label;
    }
    return out;
}

optics::LayerStack read_stack_json(const std::filesystem::path &path)
{
    auto in = open(path);
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw IoError(path.string() + ": " + e.what());
    }
    try
    {
        optics::LayerStack stack = stack_from_json(doc);
        stack.validate();
        return stack;
    }
    catch (const std::exception &e)
    {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::vector<emitter::StrainSample> parse_strain_csv(std::istream &in, double excited_ratio, const std::string &source)
{
    std::map<double, emitter::ClassStrain> by_position;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line))
    {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
        {
            continue;
        }
        const auto cells = split(t, ',');
        if (cells.size() != 4 && cells.size() != 5)
        {
            throw IoError(where(source, line_no) + "expected 4 or 5 columns");
        }
        std::vector<double> v;
        for (const auto &c : cells)
        {
            const auto d = to_double(c);
            if (!d)
            {
                break;
            }
            v.push_back(*d);
        }
        if (v.size() != cells.size())
        {
            if (!header_seen && by_position.empty())
            {
                header_seen = true;
                continue;
            }
            throw IoError(where(source, line_no) + "non-numeric value");
        }
        const int cls = static_cast<int>(v[1]);
        if (static_cast<double>(cls) != v[1] || (cls != 1 && cls != 2))
        {
            throw IoError(where(source, line_no) + "class must be 1 or 2");
        }
        emitter::StrainState s;
        s.axial_shift_ghz = v[2];
        s.transverse_ground_ghz = v[3];
        s.transverse_excited_ghz = v.size() == 5 ? v[4] : excited_ratio * v[3];
        s.orientation_class = cls;
        try
        {
            s.validate();
        }
        catch (const ValidationError &e)
        {
            throw IoError(where(source, line_no) + e.what());
        }
        auto &entry = by_position[v[0]];
        (cls == 1 ? entry.first : entry.second) = s;
    }
    if (by_position.empty())
    {
        throw IoError(source + ": no strain rows");
    }
    std::vector<emitter::StrainSample> out;
    for (const auto &[pos, strain] : by_position)
    {
        out.push_back({pos, strain});
    }
    return out;
}

std::vector<emitter::StrainSample> read_strain_csv(const std::filesystem::path &path, double excited_ratio)
{
    auto in = open(path);
    return parse_strain_csv(in, excited_ratio, path.string());
}

Spectrum parse_spectrum_csv(std::istream &in, const std::string &source)
{
    Spectrum out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line))
    {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
        {
            continue;
        }
        const auto cells = split(t, ',');
        if (cells.size() != 2)
        {
            throw IoError(where(source, line_no) + "expected 2 columns");
        }
        const auto x = to_double(cells[0]);
        const auto y = to_double(cells[1]);
        if (!x || !y)
        {
            if (!header_seen && out.wavelength_nm.empty())
            {
                header_seen = true;
                continue;
            }
            throw IoError(where(source, line_no) + "non-numeric value");
        }
        out.wavelength_nm.push_back(*x);
        out.intensity.push_back(*y);
    }
    if (out.wavelength_nm.empty())
    {
        throw IoError(source + ": empty spectrum");
    }
    return out;
}

Spectrum read_spectrum_csv(const std::filesystem::path &path)
{
    auto in = open(path);
    return parse_spectrum_csv(in, path.string());
}

void write_text_atomic(const std::filesystem::path &path, const std::string &content)
{
    std::error_code ec;
    if (path.has_parent_path())
    {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
        {
            throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw IoError("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out)
        {
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec)
    {
        std::filesystem::remove(tmp);
        throw IoError("cannot move output into place at " + path.string() + ": " + ec.message());
    }
}
} // namespace fpcavity::io
