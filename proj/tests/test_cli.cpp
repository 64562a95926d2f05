#include "cli.hpp"

#include "fpcavity/config.hpp"
#include "fpcavity/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
const fs::path kData = FPCAV_DATA_DIR;
const fs::path kFixtures = kData / "fixtures";

struct Run
{
    int code = 0;
    std::string out;
    std::string err;
};

struct Sandbox
{
    fs::path dir;
    explicit Sandbox(const std::string &name) : dir(fs::temp_directory_path() / ("fpcav_cli_" + name))
    {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    Run run(std::vector<std::string> args) const
    {
        args.insert(args.begin(), {"--out", dir.string()});
        std::ostringstream out;
        std::ostringstream err;
        const int code = fpcavity::cli::run(args, out, err);
        return {code, out.str(), err.str()};
    }
    json read_json(const std::string &name) const
    {
        std::ifstream in(dir / name);
        return json::parse(in);
    }
    std::vector<std::vector<std::string>> read_csv(const std::string &name) const
    {
        std::ifstream in(dir / name);
        std::vector<std::vector<std::string>> rows;
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line))
        {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string c;
            while (std::getline(ss, c, ','))
            {
                cells.push_back(c);
            }
            rows.push_back(cells);
        }
        return rows;
    }
};

json generator_truth()
{
    std::ifstream in(kFixtures / "generator.json");
    return json::parse(in);
}
} // namespace

TEST_CASE("cli: usage and exit codes")
{
    Sandbox box("usage");
    CHECK(box.run({}).code == 2);
    CHECK(box.run({"frobnicate"}).code == 2);
    CHECK(box.run({"report", "--finesse", "820"}).code == 2);
    CHECK(box.run({"--config", "/nonexistent.json", "stack"}).code == 2);
    std::ostringstream out, err;
    CHECK(fpcavity::cli::run({"--help"}, out, err) == 0);
    CHECK(out.str().find("dispersion") != std::string::npos);
}

TEST_CASE("cli: stack")
{
    Sandbox box("stack");
    const Run r = box.run({"stack", "--spectrum", "--field", "--overlap"});
    REQUIRE(r.code == 0);
    const auto spectrum = box.read_csv("spectrum.csv");
    REQUIRE_FALSE(spectrum.empty());
    CHECK(std::stod(spectrum.front()[0]) == doctest::Approx(550.0));
    CHECK(std::stod(spectrum.back()[0]) == doctest::Approx(850.0));
    const json overlap = box.read_json("overlap.json");
    CHECK(overlap["overlap"].get<double>() == doctest::Approx(0.6957).epsilon(2e-3));
    CHECK(overlap["mode_depth_nm"].get<double>() == doctest::Approx(50.0));
    CHECK(overlap["mode_intensity"].get<double>() == doctest::Approx(0.80).epsilon(0.15 / 0.80));
    CHECK(fs::exists(box.dir / "field.csv"));

    CHECK(box.run({"stack", "--stack", (box.dir / "missing.json").string()}).code == 2);
    CHECK(box.run({"--format", "text", "stack"}).code == 2);

    const Run bundled = box.run({"--format", "json", "stack", "--stack", (kData / "mirror_737nm.json").string()});
    REQUIRE(bundled.code == 0);
    const json j = box.read_json("spectrum.json");
    CHECK(j["R"].size() == j["wavelength_nm"].size());
}

TEST_CASE("cli: dispersion")
{
    Sandbox box("dispersion");
    SUBCASE("bare cavity resonances are spaced by lambda/2")
    {
        REQUIRE(box.run({"dispersion", "--no-membrane", "--wavelength-min-nm", "736", "--wavelength-max-nm", "738",
                         "--wavelength-step-nm", "1"})
                    .code == 0);
        std::map<double, std::vector<double>> gaps;
        for (const auto &row : box.read_csv("mode_chart.csv"))
        {
            gaps[std::stod(row[2])].push_back(std::stod(row[3]));
        }
        REQUIRE(gaps.count(737.0) == 1);
        auto g = gaps[737.0];
        std::sort(g.begin(), g.end());
        REQUIRE(g.size() >= 3);
        for (std::size_t i = 1; i < g.size(); ++i)
        {
            CHECK(g[i] - g[i - 1] == doctest::Approx(368.5).epsilon(1e-6));
        }
    }
    SUBCASE("membrane chart has both classes")
    {
        REQUIRE(box.run({"dispersion", "--wavelength-min-nm", "730", "--wavelength-max-nm", "745"}).code == 0);
        std::set<std::string> classes;
        for (const auto &row : box.read_csv("mode_chart.csv"))
        {
            classes.insert(row[4]);
        }
        CHECK(classes.size() == 2);
    }
    SUBCASE("empty wavelength range")
    {
        const Run r = box.run({"dispersion", "--wavelength-min-nm", "740", "--wavelength-max-nm", "730"});
        CHECK(r.code == 2);
        CHECK(r.err.find("wavelength range") != std::string::npos);
    }
}

TEST_CASE("cli: report")
{
    Sandbox box("report");
    REQUIRE(box.run({"report", "--finesse", "820", "--tau-free-ns", "1.72", "--tau-cavity-ns", "0.78"}).code == 0);
    const json j = box.read_json("report.json");
    const json &p = j["parameters"];
    CHECK(p["mode_number"]["value"].get<double>() == 29.0);
    CHECK(p["cooperativity"]["value"].get<double>() == doctest::Approx(1.205).epsilon(1e-3));
    CHECK(p["purcell_effective"]["value"].get<double>() == doctest::Approx(2.205).epsilon(1e-3));
    for (const auto &[key, row] : p.items())
    {
        CHECK_FALSE(row["origin"].get<std::string>().empty());
    }

    REQUIRE(box.run({"report", "--finesse", "820", "--tau-free-ns", "1", "--tau-cavity-ns", "1"}).code == 0);
    CHECK(box.read_json("report.json")["parameters"]["cooperativity"]["value"].get<double>() == 0.0);

    const Run text = box.run({"--format", "text", "report", "--finesse", "820", "--tau-free-ns", "1.72",
                              "--tau-cavity-ns", "0.78"});
    REQUIRE(text.code == 0);
    CHECK(text.out.find("Cooperativity") != std::string::npos);
    CHECK(box.run({"report", "--finesse", "0.5", "--tau-free-ns", "1", "--tau-cavity-ns", "1"}).code == 2);
}

TEST_CASE("cli: analyze fixtures")
{
    Sandbox box("analyze");
    const json truth = generator_truth();
    const std::string cfg = (kData / "default_config.json").string();

    SUBCASE("finesse and absorption")
    {
        REQUIRE(box.run({"--config", cfg, "analyze", "scan", (kFixtures / "scan_emitters.csv").string(), "--reference",
                         (kFixtures / "scan_reference.csv").string()})
                    .code == 0);
        const json j = box.read_json("scan.json");
        CHECK(j["finesse"].get<double>() == doctest::Approx(truth["scan_emitters.csv"]["finesse"].get<double>()).epsilon(0.01));
        CHECK(j["absorption"]["finesse_reference"].get<double>() ==
              doctest::Approx(truth["scan_reference.csv"]["finesse"].get<double>()).epsilon(0.01));
        CHECK(j["absorption"]["emitter_loss_ppm"].get<double>() == doctest::Approx(2830.0).epsilon(0.01));
    }
    SUBCASE("lifetimes")
    {
        for (const char *name : {"lifetime_free.csv", "lifetime_cavity.csv"})
        {
            REQUIRE(box.run({"--config", cfg, "analyze", "lifetime", (kFixtures / name).string()}).code == 0);
            CHECK(box.read_json("lifetime.json")["tau_ns"].get<double>() ==
                  doctest::Approx(truth[name]["tau_ns"].get<double>()).epsilon(0.05));
        }
    }
    SUBCASE("PLE")
    {
        std::vector<std::string> args{"--config", cfg, "analyze", "ple"};
        for (const auto &f : truth["ple"]["files"])
        {
            args.push_back((kFixtures / f.get<std::string>()).string());
        }
        REQUIRE(box.run(args).code == 0);
        CHECK(box.read_json("ple.json")["inhomogeneous"]["fwhm_ghz"].get<double>() ==
              doctest::Approx(truth["ple"]["fwhm_ghz"].get<double>()).epsilon(0.03));
    }
    SUBCASE("fine structure")
    {
        REQUIRE(box.run({"--config", cfg, "analyze", "spectrum", (kFixtures / "spectrum_four_line.csv").string()}).code == 0);
        const json j = box.read_json("fine_structure.json");
        const json &t = truth["spectrum_four_line.csv"];
        CHECK(j["ground_splitting_ghz"].get<double>() == doctest::Approx(t["ground_splitting_ghz"].get<double>()).epsilon(0.01));
        CHECK(j["excited_splitting_ghz"].get<double>() == doctest::Approx(t["excited_splitting_ghz"].get<double>()).epsilon(0.01));
    }
    SUBCASE("malformed input exits 2")
    {
        std::ofstream(box.dir / "bad.csv") << "1,2,3\n4,5,6\n";
        CHECK(box.run({"analyze", "scan", (box.dir / "bad.csv").string()}).code == 2);
        CHECK(box.run({"analyze", "scan", (box.dir / "absent.csv").string()}).code == 2);
    }
    SUBCASE("a trace without resonances exits 1")
    {
        std::ostringstream flat;
        for (int i = 0; i < 100; ++i)
        {
            flat << i << ",1\n";
        }
        std::ofstream(box.dir / "flat.csv") << flat.str();
        const Run r = box.run({"analyze", "scan", (box.dir / "flat.csv").string()});
        CHECK(r.code == 1);
        CHECK(r.err.find("analysis failed") != std::string::npos);
    }
}

TEST_CASE("cli: emitter")
{
    Sandbox box("emitter");
    REQUIRE(box.run({"emitter"}).code == 0);
    CHECK(fs::exists(box.dir / "zpl_spectrum.csv"));
    const json summary = box.read_json("emitter.json");
    CHECK(summary["phonon_temperature_k"].get<double>() == doctest::Approx(2.30).epsilon(3e-3));

    REQUIRE(box.run({"emitter", "--strain", (kFixtures / "strain_line.csv").string()}).code == 0);
    const auto rows = box.read_csv("linescan.csv");
    std::set<std::string> positions;
    for (const auto &r : rows)
    {
        positions.insert(r[0]);
    }
    CHECK(positions.size() == 21);
}
