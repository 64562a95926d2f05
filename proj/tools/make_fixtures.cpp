// Regenerates the bundled mirror design and the synthetic fixtures under
// data/. Usage: make_fixtures <data-dir>

#include "fpcavity/constants.hpp"
#include "fpcavity/emitter_physics.hpp"
#include "fpcavity/io.hpp"
#include "fpcavity/layered_optics.hpp"
#include "fpcavity/synthetic.hpp"

#include <json.hpp>

#include <cmath>
#include <iostream>
#include <sstream>

using namespace fpcavity;
namespace fs = std::filesystem;

namespace
{
void write_scan(const fs::path &path, const scan::ScanTrace &t) { io::write_text_atomic(path, io::scan_to_csv(t)); }
} // namespace

int main(int argc, char **argv)
{
    if (argc != 2)
    {
        std::cerr << "usage: make_fixtures <data-dir>\n";
        return 2;
    }
    const fs::path data = argv[1];
    const fs::path fix = data / "fixtures";
    std::mt19937_64 rng(20240607);
    nlohmann::json truth;

    optics::LayerStack mirror = optics::design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 1e-3);
    mirror.label = "quarter-wave mirror, 737 nm, T <= 1000 ppm";
    io::write_text_atomic(data / "mirror_737nm.json", io::stack_to_json(mirror).dump(2) + "\n");

    // Length scans over two resonances, spacing 400 units = lambda/2.
    for (const auto &[name, finesse, channel, samples] :
         {std::tuple{"scan_reference.csv", 3142.0, scan::Channel::kReflection, std::size_t{40001}},
          std::tuple{"scan_emitters.csv", 820.0, scan::Channel::kTransmission, std::size_t{20001}}})
    {
        scan::ScanTrace t = synthetic::cavity_length_scan(finesse, 400.0, samples, channel);
        synthetic::add_gaussian_noise(t, 0.005, rng);
        t.meta.temperature_k = 4.0;
        write_scan(fix / name, t);
        truth[name] = {{"finesse", finesse}, {"spacing", 400.0}, {"noise_sigma", 0.005}};
    }

    // Decays with Poisson counts.
    for (const auto &[name, tau] : {std::pair{"lifetime_free.csv", 1.72}, std::pair{"lifetime_cavity.csv", 0.78}})
    {
        scan::ScanTrace t = synthetic::decay_trace(tau, 1000.0, 2.0, 2.0, 0.02, 1000);
        synthetic::add_poisson_noise(t, rng);
        write_scan(fix / name, t);
        truth[name] = {{"tau_ns", tau}, {"pulse_end_ns", 2.0}, {"amplitude", 1000.0}, {"background", 2.0}};
    }

    // PLE sweep of a Gaussian ensemble, sigma 20 GHz about 737 nm.
    {
        const double center_ghz = constants::wavelength_nm_to_ghz(737.0);
        const double sigma = 20.0;
        std::vector<double> excitation;
        for (int k = -20; k <= 20; ++k)
        {
            excitation.push_back(constants::ghz_to_wavelength_nm(center_ghz + 4.0 * k));
        }
        const auto response = [&](double nm) {
            const double d = constants::wavelength_nm_to_ghz(nm) - center_ghz;
            return 400.0 * std::exp(-0.5 * d * d / (sigma * sigma));
        };
        const auto scans = synthetic::ple_scans(excitation, response, {0.0, 0.5, 1.0}, 5.0, 201);
        nlohmann::json files = nlohmann::json::array();
        for (std::size_t i = 0; i < scans.size(); ++i)
        {
            scan::ScanTrace t = scans[i].trace;
            synthetic::add_poisson_noise(t, rng);
            char name[32];
            std::snprintf(name, sizeof name, "ple/ple_%02zu.csv", i);
            write_scan(fix / name, t);
            files.push_back(name);
        }
        truth["ple"] = {{"center_nm", 737.0}, {"sigma_ghz", sigma}, {"fwhm_ghz", 2.3548200450309493 * sigma},
                        {"files", files}};
    }

    // Single-class ZPL spectrum at 10 K so the upper-branch lines are visible.
    {
        emitter::GroupIVLevels levels;
        emitter::EnsembleSpec spec;
        spec.temperature_k = 10.0;
        spec.class_mix = 1.0;
        emitter::ClassStrain strain;
        strain.first = {5.0, 60.0, 83.0, 1};
        const emitter::FineStructure fs_truth = emitter::splittings_from_strain(levels, strain.first);
        const double lo = constants::ghz_to_wavelength_nm(fs_truth.line_a_thz * 1e3) - 0.15;
        const double hi = constants::ghz_to_wavelength_nm(fs_truth.line_d_thz * 1e3) + 0.15;
        const std::vector<double> wl = synthetic::linspace(lo, hi, 1501);
        const std::vector<double> y = emitter::synthesize_zpl_spectrum(levels, strain, spec, wl);
        std::ostringstream os;
        os << "wavelength_nm,intensity\n";
        for (std::size_t i = 0; i < wl.size(); ++i)
        {
            os << io::format_number(wl[i]) << "," << io::format_number(y[i]) << "\n";
        }
        io::write_text_atomic(fix / "spectrum_four_line.csv", os.str());
        truth["spectrum_four_line.csv"] = {{"ground_splitting_ghz", fs_truth.ground_splitting_ghz},
                                           {"excited_splitting_ghz", fs_truth.excited_splitting_ghz},
                                           {"transverse_ground_ghz", 60.0},
                                           {"transverse_excited_ghz", 83.0},
                                           {"temperature_k", 10.0}};
    }

    // Strain line: class 1 transverse strain grows 10 GHz/um, class 2 fixed.
    {
        std::ostringstream os;
        os << "position_um,class,axial_ghz,transverse_ghz\n";
        for (int i = 0; i <= 20; ++i)
        {
            const double x = 0.5 * i;
            os << io::format_number(x) << ",1,0," << io::format_number(10.0 * x) << "\n";
            os << io::format_number(x) << ",2,0,40\n";
        }
        io::write_text_atomic(fix / "strain_line.csv", os.str());
        truth["strain_line.csv"] = {{"class1_gradient_ghz_per_um", 10.0}, {"class2_transverse_ghz", 40.0}};
    }

    io::write_text_atomic(fix / "generator.json", truth.dump(2) + "\n");
    std::cout << "fixtures written to " << fix.string() << "\n";
    return 0;
}
