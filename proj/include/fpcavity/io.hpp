#pragma once

// File formats: scan CSV with a `#meta key=value` header block, stack JSON,
// strain-field CSV, spectrum CSV, and atomic output writes.

#include "fpcavity/emitter_physics.hpp"
#include "fpcavity/layered_optics.hpp"
#include "fpcavity/scan_analysis.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace fpcavity::io
{
// Shortest round-trippable-enough text form used in every output file.
std::string format_number(double value);

scan::ScanTrace parse_scan_csv(std::istream &in, const std::string &source = "<stream>");
scan::ScanTrace read_scan_csv(const std::filesystem::path &path);
std::string scan_to_csv(const scan::ScanTrace &trace);

// Accepts a bare array of layers or {"layers": [...], "label": ...}. Each
// layer is {index_real, index_imag, thickness_nm, semi_infinite, dispersion}
// with dispersion an optional list of {wavelength_nm, index_real, index_imag}.
optics::LayerStack stack_from_json(const nlohmann::json &doc);
nlohmann::json stack_to_json(const optics::LayerStack &stack);
optics::LayerStack read_stack_json(const std::filesystem::path &path);

// Rows position_um,class,axial_ghz,transverse_ghz[,transverse_excited_ghz].
// A missing excited-state column is filled as excited_ratio * transverse_ghz.
// Rows sharing a position are merged; classes absent at a position stay
// unstrained.
std::vector<emitter::StrainSample> parse_strain_csv(std::istream &in, double excited_ratio,
                                                    const std::string &source = "<stream>");
std::vector<emitter::StrainSample> read_strain_csv(const std::filesystem::path &path, double excited_ratio);

struct Spectrum
{
    std::vector<double> wavelength_nm;
    std::vector<double> intensity;
};

// Rows wavelength_nm,intensity; an optional header line and # comments.
Spectrum parse_spectrum_csv(std::istream &in, const std::string &source = "<stream>");
Spectrum read_spectrum_csv(const std::filesystem::path &path);

// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path &path, const std::string &content);
} // namespace fpcavity::io
