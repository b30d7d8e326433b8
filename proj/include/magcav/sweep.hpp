#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magcav/extraction.hpp"
#include "magcav/params.hpp"

namespace magcav {

struct SweepConfig {
    double b_min = 0.0;       // T
    double b_max = 0.0;       // T
    int b_points = 0;
    double freq_center = 0.0; // Hz; 0 means use omega_c
    double freq_span = 0.0;   // Hz
    int freq_points = 0;
};

struct NoiseConfig {
    double relative_amplitude = 0.0;  // multiplicative Gaussian sigma on |S|^2
    std::uint64_t seed = 0;
    bool seed_set = false;
};

struct RingdownConfig {
    double t_max = 1000e-9;  // s
    double dt = 1e-9;        // s
    double scale = 1.0;
    double offset = 0.0;
    double b0 = 0.0;         // T
};

struct EigenConfig {
    std::vector<double> kappa_m_list;  // Hz, one branch sweep per value
    int b_points = 2001;
};

struct ExtractionConfig {
    double residual_cap = 0.2;
    bool bias_correction = true;
    double asymptote_window = 3.0;
};

// One config file drives any subcommand; blocks for other tasks may be absent.
struct RunConfig {
    SystemParams params;
    std::optional<SweepConfig> sweep;
    NoiseConfig noise;
    std::optional<RingdownConfig> ringdown;
    EigenConfig eigen;
    ExtractionConfig extraction;
};

// Strict JSON parse: any unknown key is rejected with its path named; a noise
// amplitude > 0 without a seed is rejected (reproducibility).
RunConfig config_from_json(const std::string& text);
RunConfig config_from_file(const std::string& path);
std::string config_to_json(const RunConfig& config);

// FNV-1a hash of the canonicalized config document.
std::string config_hash(const RunConfig& config);

struct GeneratedSweep {
    std::vector<double> fields;              // T
    std::vector<ComplexSpectrum> s21_spectra;
    std::vector<ComplexSpectrum> s22_spectra;
    std::vector<PowerSpectrum> power;        // |S21|^2 with optional noise
};

// Forward model of the field-swept spectra with optional seeded multiplicative
// noise applied to |S21|^2.
GeneratedSweep generate_sweep(const RunConfig& config);

// Extraction-compatible long-format CSV (B_mT, freq_GHz, power_linear).
std::string sweep_to_csv(const GeneratedSweep& sweep);
void write_sweep_csv(const GeneratedSweep& sweep, const std::string& path);

struct DisplayMatrix {
    std::vector<double> fields;        // T (columns)
    std::vector<double> frequencies;   // Hz (rows)
    std::vector<std::vector<double>> values;  // [field][freq]
    bool reference_near_resonance = false;    // warning: |Delta_ref| < 5*kappa_m
};

// Subtracts the reference-field |S22| column from every column (display
// transform; not used by extraction).
DisplayMatrix background_subtract(const GeneratedSweep& sweep, double reference_b,
                                  const RunConfig& config);

// Versioned result wrapper written next to every artifact.
struct ResultEnvelope {
    std::string task;
    std::string config_hash;
    std::string version;
    std::string timestamp;   // ISO-8601, UTC
    std::string payload;     // task-specific JSON (serialized object)
    std::vector<std::string> files;
};

std::string envelope_to_json(const ResultEnvelope& e);
ResultEnvelope envelope_from_json(const std::string& text);

ResultEnvelope make_envelope(const std::string& task, const RunConfig& config,
                             const std::string& payload_json,
                             const std::vector<std::string>& files);

inline constexpr const char* toolkit_version = "0.1.0";

}  // namespace magcav
