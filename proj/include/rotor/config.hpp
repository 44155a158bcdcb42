#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rotor/model.hpp"
#include "rotor/optimizer.hpp"

namespace rotor {

/// Declarative run description.  Every dimensional quantity carries its unit
/// in the key name (au = Hartree atomic units, Tper = rotational periods).
/// Parsing is strict: unknown keys and missing required keys are errors.

struct BasisConfig {
    int j_max = 15;
    std::optional<int> fixed_m;
};

struct ModelConfig {
    std::string type = "z_full"; // z_full | z_averaged | xy
    double phase_diff_rad = 0.0; // xy only
};

struct TimeGridConfig {
    double t_final_Tper = 1.0;
    int n_steps = 16384;
};

struct TaskConfig {
    std::string type = "orientation"; // orientation | delocalization | thermal
    int j_f = 4;                      // orientation, thermal
    int target_j = 0;                 // delocalization
    int target_m = 0;                 // delocalization
    double temperature_K = 0.0;       // thermal
    double forward_cutoff = 1e-12;    // thermal: ensemble population cutoff
    double post_pulse_Tper = 0.0;     // field-free continuation in the outputs
};

struct GaussianPulse {
    std::optional<double> peak_intensity_Wcm2; // exactly one of these two
    std::optional<double> amplitude_au;
    double center_Tper = 0.2;
    double fwhm_fs = 144.0;

    double amplitudeAu() const;
    double sigmaAu() const;
};

struct GuessConfig {
    std::vector<std::vector<GaussianPulse>> channels;
};

struct OptimizerRunConfig {
    std::string method = "krotov"; // krotov | lapert
    double lambda = 5e-2;
    double field_scale_au = 1.0; // cost reference amplitude E_s
};

struct OptimizerConfig {
    std::string method = "krotov";
    double lambda = 5e-2;
    double field_scale_au = 1.0;
    int iterations = 20;
    double stagnation_eps = 1e-7;
    std::vector<OptimizerRunConfig> runs; // batch scan; overrides method/lambda
};

struct OutputConfig {
    std::string directory = "out";
    int dynamics_stride = 16;  // step edges per dynamics.csv row
    int population_j_max = 4;  // largest j whose populations are tabulated
};

struct RunConfig {
    MoleculeParams molecule;
    BasisConfig basis;
    ModelConfig model;
    TimeGridConfig time_grid;
    TaskConfig task;
    GuessConfig guess;
    OptimizerConfig optimizer;
    OutputConfig output;

    int modelChannels() const { return model.type == "xy" ? 2 : 1; }
    /// Every (method, lambda) pair to execute.
    std::vector<OptimizerRunConfig> optimizerRuns() const;
};

OptimizerKind parseMethod(const std::string& name);

RunConfig parseConfig(const nlohmann::json& j);
RunConfig parseConfigText(const std::string& text);
RunConfig parseConfigFile(const std::string& path);

nlohmann::json toJson(const RunConfig& config);

} // namespace rotor
