#include "rotor/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rotor {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw std::runtime_error("config." + path + ": " + message);
}

/// Strict accessor for one JSON object: every key must be consumed exactly
/// once and leftovers are reported as unknown.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions()) return;
        for (const auto& [key, value] : j_.items())
            if (!consumed_.count(key)) fail(path_, "unknown key '" + key + "'");
    }

    bool has(const std::string& key) {
        return j_.contains(key);
    }

    const json& require(const std::string& key) {
        if (!j_.contains(key)) fail(path_, "missing required key '" + key + "'");
        consumed_.insert(key);
        return j_.at(key);
    }

    template <typename T>
    T get(const std::string& key) {
        return convert<T>(require(key), key);
    }

    template <typename T>
    T get(const std::string& key, T fallback) {
        if (!j_.contains(key)) return fallback;
        return get<T>(key);
    }

    template <typename T>
    std::optional<T> opt(const std::string& key) {
        if (!j_.contains(key) || j_.at(key).is_null()) {
            if (j_.contains(key)) consumed_.insert(key);
            return std::nullopt;
        }
        return get<T>(key);
    }

    std::string path() const { return path_; }

private:
    template <typename T>
    T convert(const json& value, const std::string& key) {
        try {
            return value.get<T>();
        } catch (const json::exception&) {
            fail(path_, "key '" + key + "' has the wrong type");
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> consumed_;
};

MoleculeParams parseMolecule(const json& j) {
    Section s(j, "molecule");
    MoleculeParams p;
    p.B_cm1 = s.get<double>("B_cm1", p.B_cm1);
    p.mu0 = s.get<double>("mu0_au", p.mu0);
    p.alpha_par = s.get<double>("alpha_par_au", p.alpha_par);
    p.alpha_perp = s.get<double>("alpha_perp_au", p.alpha_perp);
    p.beta_par = s.get<double>("beta_par_au", p.beta_par);
    p.beta_perp = s.get<double>("beta_perp_au", p.beta_perp);
    if (p.B_cm1 <= 0.0) fail("molecule", "B_cm1 must be positive");
    return p;
}

BasisConfig parseBasis(const json& j) {
    Section s(j, "basis");
    BasisConfig b;
    b.j_max = s.get<int>("j_max");
    b.fixed_m = s.opt<int>("fixed_m");
    if (b.j_max < 1) fail("basis", "j_max must be at least 1");
    if (b.fixed_m && std::abs(*b.fixed_m) > b.j_max) fail("basis", "|fixed_m| exceeds j_max");
    return b;
}

ModelConfig parseModel(const json& j) {
    Section s(j, "model");
    ModelConfig m;
    m.type = s.get<std::string>("type");
    if (m.type != "z_full" && m.type != "z_averaged" && m.type != "xy")
        fail("model", "type must be z_full, z_averaged or xy");
    if (m.type == "xy")
        m.phase_diff_rad = s.get<double>("phase_diff_rad");
    else if (s.has("phase_diff_rad"))
        fail("model", "phase_diff_rad only applies to the xy model");
    return m;
}

TimeGridConfig parseTimeGrid(const json& j) {
    Section s(j, "time_grid");
    TimeGridConfig t;
    t.t_final_Tper = s.get<double>("t_final_Tper");
    t.n_steps = s.get<int>("n_steps");
    if (t.t_final_Tper <= 0.0) fail("time_grid", "t_final_Tper must be positive");
    if (t.n_steps < 2) fail("time_grid", "n_steps must be at least 2");
    return t;
}

TaskConfig parseTask(const json& j) {
    Section s(j, "task");
    TaskConfig t;
    t.type = s.get<std::string>("type");
    if (t.type == "orientation") {
        t.j_f = s.get<int>("j_f");
    } else if (t.type == "delocalization") {
        t.target_j = s.get<int>("target_j");
        t.target_m = s.get<int>("target_m");
    } else if (t.type == "thermal") {
        t.j_f = s.get<int>("j_f");
        t.temperature_K = s.get<double>("temperature_K");
        t.forward_cutoff = s.get<double>("forward_cutoff", t.forward_cutoff);
        if (t.temperature_K < 0.0) fail("task", "temperature_K must be non-negative");
        if (t.forward_cutoff < 0.0) fail("task", "forward_cutoff must be non-negative");
    } else {
        fail("task", "type must be orientation, delocalization or thermal");
    }
    t.post_pulse_Tper = s.get<double>("post_pulse_Tper", 0.0);
    if (t.post_pulse_Tper < 0.0) fail("task", "post_pulse_Tper must be non-negative");
    return t;
}

GaussianPulse parsePulse(const json& j, const std::string& path) {
    Section s(j, path);
    GaussianPulse p;
    p.peak_intensity_Wcm2 = s.opt<double>("peak_intensity_Wcm2");
    p.amplitude_au = s.opt<double>("amplitude_au");
    p.center_Tper = s.get<double>("center_Tper");
    p.fwhm_fs = s.get<double>("fwhm_fs");
    if (p.peak_intensity_Wcm2.has_value() == p.amplitude_au.has_value())
        fail(path, "give exactly one of peak_intensity_Wcm2 and amplitude_au");
    if (p.fwhm_fs <= 0.0) fail(path, "fwhm_fs must be positive");
    return p;
}

GuessConfig parseGuess(const json& j, int channels) {
    Section s(j, "guess");
    GuessConfig g;
    const json& arr = s.require("channels");
    if (!arr.is_array()) fail("guess", "channels must be an array");
    for (size_t c = 0; c < arr.size(); ++c) {
        if (!arr[c].is_array()) fail("guess", "each channel must be an array of pulses");
        std::vector<GaussianPulse> pulses;
        for (size_t p = 0; p < arr[c].size(); ++p)
            pulses.push_back(parsePulse(
                arr[c][p], "guess.channels[" + std::to_string(c) + "][" + std::to_string(p) + "]"));
        g.channels.push_back(std::move(pulses));
    }
    if (static_cast<int>(g.channels.size()) != channels)
        fail("guess", "channel count does not match the model (" + std::to_string(channels) +
                          " expected)");
    return g;
}

OptimizerConfig parseOptimizer(const json& j) {
    Section s(j, "optimizer");
    OptimizerConfig o;
    o.iterations = s.get<int>("iterations");
    o.stagnation_eps = s.get<double>("stagnation_eps", o.stagnation_eps);
    o.field_scale_au = s.get<double>("field_scale_au", o.field_scale_au);
    if (!(o.field_scale_au > 0.0)) fail("optimizer", "field_scale_au must be positive");
    if (s.has("runs")) {
        const json& runs = s.require("runs");
        if (!runs.is_array() || runs.empty()) fail("optimizer", "runs must be a non-empty array");
        for (size_t k = 0; k < runs.size(); ++k) {
            Section r(runs[k], "optimizer.runs[" + std::to_string(k) + "]");
            OptimizerRunConfig rc;
            rc.method = r.get<std::string>("method");
            rc.lambda = r.get<double>("lambda");
            rc.field_scale_au = r.get<double>("field_scale_au", o.field_scale_au);
            parseMethod(rc.method);
            if (!(rc.lambda > 0.0)) fail("optimizer", "lambda must be positive");
            if (!(rc.field_scale_au > 0.0)) fail("optimizer", "field_scale_au must be positive");
            o.runs.push_back(rc);
        }
        o.method = o.runs.front().method;
        o.lambda = o.runs.front().lambda;
    } else {
        o.method = s.get<std::string>("method");
        o.lambda = s.get<double>("lambda");
        parseMethod(o.method);
        if (!(o.lambda > 0.0)) fail("optimizer", "lambda must be positive");
    }
    if (o.iterations < 0) fail("optimizer", "iterations must be non-negative");
    if (!(o.stagnation_eps > 0.0)) fail("optimizer", "stagnation_eps must be positive");
    return o;
}

OutputConfig parseOutput(const json& j) {
    Section s(j, "output");
    OutputConfig o;
    o.directory = s.get<std::string>("directory", o.directory);
    o.dynamics_stride = s.get<int>("dynamics_stride", o.dynamics_stride);
    o.population_j_max = s.get<int>("population_j_max", o.population_j_max);
    if (o.dynamics_stride < 1) fail("output", "dynamics_stride must be at least 1");
    if (o.population_j_max < 0) fail("output", "population_j_max must be non-negative");
    return o;
}

} // namespace

double GaussianPulse::amplitudeAu() const {
    if (amplitude_au) return *amplitude_au;
    return units::intensity_to_field_au(*peak_intensity_Wcm2);
}

double GaussianPulse::sigmaAu() const {
    const double sigma_fs = fwhm_fs / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    return units::fs_to_au(sigma_fs);
}

std::vector<OptimizerRunConfig> RunConfig::optimizerRuns() const {
    if (!optimizer.runs.empty()) return optimizer.runs;
    return {{optimizer.method, optimizer.lambda, optimizer.field_scale_au}};
}

OptimizerKind parseMethod(const std::string& name) {
    if (name == "krotov") return OptimizerKind::Krotov;
    if (name == "lapert") return OptimizerKind::Lapert;
    throw std::runtime_error("config.optimizer: unknown method '" + name + "'");
}

RunConfig parseConfig(const nlohmann::json& j) {
    Section s(j, "<root>");
    RunConfig c;
    if (s.has("molecule")) c.molecule = parseMolecule(s.require("molecule"));
    c.basis = parseBasis(s.require("basis"));
    c.model = parseModel(s.require("model"));
    c.time_grid = parseTimeGrid(s.require("time_grid"));
    c.task = parseTask(s.require("task"));
    c.guess = parseGuess(s.require("guess"), c.modelChannels());
    c.optimizer = parseOptimizer(s.require("optimizer"));
    if (s.has("output")) c.output = parseOutput(s.require("output"));

    // cross-section consistency
    if (c.task.type == "thermal" && c.basis.fixed_m)
        fail("basis", "thermal tasks need the full basis (drop fixed_m)");
    if (c.task.type == "delocalization") {
        if (c.task.target_j > c.basis.j_max || std::abs(c.task.target_m) > c.task.target_j)
            fail("task", "delocalization target outside the basis");
        if (c.basis.fixed_m && *c.basis.fixed_m != c.task.target_m)
            fail("basis", "fixed_m does not contain the delocalization target");
    }
    if ((c.task.type == "orientation" || c.task.type == "thermal") && c.task.j_f > c.basis.j_max)
        fail("task", "j_f exceeds j_max");
    if (c.task.type == "orientation" && c.basis.fixed_m && *c.basis.fixed_m != 0)
        fail("basis", "orientation needs the m = 0 states");
    return c;
}

RunConfig parseConfigText(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    return parseConfig(j);
}

RunConfig parseConfigFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parseConfigText(buffer.str());
}

nlohmann::json toJson(const RunConfig& c) {
    json j;
    j["molecule"] = {{"B_cm1", c.molecule.B_cm1},
                     {"mu0_au", c.molecule.mu0},
                     {"alpha_par_au", c.molecule.alpha_par},
                     {"alpha_perp_au", c.molecule.alpha_perp},
                     {"beta_par_au", c.molecule.beta_par},
                     {"beta_perp_au", c.molecule.beta_perp}};
    j["basis"] = {{"j_max", c.basis.j_max}};
    if (c.basis.fixed_m) j["basis"]["fixed_m"] = *c.basis.fixed_m;
    j["model"] = {{"type", c.model.type}};
    if (c.model.type == "xy") j["model"]["phase_diff_rad"] = c.model.phase_diff_rad;
    j["time_grid"] = {{"t_final_Tper", c.time_grid.t_final_Tper},
                      {"n_steps", c.time_grid.n_steps}};
    json task = {{"type", c.task.type}, {"post_pulse_Tper", c.task.post_pulse_Tper}};
    if (c.task.type == "orientation") {
        task["j_f"] = c.task.j_f;
    } else if (c.task.type == "delocalization") {
        task["target_j"] = c.task.target_j;
        task["target_m"] = c.task.target_m;
    } else {
        task["j_f"] = c.task.j_f;
        task["temperature_K"] = c.task.temperature_K;
        task["forward_cutoff"] = c.task.forward_cutoff;
    }
    j["task"] = std::move(task);
    json channels = json::array();
    for (const auto& channel : c.guess.channels) {
        json pulses = json::array();
        for (const auto& p : channel) {
            json pulse = {{"center_Tper", p.center_Tper}, {"fwhm_fs", p.fwhm_fs}};
            if (p.peak_intensity_Wcm2) pulse["peak_intensity_Wcm2"] = *p.peak_intensity_Wcm2;
            if (p.amplitude_au) pulse["amplitude_au"] = *p.amplitude_au;
            pulses.push_back(std::move(pulse));
        }
        channels.push_back(std::move(pulses));
    }
    j["guess"] = {{"channels", std::move(channels)}};
    json opt = {{"iterations", c.optimizer.iterations},
                {"stagnation_eps", c.optimizer.stagnation_eps}};
    if (!c.optimizer.runs.empty()) {
        json runs = json::array();
        for (const auto& r : c.optimizer.runs)
            runs.push_back({{"method", r.method},
                            {"lambda", r.lambda},
                            {"field_scale_au", r.field_scale_au}});
        opt["runs"] = std::move(runs);
    } else {
        opt["method"] = c.optimizer.method;
        opt["lambda"] = c.optimizer.lambda;
        opt["field_scale_au"] = c.optimizer.field_scale_au;
    }
    j["optimizer"] = std::move(opt);
    j["output"] = {{"directory", c.output.directory},
                   {"dynamics_stride", c.output.dynamics_stride},
                   {"population_j_max", c.output.population_j_max}};
    return j;
}

} // namespace rotor
