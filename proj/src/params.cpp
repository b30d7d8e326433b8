#include "magcav/params.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "magcav/model.hpp"

namespace magcav {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void SystemParams::validate() const {
    if (!std::isfinite(omega_c) || omega_c <= 0.0)
        throw std::invalid_argument("SystemParams: omega_c must be finite and > 0");
    for (auto [v, name] : {std::pair{kappa_c, "kappa_c"}, {kappa_m, "kappa_m"},
                           {g, "g"}, {kappa_1_ex, "kappa_1_ex"}, {kappa_2_ex, "kappa_2_ex"},
                           {gamma_over_2pi, "gamma_over_2pi"}, {mu0_ms, "mu0_ms"}}) {
        if (!finite_nonneg(v))
            throw std::invalid_argument(std::string("SystemParams: ") + name +
                                        " must be finite and >= 0");
    }
    if (kappa_1_ex + kappa_2_ex > kappa_c * (1.0 + 1e-12))
        throw std::invalid_argument(
            "SystemParams: kappa_1_ex + kappa_2_ex exceeds kappa_c (external losses "
            "are part of the total)");
}

FieldPoint FieldPoint::from_field(double b0, const SystemParams& p) {
    FieldPoint f;
    f.b0 = b0;
    f.omega_m = kittel_frequency(b0, p);
    f.delta = f.omega_m - p.omega_c;
    return f;
}

FieldPoint FieldPoint::from_detuning(double delta, const SystemParams& p) {
    FieldPoint f;
    f.delta = delta;
    f.omega_m = p.omega_c + delta;
    f.b0 = f.omega_m >= 0.0 ? kittel_field(f.omega_m, p) : 0.0;
    return f;
}

void ComplexSpectrum::validate() const {
    if (frequencies.size() != values.size())
        throw std::invalid_argument("ComplexSpectrum: frequency/value length mismatch");
    for (std::size_t i = 1; i < frequencies.size(); ++i)
        if (!(frequencies[i] > frequencies[i - 1]))
            throw std::invalid_argument("ComplexSpectrum: grid must be strictly increasing");
    for (const auto& v : values)
        if (!std::isfinite(std::abs(v)))
            throw std::invalid_argument("ComplexSpectrum: non-finite value");
}

std::string to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::Purcell: return "Purcell";
        case RegimeLabel::StrongCoupling: return "StrongCoupling";
        case RegimeLabel::MagneticallyInducedTransparency:
            return "MagneticallyInducedTransparency";
        case RegimeLabel::Intermediate: return "Intermediate";
    }
    return "Intermediate";
}

std::string params_to_json(const SystemParams& p) {
    nlohmann::json j;
    j["omega_c_ghz"] = p.omega_c / 1e9;
    j["kappa_c_mhz"] = p.kappa_c / 1e6;
    j["kappa_m_mhz"] = p.kappa_m / 1e6;
    j["g_mhz"] = p.g / 1e6;
    j["kappa_1_ex_khz"] = p.kappa_1_ex / 1e3;
    j["kappa_2_ex_khz"] = p.kappa_2_ex / 1e3;
    j["gamma_ghz_per_t"] = p.gamma_over_2pi / 1e9;
    j["mu0_ms_t"] = p.mu0_ms;
    return j.dump(2);
}

SystemParams params_from_json_value(const nlohmann::json& j, const std::string& path) {
    static const std::set<std::string> known = {
        "omega_c_ghz",   "kappa_c_mhz",    "kappa_m_mhz",      "g_mhz",
        "kappa_1_ex_khz", "kappa_2_ex_khz", "gamma_ghz_per_t", "mu0_ms_t"};
    if (!j.is_object()) throw std::invalid_argument(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("unknown key: " + path + "." + it.key());
    SystemParams p;
    p.omega_c = j.at("omega_c_ghz").get<double>() * 1e9;
    p.kappa_c = j.at("kappa_c_mhz").get<double>() * 1e6;
    p.kappa_m = j.at("kappa_m_mhz").get<double>() * 1e6;
    p.g = j.at("g_mhz").get<double>() * 1e6;
    if (j.contains("kappa_1_ex_khz")) p.kappa_1_ex = j["kappa_1_ex_khz"].get<double>() * 1e3;
    if (j.contains("kappa_2_ex_khz")) p.kappa_2_ex = j["kappa_2_ex_khz"].get<double>() * 1e3;
    if (j.contains("gamma_ghz_per_t")) p.gamma_over_2pi = j["gamma_ghz_per_t"].get<double>() * 1e9;
    if (j.contains("mu0_ms_t")) p.mu0_ms = j["mu0_ms_t"].get<double>();
    p.validate();
    return p;
}

SystemParams params_from_json(const std::string& text) {
    return params_from_json_value(nlohmann::json::parse(text), "params");
}

}  // namespace magcav
