#include "magcav/sweep.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "magcav/model.hpp"

namespace magcav {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> known) {
    if (!j.is_object()) throw std::invalid_argument(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw std::invalid_argument("unknown key: " + path + "." + it.key());
    }
}

json config_to_json_value(const RunConfig& c) {
    json j;
    j["params"] = json::parse(params_to_json(c.params));
    if (c.sweep) {
        j["sweep"] = {{"b_min_mt", c.sweep->b_min * 1e3},
                      {"b_max_mt", c.sweep->b_max * 1e3},
                      {"b_points", c.sweep->b_points},
                      {"freq_center_ghz", c.sweep->freq_center / 1e9},
                      {"freq_span_mhz", c.sweep->freq_span / 1e6},
                      {"freq_points", c.sweep->freq_points}};
    }
    if (c.noise.relative_amplitude > 0.0 || c.noise.seed_set) {
        j["noise"] = {{"relative_amplitude", c.noise.relative_amplitude}};
        if (c.noise.seed_set) j["noise"]["seed"] = c.noise.seed;
    }
    if (c.ringdown) {
        j["ringdown"] = {{"t_max_ns", c.ringdown->t_max * 1e9},
                         {"dt_ns", c.ringdown->dt * 1e9},
                         {"scale", c.ringdown->scale},
                         {"offset", c.ringdown->offset},
                         {"b0_mt", c.ringdown->b0 * 1e3}};
    }
    if (!c.eigen.kappa_m_list.empty() || c.eigen.b_points != 2001) {
        json lst = json::array();
        for (double k : c.eigen.kappa_m_list) lst.push_back(k / 1e6);
        j["eigen"] = {{"kappa_m_list_mhz", lst}, {"b_points", c.eigen.b_points}};
    }
    j["extraction"] = {{"residual_cap", c.extraction.residual_cap},
                       {"bias_correction", c.extraction.bias_correction},
                       {"asymptote_window", c.extraction.asymptote_window}};
    return j;
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    reject_unknown(j, "config",
                   {"params", "sweep", "noise", "ringdown", "eigen", "extraction"});
    if (!j.contains("params"))
        throw std::invalid_argument("config: missing required block 'params'");
    RunConfig c;
    c.params = params_from_json(j["params"].dump());

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        reject_unknown(s, "config.sweep",
                       {"b_min_mt", "b_max_mt", "b_points", "freq_center_ghz",
                        "freq_span_mhz", "freq_points"});
        SweepConfig sc;
        sc.b_min = s.at("b_min_mt").get<double>() * 1e-3;
        sc.b_max = s.at("b_max_mt").get<double>() * 1e-3;
        sc.b_points = s.at("b_points").get<int>();
        if (s.contains("freq_center_ghz"))
            sc.freq_center = s["freq_center_ghz"].get<double>() * 1e9;
        sc.freq_span = s.at("freq_span_mhz").get<double>() * 1e6;
        sc.freq_points = s.at("freq_points").get<int>();
        if (!(sc.b_max > sc.b_min) || sc.b_points < 2)
            throw std::invalid_argument("config.sweep: need b_max > b_min, b_points >= 2");
        if (!(sc.freq_span > 0.0) || sc.freq_points < 7)
            throw std::invalid_argument(
                "config.sweep: need freq_span > 0, freq_points >= 7");
        c.sweep = sc;
    }
    if (j.contains("noise")) {
        const json& nz = j["noise"];
        reject_unknown(nz, "config.noise", {"relative_amplitude", "seed"});
        c.noise.relative_amplitude = nz.at("relative_amplitude").get<double>();
        if (c.noise.relative_amplitude < 0.0)
            throw std::invalid_argument("config.noise: relative_amplitude must be >= 0");
        if (nz.contains("seed")) {
            c.noise.seed = nz["seed"].get<std::uint64_t>();
            c.noise.seed_set = true;
        }
        if (c.noise.relative_amplitude > 0.0 && !c.noise.seed_set)
            throw std::invalid_argument(
                "config.noise: a seed is required when relative_amplitude > 0 "
                "(reproducibility)");
    }
    if (j.contains("ringdown")) {
        const json& r = j["ringdown"];
        reject_unknown(r, "config.ringdown", {"t_max_ns", "dt_ns", "scale", "offset", "b0_mt"});
        RingdownConfig rc;
        if (r.contains("t_max_ns")) rc.t_max = r["t_max_ns"].get<double>() * 1e-9;
        if (r.contains("dt_ns")) rc.dt = r["dt_ns"].get<double>() * 1e-9;
        if (r.contains("scale")) rc.scale = r["scale"].get<double>();
        if (r.contains("offset")) rc.offset = r["offset"].get<double>();
        rc.b0 = r.at("b0_mt").get<double>() * 1e-3;
        if (!(rc.t_max > 0.0) || !(rc.dt > 0.0) || !(rc.scale > 0.0))
            throw std::invalid_argument("config.ringdown: need t_max, dt, scale > 0");
        c.ringdown = rc;
    }
    if (j.contains("eigen")) {
        const json& e = j["eigen"];
        reject_unknown(e, "config.eigen", {"kappa_m_list_mhz", "b_points"});
        if (e.contains("kappa_m_list_mhz"))
            for (const auto& v : e["kappa_m_list_mhz"])
                c.eigen.kappa_m_list.push_back(v.get<double>() * 1e6);
        if (e.contains("b_points")) c.eigen.b_points = e["b_points"].get<int>();
        if (c.eigen.b_points < 2)
            throw std::invalid_argument("config.eigen: b_points must be >= 2");
    }
    if (j.contains("extraction")) {
        const json& x = j["extraction"];
        reject_unknown(x, "config.extraction",
                       {"residual_cap", "bias_correction", "asymptote_window"});
        if (x.contains("residual_cap"))
            c.extraction.residual_cap = x["residual_cap"].get<double>();
        if (x.contains("bias_correction"))
            c.extraction.bias_correction = x["bias_correction"].get<bool>();
        if (x.contains("asymptote_window"))
            c.extraction.asymptote_window = x["asymptote_window"].get<double>();
    }
    return c;
}

RunConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

std::string config_to_json(const RunConfig& config) {
    return config_to_json_value(config).dump(2);
}

std::string config_hash(const RunConfig& config) {
    // FNV-1a over the canonical (sorted-key, compact) dump.
    const std::string canon = config_to_json_value(config).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << h;
    return os.str();
}

GeneratedSweep generate_sweep(const RunConfig& config) {
    if (!config.sweep)
        throw std::invalid_argument("generate_sweep: config has no sweep block");
    const SweepConfig& sc = *config.sweep;
    const SystemParams& p = config.params;

    const double f0 = sc.freq_center > 0.0 ? sc.freq_center : p.omega_c;
    std::vector<double> freqs(static_cast<std::size_t>(sc.freq_points));
    for (int i = 0; i < sc.freq_points; ++i)
        freqs[static_cast<std::size_t>(i)] =
            f0 - sc.freq_span / 2.0 + sc.freq_span * i / (sc.freq_points - 1);

    std::mt19937_64 rng(config.noise.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double sigma = config.noise.relative_amplitude;

    GeneratedSweep out;
    for (int ib = 0; ib < sc.b_points; ++ib) {
        const double b = sc.b_min + (sc.b_max - sc.b_min) * ib / (sc.b_points - 1);
        const FieldPoint fp = FieldPoint::from_field(b, p);
        ComplexSpectrum sp21, sp22;
        sp21.frequencies = sp22.frequencies = freqs;
        sp21.kind = SpectrumKind::S21;
        sp22.kind = SpectrumKind::S22;
        PowerSpectrum pw;
        pw.b0 = b;
        pw.frequencies = freqs;
        for (double f : freqs) {
            const auto v21 = s21(f, fp, p);
            sp21.values.push_back(v21);
            sp22.values.push_back(s22(f, fp, p));
            double power = std::norm(v21);
            if (sigma > 0.0) power *= std::max(0.0, 1.0 + sigma * gauss(rng));
            pw.power.push_back(power);
        }
        out.fields.push_back(b);
        out.s21_spectra.push_back(std::move(sp21));
        out.s22_spectra.push_back(std::move(sp22));
        out.power.push_back(std::move(pw));
    }
    return out;
}

std::string sweep_to_csv(const GeneratedSweep& sweep) {
    std::ostringstream os;
    os << "B_mT,freq_GHz,power_linear\n";
    os << std::setprecision(12);
    for (std::size_t i = 0; i < sweep.power.size(); ++i) {
        const PowerSpectrum& pw = sweep.power[i];
        for (std::size_t k = 0; k < pw.frequencies.size(); ++k)
            os << pw.b0 * 1e3 << ',' << pw.frequencies[k] / 1e9 << ',' << pw.power[k]
               << '\n';
    }
    return os.str();
}

void write_sweep_csv(const GeneratedSweep& sweep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << sweep_to_csv(sweep);
    if (!out) throw std::runtime_error("write failed: " + path);
}

DisplayMatrix background_subtract(const GeneratedSweep& sweep, double reference_b,
                                  const RunConfig& config) {
    if (sweep.fields.empty()) throw std::invalid_argument("background_subtract: empty sweep");
    std::size_t ref = 0;
    double best = std::abs(sweep.fields[0] - reference_b);
    for (std::size_t i = 1; i < sweep.fields.size(); ++i) {
        const double d = std::abs(sweep.fields[i] - reference_b);
        if (d < best) {
            best = d;
            ref = i;
        }
    }
    const FieldPoint ref_fp = FieldPoint::from_field(sweep.fields[ref], config.params);

    DisplayMatrix m;
    m.fields = sweep.fields;
    m.frequencies = sweep.s22_spectra[ref].frequencies;
    m.reference_near_resonance = std::abs(ref_fp.delta) < 5.0 * config.params.kappa_m;
    std::vector<double> ref_col;
    for (const auto& v : sweep.s22_spectra[ref].values) ref_col.push_back(std::abs(v));
    for (const auto& spec : sweep.s22_spectra) {
        std::vector<double> col;
        col.reserve(spec.values.size());
        for (std::size_t k = 0; k < spec.values.size(); ++k)
            col.push_back(std::abs(spec.values[k]) - ref_col[k]);
        m.values.push_back(std::move(col));
    }
    return m;
}

std::string envelope_to_json(const ResultEnvelope& e) {
    json j;
    j["task"] = e.task;
    j["config_hash"] = e.config_hash;
    j["version"] = e.version;
    j["timestamp"] = e.timestamp;
    j["payload"] = json::parse(e.payload);
    j["files"] = e.files;
    return j.dump(2);
}

ResultEnvelope envelope_from_json(const std::string& text) {
    json j = json::parse(text);
    ResultEnvelope e;
    e.task = j.at("task").get<std::string>();
    e.config_hash = j.at("config_hash").get<std::string>();
    e.version = j.at("version").get<std::string>();
    e.timestamp = j.at("timestamp").get<std::string>();
    e.payload = j.at("payload").dump();
    if (j.contains("files")) e.files = j["files"].get<std::vector<std::string>>();
    return e;
}

ResultEnvelope make_envelope(const std::string& task, const RunConfig& config,
                             const std::string& payload_json,
                             const std::vector<std::string>& files) {
    ResultEnvelope e;
    e.task = task;
    e.config_hash = config_hash(config);
    e.version = toolkit_version;
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    e.timestamp = os.str();
    e.payload = payload_json;
    e.files = files;
    return e;
}

}  // namespace magcav
