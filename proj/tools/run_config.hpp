#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace curvosc_cli {

/// One invocation's worth of settings. A JSON config file (--config) may
/// pre-fill any field; explicit flags override file values. The
/// serialized form uses a fixed key order so serialize/parse round-trips
/// byte-identically.
struct RunConfig {
    std::string command;  // classify | simulate | spectrum | wavefunction | verify

    // model
    double lambda = 0.0;
    double alpha = 0.0;
    double k = 0.0;

    // classical sector
    double J = 0.0;
    std::optional<double> E;
    std::optional<double> C;
    double phi0 = 0.0;
    double K = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    int samples = 1000;

    // quantum sector
    int m = 0;
    int nr = 0;
    int max_m = 2;
    int max_nr = 2;
    int grid_points = 2000;

    // verification hook: shifts the energy used by the residual check
    double perturb_energy = 0.0;

    std::string format = "csv";  // csv | json
    std::string out;             // empty = stdout
};

inline nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["command"] = c.command;
    j["lambda"] = c.lambda;
    j["alpha"] = c.alpha;
    j["k"] = c.k;
    j["J"] = c.J;
    if (c.E) j["E"] = *c.E;
    if (c.C) j["C"] = *c.C;
    j["phi0"] = c.phi0;
    j["K"] = c.K;
    j["t_start"] = c.t_start;
    j["t_end"] = c.t_end;
    j["samples"] = c.samples;
    j["m"] = c.m;
    j["nr"] = c.nr;
    j["max_m"] = c.max_m;
    j["max_nr"] = c.max_nr;
    j["grid_points"] = c.grid_points;
    j["perturb_energy"] = c.perturb_energy;
    j["format"] = c.format;
    j["out"] = c.out;
    return j;
}

inline RunConfig config_from_json(const nlohmann::ordered_json& j) {
    RunConfig c;
    auto get = [&j](const char* key, auto& into) {
        if (j.contains(key)) into = j.at(key).get<std::decay_t<decltype(into)>>();
    };
    get("command", c.command);
    get("lambda", c.lambda);
    get("alpha", c.alpha);
    get("k", c.k);
    get("J", c.J);
    if (j.contains("E")) c.E = j.at("E").get<double>();
    if (j.contains("C")) c.C = j.at("C").get<double>();
    get("phi0", c.phi0);
    get("K", c.K);
    get("t_start", c.t_start);
    get("t_end", c.t_end);
    get("samples", c.samples);
    get("m", c.m);
    get("nr", c.nr);
    get("max_m", c.max_m);
    get("max_nr", c.max_nr);
    get("grid_points", c.grid_points);
    get("perturb_energy", c.perturb_energy);
    get("format", c.format);
    get("out", c.out);
    return c;
}

inline std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

inline RunConfig parse_config(const std::string& text) {
    return config_from_json(nlohmann::ordered_json::parse(text));
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

}  // namespace curvosc_cli
