#include "nlhomog/config.hpp"

#include <fstream>
#include <set>

#include "nlhomog/errors.hpp"
#include "nlhomog/perturbation.hpp"

namespace nlhomog {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown field '" + it.key() + "'");
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    if (!obj[key].is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback) {
    return obj.contains(key) ? obj[key].get<double>() : fallback;
}

Point get_point(const json& obj, const std::string& key, int dim, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_array() ||
        static_cast<int>(obj[key].size()) != dim)
        throw ConfigError(where + ": field '" + key + "' must be an array of length " +
                          std::to_string(dim));
    Point p{};
    for (int i = 0; i < dim; ++i) p[i] = obj[key][i].get<double>();
    return p;
}

std::shared_ptr<const PerturbationSpec> parse_perturbation(const json& obj, int dim,
                                                           const KernelSpec& base,
                                                           std::uint64_t seed) {
    reject_unknown(obj, {"type", "ell", "sigma", "scale"}, "perturbation");
    if (!obj.contains("type")) throw ConfigError("perturbation: missing 'type'");
    std::string type = obj["type"].get<std::string>();
    Point ell = get_point(obj, "ell", dim, "perturbation");
    if (type == "cutoff")
        return std::make_shared<const PerturbationSpec>(
            PerturbationSpec::cutoff_family(base, ell, seed));
    if (type == "odd_gaussian")
        return std::make_shared<const PerturbationSpec>(PerturbationSpec::odd_gaussian(
            dim, get_number(obj, "sigma", "perturbation"),
            get_number(obj, "scale", "perturbation"), ell));
    throw ConfigError("perturbation: unknown type '" + type + "'");
}

std::shared_ptr<const KernelSpec> parse_kernel(const json& obj, int dim, std::uint64_t seed) {
    reject_unknown(obj, {"family", "sigma", "shift", "covariance", "radius", "base",
                         "perturbation"},
                   "kernel");
    if (!obj.contains("family")) throw ConfigError("kernel: missing 'family'");
    KernelFamily family = kernel_family_from_string(obj["family"].get<std::string>());
    switch (family) {
        case KernelFamily::gaussian:
            return std::make_shared<const KernelSpec>(
                KernelSpec::gaussian(dim, get_number(obj, "sigma", "kernel")));
        case KernelFamily::shifted_gaussian:
            return std::make_shared<const KernelSpec>(KernelSpec::shifted_gaussian(
                dim, get_number(obj, "sigma", "kernel"),
                get_point(obj, "shift", dim, "kernel")));
        case KernelFamily::anisotropic_gaussian: {
            if (!obj.contains("covariance") || !obj["covariance"].is_array())
                throw ConfigError("kernel: anisotropic_gaussian needs 'covariance'");
            DMat cov{};
            const auto& c = obj["covariance"];
            if (dim == 1) {
                if (c.size() != 1) throw ConfigError("kernel: covariance must be [s11] in 1d");
                cov[0][0] = c[0].get<double>();
            } else {
                if (c.size() != 3)
                    throw ConfigError("kernel: covariance must be [s11, s12, s22] in 2d");
                cov[0][0] = c[0].get<double>();
                cov[0][1] = cov[1][0] = c[1].get<double>();
                cov[1][1] = c[2].get<double>();
            }
            return std::make_shared<const KernelSpec>(
                KernelSpec::anisotropic_gaussian(dim, cov));
        }
        case KernelFamily::compact_bump:
            return std::make_shared<const KernelSpec>(
                KernelSpec::compact_bump(dim, get_number(obj, "radius", "kernel")));
        case KernelFamily::composite_biased: {
            if (!obj.contains("base")) throw ConfigError("kernel: composite needs 'base'");
            if (!obj.contains("perturbation"))
                throw ConfigError("kernel: composite needs 'perturbation'");
            auto base = parse_kernel(obj["base"], dim, seed);
            auto pert = parse_perturbation(obj["perturbation"], dim, *base, seed);
            return std::make_shared<const KernelSpec>(
                KernelSpec::composite_biased(*base, pert, seed));
        }
    }
    throw ConfigError("kernel: unknown family");
}

std::shared_ptr<const CoefficientSpec> parse_mu(const json& obj, int dim) {
    reject_unknown(obj, {"family", "value", "p", "q", "amplitude", "scale", "values", "n"},
                   "mu");
    if (!obj.contains("family")) throw ConfigError("mu: missing 'family'");
    MuFamily family = mu_family_from_string(obj["family"].get<std::string>());
    switch (family) {
        case MuFamily::constant:
            return std::make_shared<const CoefficientSpec>(
                CoefficientSpec::constant(dim, get_number(obj, "value", "mu")));
        case MuFamily::separable:
            return std::make_shared<const CoefficientSpec>(CoefficientSpec::separable(
                dim, get_number(obj, "p", "mu"), get_number(obj, "q", "mu")));
        case MuFamily::trig_product:
            return std::make_shared<const CoefficientSpec>(CoefficientSpec::trig_product(
                dim, get_number(obj, "amplitude", "mu"), get_number_or(obj, "scale", 1.0)));
        case MuFamily::tabulated: {
            if (dim != 1) throw ConfigError("mu: tabulated family supports d = 1 only");
            if (!obj.contains("values") || !obj["values"].is_array())
                throw ConfigError("mu: tabulated needs 'values'");
            int n = static_cast<int>(get_number(obj, "n", "mu"));
            std::vector<double> vals;
            for (const auto& v : obj["values"]) vals.push_back(v.get<double>());
            return std::make_shared<const CoefficientSpec>(
                CoefficientSpec::tabulated(std::move(vals), n));
        }
    }
    throw ConfigError("mu: unknown family");
}

json kernel_manifest(const json& in) { return in; }

}  // namespace

RunConfig parse_config(const json& doc) {
    reject_unknown(doc, {"study", "seed", "output_dir", "grid", "kernel", "mu",
                         "tolerances", "evolution", "einstein"},
                   "config");
    RunConfig cfg;
    if (doc.contains("study")) cfg.study = doc["study"].get<std::string>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();

    if (!doc.contains("grid")) throw ConfigError("config: missing 'grid'");
    reject_unknown(doc["grid"], {"d", "n"}, "grid");
    cfg.dim = static_cast<int>(get_number(doc["grid"], "d", "grid"));
    cfg.grid_n = static_cast<int>(get_number(doc["grid"], "n", "grid"));
    if (cfg.dim < 1 || cfg.dim > kMaxDim) throw ConfigError("grid: d must be 1 or 2");
    if (cfg.grid_n < 4) throw ConfigError("grid: n must be >= 4");

    if (!doc.contains("kernel")) throw ConfigError("config: missing 'kernel'");
    cfg.kernel = parse_kernel(doc["kernel"], cfg.dim, cfg.seed);
    if (!doc.contains("mu")) throw ConfigError("config: missing 'mu'");
    cfg.mu = parse_mu(doc["mu"], cfg.dim);

    if (doc.contains("tolerances")) {
        const auto& t = doc["tolerances"];
        reject_unknown(t, {"ground_state", "corrector", "solvability", "periodization"},
                       "tolerances");
        cfg.tolerances.ground_state = get_number_or(t, "ground_state", 1e-12);
        cfg.tolerances.corrector = get_number_or(t, "corrector", 1e-10);
        cfg.tolerances.solvability = get_number_or(t, "solvability", 1e-10);
        cfg.tolerances.periodization = get_number_or(t, "periodization", 1e-13);
        for (double v : {cfg.tolerances.ground_state, cfg.tolerances.corrector,
                         cfg.tolerances.solvability, cfg.tolerances.periodization})
            if (!(v > 0.0)) throw ConfigError("tolerances: all tolerances must be positive");
    }

    if (doc.contains("evolution")) {
        const auto& e = doc["evolution"];
        reject_unknown(e, {"inv_epsilons", "horizon", "cells_resolution", "initial_datum",
                           "dt_safety"},
                       "evolution");
        if (e.contains("inv_epsilons")) {
            cfg.inv_epsilons.clear();
            for (const auto& v : e["inv_epsilons"]) {
                int m = v.get<int>();
                if (m < 1) throw ConfigError("evolution: inv_epsilons must be positive integers");
                cfg.inv_epsilons.push_back(m);
            }
        }
        cfg.evolution.horizon = get_number_or(e, "horizon", cfg.evolution.horizon);
        if (e.contains("cells_resolution"))
            cfg.evolution.cells_resolution = e["cells_resolution"].get<int>();
        cfg.evolution.dt_safety = get_number_or(e, "dt_safety", cfg.evolution.dt_safety);
        if (!(cfg.evolution.dt_safety > 0.0 && cfg.evolution.dt_safety <= 1.0))
            throw ConfigError("evolution: dt_safety must be in (0, 1]");
        if (e.contains("initial_datum")) {
            const auto& d0 = e["initial_datum"];
            reject_unknown(d0, {"type", "k", "width"}, "initial_datum");
            std::string type = d0.contains("type") ? d0["type"].get<std::string>() : "";
            if (type == "harmonic") {
                cfg.evolution.datum = InitialDatumKind::harmonic;
                if (d0.contains("k")) {
                    if (!d0["k"].is_array() || static_cast<int>(d0["k"].size()) != cfg.dim)
                        throw ConfigError("initial_datum: 'k' must have length d");
                    for (int i = 0; i < cfg.dim; ++i)
                        cfg.evolution.harmonic_k[i] = d0["k"][i].get<int>();
                }
            } else if (type == "gaussian_bump") {
                cfg.evolution.datum = InitialDatumKind::gaussian_bump;
                cfg.evolution.bump_width = get_number_or(d0, "width", cfg.evolution.bump_width);
            } else {
                throw ConfigError("initial_datum: unknown type '" + type + "'");
            }
        }
    }

    if (doc.contains("einstein")) {
        const auto& n = doc["einstein"];
        reject_unknown(n, {"fd_steps"}, "einstein");
        if (n.contains("fd_steps")) {
            cfg.fd_steps.clear();
            for (const auto& v : n["fd_steps"]) {
                double h = v.get<double>();
                if (!(h > 0.0)) throw ConfigError("einstein: fd_steps must be positive");
                cfg.fd_steps.push_back(h);
            }
            if (cfg.fd_steps.size() < 2)
                throw ConfigError("einstein: need at least two fd_steps");
        }
    }

    // manifest with every default resolved
    json resolved;
    resolved["study"] = cfg.study;
    resolved["seed"] = cfg.seed;
    resolved["output_dir"] = cfg.output_dir;
    resolved["grid"] = {{"d", cfg.dim}, {"n", cfg.grid_n}};
    resolved["kernel"] = kernel_manifest(doc["kernel"]);
    resolved["mu"] = doc["mu"];
    resolved["tolerances"] = {{"ground_state", cfg.tolerances.ground_state},
                              {"corrector", cfg.tolerances.corrector},
                              {"solvability", cfg.tolerances.solvability},
                              {"periodization", cfg.tolerances.periodization}};
    resolved["evolution"] = {
        {"inv_epsilons", cfg.inv_epsilons},
        {"horizon", cfg.evolution.horizon},
        {"cells_resolution", cfg.evolution.cells_resolution},
        {"dt_safety", cfg.evolution.dt_safety},
        {"snapshots", cfg.evolution.snapshots},
        {"initial_datum",
         cfg.evolution.datum == InitialDatumKind::harmonic
             ? json{{"type", "harmonic"},
                    {"k", std::vector<int>(cfg.evolution.harmonic_k.begin(),
                                           cfg.evolution.harmonic_k.begin() + cfg.dim)}}
             : json{{"type", "gaussian_bump"}, {"width", cfg.evolution.bump_width}}}};
    resolved["einstein"] = {{"fd_steps", cfg.fd_steps}};
    cfg.resolved = std::move(resolved);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace nlhomog
