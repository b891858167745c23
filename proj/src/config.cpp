#include "kerrpair/config.hpp"

#include <algorithm>
#include <cmath>

#include "kerrpair/errors.hpp"

namespace kerrpair {

const Json& require(const Json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError("missing required key '" + key + "'");
    return j.at(key);
}

double get_real(const Json& j, const std::string& key) {
    const Json& v = require(j, key);
    if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("key '" + key + "' must be finite");
    return d;
}

double get_real(const Json& j, const std::string& key, double fallback) {
    return j.contains(key) ? get_real(j, key) : fallback;
}

int get_int(const Json& j, const std::string& key) {
    const Json& v = require(j, key);
    if (!v.is_number_integer()) throw ConfigError("key '" + key + "' must be an integer");
    return v.get<int>();
}

int get_int(const Json& j, const std::string& key, int fallback) {
    return j.contains(key) ? get_int(j, key) : fallback;
}

bool get_bool(const Json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) throw ConfigError("key '" + key + "' must be true or false");
    return j.at(key).get<bool>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw ConfigError("key '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

void check_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

ModelParams model_from_json(const Json& j) {
    check_keys(j, {"alpha1", "alpha2", "delta", "mu", "g", "N"}, "model");
    const bool has_delta = j.contains("delta");
    const bool has_mu = j.contains("mu");
    if (has_delta && has_mu) throw ConfigError("model: 'delta' and 'mu' are mutually exclusive");
    if (!has_delta && !has_mu) throw ConfigError("model: one of 'delta' or 'mu' is required");
    const double a1 = get_real(j, "alpha1", 1.0);
    const double a2 = get_real(j, "alpha2");
    const int big_n = get_int(j, "N");
    const double g = get_real(j, "g", 0.0);
    if (big_n < 0) throw ConfigError("model: N must be >= 0");
    if (!(a1 + a2 > 0.0)) throw ConfigError("model: alpha1 + alpha2 must be > 0");
    if (a2 < 0.0 || !(a1 > 0.0)) throw ConfigError("model: need alpha1 > 0 and alpha2 >= 0");
    if (g < 0.0) throw ConfigError("model: g must be >= 0");
    return has_mu ? ModelParams::from_mu(get_real(j, "mu"), big_n, a1, a2, g)
                  : ModelParams::from_delta(get_real(j, "delta"), big_n, a1, a2, g);
}

Json model_to_json(const ModelParams& p) {
    return Json{{"alpha1", p.alpha1}, {"alpha2", p.alpha2}, {"delta", p.delta()},
                {"g", p.g},           {"N", p.big_n},       {"mu_derived", derived_mu(p)}};
}

std::vector<double> GridSpec::values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    if (count == 1) {
        v[0] = start;
        return v;
    }
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        v[static_cast<std::size_t>(i)] =
            spacing == Spacing::linear ? start + (stop - start) * f : start * std::pow(stop / start, f);
    }
    v.back() = stop;
    return v;
}

GridSpec grid_from_json(const Json& j) {
    check_keys(j, {"start", "stop", "count", "spacing"}, "grid");
    GridSpec g;
    g.start = get_real(j, "start");
    g.stop = get_real(j, "stop", g.start);
    g.count = get_int(j, "count");
    const std::string sp = get_string(j, "spacing", "linear");
    if (sp == "linear") {
        g.spacing = Spacing::linear;
    } else if (sp == "geometric") {
        g.spacing = Spacing::geometric;
    } else {
        throw ConfigError("grid spacing must be 'linear' or 'geometric'");
    }
    if (g.count < 1) throw ConfigError("grid count must be >= 1");
    if (g.start > g.stop) throw ConfigError("grid start must be <= stop");
    if (g.count > 1 && g.start == g.stop) throw ConfigError("grid with count > 1 needs start < stop");
    if (g.spacing == Spacing::geometric && !(g.start > 0.0)) {
        throw ConfigError("geometric grid needs start > 0");
    }
    return g;
}

Json grid_to_json(const GridSpec& g) {
    return Json{{"start", g.start},
                {"stop", g.stop},
                {"count", g.count},
                {"spacing", g.spacing == Spacing::linear ? "linear" : "geometric"}};
}

}  // namespace kerrpair
