#pragma once

// JSON configuration: model blocks and grid specifications.

#include <json.hpp>

#include <string>
#include <vector>

#include "kerrpair/model.hpp"

namespace kerrpair {

using Json = nlohmann::json;

// Keys: alpha1 (default 1), alpha2, N, g (default 0) and exactly one of delta / mu.
// Unknown keys are rejected. Throws ConfigError.
[[nodiscard]] ModelParams model_from_json(const Json& j);
// Resolved parameters, including the derived mu as "mu_derived".
[[nodiscard]] Json model_to_json(const ModelParams& p);

enum class Spacing { linear, geometric };

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
    Spacing spacing = Spacing::linear;

    // count == 1 yields {start}.
    [[nodiscard]] std::vector<double> values() const;
};

// {"start", "stop", "count", "spacing": "linear" | "geometric"}; checks count >= 1,
// start <= stop and start > 0 for geometric grids.
[[nodiscard]] GridSpec grid_from_json(const Json& j);
[[nodiscard]] Json grid_to_json(const GridSpec& g);

// Typed field access with ConfigError messages naming the key.
[[nodiscard]] const Json& require(const Json& j, const std::string& key);
[[nodiscard]] double get_real(const Json& j, const std::string& key);
[[nodiscard]] double get_real(const Json& j, const std::string& key, double fallback);
[[nodiscard]] int get_int(const Json& j, const std::string& key);
[[nodiscard]] int get_int(const Json& j, const std::string& key, int fallback);
[[nodiscard]] bool get_bool(const Json& j, const std::string& key, bool fallback);
[[nodiscard]] std::string get_string(const Json& j, const std::string& key, const std::string& fallback);

// Rejects keys of j that are not listed.
void check_keys(const Json& j, const std::vector<std::string>& allowed, const std::string& where);

}  // namespace kerrpair
