#include "bootlab/config.hpp"

#include "bootlab/error.hpp"
#include "bootlab/report.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace bootlab {

namespace {

nlohmann::json scalar_to_json(const YAML::Node& node) {
    const std::string& raw = node.Scalar();
    if (node.Tag() == "!") {  // quoted
        return raw;
    }
    if (raw == "null" || raw == "~" || raw.empty()) {
        return nullptr;
    }
    if (raw == "true" || raw == "True") {
        return true;
    }
    if (raw == "false" || raw == "False") {
        return false;
    }
    std::int64_t i = 0;
    if (YAML::convert<std::int64_t>::decode(node, i)) {
        return i;
    }
    std::uint64_t u = 0;
    if (YAML::convert<std::uint64_t>::decode(node, u)) {
        return u;
    }
    double d = 0.0;
    if (YAML::convert<double>::decode(node, d)) {
        return d;
    }
    return raw;
}

nlohmann::json node_to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined:
            return nullptr;
        case YAML::NodeType::Scalar:
            return scalar_to_json(node);
        case YAML::NodeType::Sequence: {
            auto arr = nlohmann::json::array();
            for (const auto& item : node) {
                arr.push_back(node_to_json(item));
            }
            return arr;
        }
        case YAML::NodeType::Map: {
            auto obj = nlohmann::json::object();
            for (const auto& kv : node) {
                obj[kv.first.as<std::string>()] = node_to_json(kv.second);
            }
            return obj;
        }
    }
    return nullptr;
}

bool compatible(const nlohmann::json& def, const nlohmann::json& user) {
    if (def.is_number_integer()) {
        if (user.is_number_integer()) {
            return true;
        }
        return user.is_number_float() && std::floor(user.get<double>()) == user.get<double>();
    }
    if (def.is_number()) {
        return user.is_number();
    }
    if (def.is_array()) {
        return user.is_array() || user.is_number() || user.is_string();
    }
    return def.type() == user.type();
}

}  // namespace

nlohmann::json yaml_to_json(const std::string& text) {
    try {
        return node_to_json(YAML::Load(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

nlohmann::json load_config_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return yaml_to_json(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

nlohmann::json merge_settings(const nlohmann::json& defaults, const nlohmann::json& user, const std::string& where) {
    if (user.is_null()) {
        return defaults;
    }
    if (!user.is_object()) {
        throw ConfigError(where + ": expected a mapping");
    }
    nlohmann::json out = defaults;
    for (const auto& [key, value] : user.items()) {
        if (!defaults.contains(key)) {
            std::string allowed;
            for (const auto& [k, v] : defaults.items()) {
                allowed += (allowed.empty() ? "" : ", ") + k;
            }
            throw ConfigError(where + ": unknown key '" + key + "' (allowed: " + allowed + ")");
        }
        const auto& def = defaults.at(key);
        if (def.is_object()) {
            out[key] = merge_settings(def, value, where + "." + key);
        } else if (def.is_null()) {
            out[key] = value;
        } else if (!compatible(def, value)) {
            throw ConfigError(where + ": key '" + key + "' has the wrong type");
        } else if (def.is_array() && !value.is_array()) {
            out[key] = nlohmann::json::array({value});
        } else if (def.is_number_integer() && value.is_number_float()) {
            out[key] = static_cast<std::int64_t>(value.get<double>());
        } else {
            out[key] = value;
        }
    }
    return out;
}

const nlohmann::json& ExperimentConfig::at(const std::string& key) const {
    if (!settings.contains(key)) {
        throw ConfigError(experiment + ": missing setting '" + key + "'");
    }
    return settings.at(key);
}

double ExperimentConfig::real(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) {
        throw ConfigError(experiment + ": '" + key + "' must be a number");
    }
    return v.get<double>();
}

std::size_t ExperimentConfig::count(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(experiment + ": '" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::string ExperimentConfig::text(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) {
        throw ConfigError(experiment + ": '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

bool ExperimentConfig::flag(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_boolean()) {
        throw ConfigError(experiment + ": '" + key + "' must be true or false");
    }
    return v.get<bool>();
}

std::vector<std::size_t> ExperimentConfig::counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& v : at(key)) {
        if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
            throw ConfigError(experiment + ": '" + key + "' must list positive integers");
        }
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

std::vector<double> ExperimentConfig::reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& v : at(key)) {
        if (!v.is_number()) {
            throw ConfigError(experiment + ": '" + key + "' must list numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

std::uint64_t ExperimentConfig::seed() const {
    const auto& v = at("seed");
    if (!v.is_number_integer()) {
        throw ConfigError(experiment + ": 'seed' must be an unsigned integer");
    }
    return v.get<std::uint64_t>();
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(experiment + "\n" + settings.dump()); }

}  // namespace bootlab
