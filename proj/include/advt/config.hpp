#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "advt/errors.hpp"
#include "json.hpp"

namespace advt {

using Json = nlohmann::json;

/// Visitor that fills fields from a JSON object. Missing keys keep their defaults;
/// keys nobody asked for are reported by finish().
class ConfigReader {
public:
    ConfigReader(const Json& object, std::string context);

    template <typename T>
    void operator()(const char* key, T& out) {
        auto it = object_.find(key);
        if (it == object_.end()) return;
        seen_.insert(key);
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(context_ + "." + key + ": " + e.what());
        }
    }

    void finish() const;

private:
    const Json& object_;
    std::string context_;
    std::set<std::string> seen_;
};

class ConfigWriter {
public:
    template <typename T>
    void operator()(const char* key, const T& value) {
        object[key] = value;
    }

    Json object = Json::object();
};

/// Params types expose `template <class V> void visit(V& v)` listing their fields.
template <typename Params>
Params read_params(const Json& object, const std::string& context, Params defaults = {}) {
    ConfigReader reader(object, context);
    defaults.visit(reader);
    reader.finish();
    return defaults;
}

template <typename Params>
Json write_params(Params params) {
    ConfigWriter writer;
    params.visit(writer);
    return writer.object;
}

Json load_json_file(const std::filesystem::path& path);

}  // namespace advt
