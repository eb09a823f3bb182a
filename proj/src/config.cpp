#include "advt/config.hpp"

#include <fstream>

namespace advt {

ConfigReader::ConfigReader(const Json& object, std::string context)
    : object_(object), context_(std::move(context)) {
    if (!object_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
}

void ConfigReader::finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
        if (!seen_.contains(it.key())) throw ConfigError(context_ + "." + it.key() + ": unknown key");
    }
}

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace advt
