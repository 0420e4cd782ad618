#include "rageval/templates.hpp"

#include <string>

#include "rageval/error.hpp"

namespace rageval::templates {

std::string_view get(std::string_view name) {
    for (const auto& asset : detail::embedded_assets()) {
        if (asset.name == name) {
            return asset.body;
        }
    }
    throw ConfigError("unknown template asset '" + std::string(name) + "'");
}

std::vector<std::string_view> names() {
    std::vector<std::string_view> out;
    for (const auto& asset : detail::embedded_assets()) {
        out.push_back(asset.name);
    }
    return out;
}

}  // namespace rageval::templates
