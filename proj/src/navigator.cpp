#include "groupkb/navigator.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "groupkb/error.hpp"

namespace groupkb {

using Json = nlohmann::json;

namespace {

struct Rgb {
    int r, g, b;
};

Rgb to_rgb(std::string_view hex) {
    return {std::stoi(std::string(hex.substr(1, 2)), nullptr, 16),
            std::stoi(std::string(hex.substr(3, 2)), nullptr, 16),
            std::stoi(std::string(hex.substr(5, 2)), nullptr, 16)};
}

std::string to_hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
    return buf;
}

int lerp(int a, int b, double t) { return static_cast<int>(std::lround(a + (b - a) * t)); }

std::string tier_label(std::size_t count, std::size_t n) {
    std::string s = "Used by " + std::to_string(count) + " of " + std::to_string(n) + " group";
    if (n != 1) s += "s";
    return s;
}

const Json& field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string("layer is missing \"") + key + "\"");
    return *it;
}

}  // namespace

bool is_hex_color(std::string_view s) noexcept {
    if (s.size() != 7 || s[0] != '#') return false;
    for (std::size_t i = 1; i < 7; ++i)
        if (!std::isxdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

Palette default_palette(std::size_t n_groups) {
    Palette p;
    if (n_groups == 3) {
        p = {{1, std::string(kLightRed)}, {2, std::string(kRed)}, {3, std::string(kDarkRed)}};
        return p;
    }
    const Rgb light = to_rgb(kLightRed), dark = to_rgb(kDarkRed);
    for (std::size_t k = 1; k <= n_groups; ++k) {
        const double t = n_groups == 1 ? 1.0 : static_cast<double>(k - 1) / static_cast<double>(n_groups - 1);
        p[k] = to_hex({lerp(light.r, dark.r, t), lerp(light.g, dark.g, t), lerp(light.b, dark.b, t)});
    }
    return p;
}

Palette parse_palette(std::string_view document) {
    Json j;
    try {
        j = Json::parse(document);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("palette: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("palette must be a JSON object");
    Palette p;
    for (const auto& [key, value] : j.items()) {
        std::size_t used = 0;
        unsigned long tier = 0;
        try {
            tier = std::stoul(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size() || tier == 0) throw std::invalid_argument("palette key \"" + key + "\" is not a tier count");
        if (!value.is_string() || !is_hex_color(value.get<std::string>()))
            throw std::invalid_argument("palette colour for tier " + key + " is not #RRGGBB");
        p[tier] = value.get<std::string>();
    }
    return p;
}

NavigatorLayer layer_from_summary(std::span<const TechniqueUsage> usages, const OverlapSummary& summary,
                                  const Palette& palette, const LayerMetadata& metadata) {
    for (const auto& [count, ids] : summary.tiers)
        if (!palette.contains(count)) throw MissingPaletteTier(count);

    NavigatorLayer layer;
    layer.name = metadata.name;
    layer.description = metadata.description;
    layer.versions = metadata.versions;

    for (const auto& u : usages) {
        auto it = palette.find(u.count);
        if (it == palette.end()) throw MissingPaletteTier(u.count);
        std::vector<std::string> groups = u.groups;
        std::sort(groups.begin(), groups.end());
        std::string comment;
        for (const auto& gid : groups) {
            if (!comment.empty()) comment += ", ";
            comment += gid;
        }
        layer.techniques.push_back({u.attack_id, u.count, it->second, std::move(comment)});
    }
    for (const auto& [count, ids] : summary.tiers)
        if (!ids.empty()) layer.legend.push_back({tier_label(count, summary.n_groups), palette.at(count)});
    return layer;
}

std::optional<std::string> check_layer(const NavigatorLayer& layer) {
    std::set<std::string> ids;
    std::set<std::string> legend_colors;
    for (const auto& item : layer.legend) {
        if (!is_hex_color(item.color)) return "legend colour \"" + item.color + "\" is not #RRGGBB";
        legend_colors.insert(item.color);
    }
    for (const auto& t : layer.techniques) {
        if (!ids.insert(t.technique_id).second) return "duplicate techniqueID " + t.technique_id;
        if (t.score < 1) return "score of " + t.technique_id + " is below 1";
        if (!is_hex_color(t.color)) return "colour \"" + t.color + "\" is not #RRGGBB";
        if (!legend_colors.contains(t.color)) return "colour " + t.color + " is missing from the legend";
    }
    return std::nullopt;
}

std::string write_layer(const NavigatorLayer& layer) {
    if (auto reason = check_layer(layer)) throw SerializationRefused(*reason);
    Json j = Json::object();
    j["name"] = layer.name;
    j["description"] = layer.description;
    j["domain"] = layer.domain;
    j["versions"] = {{"layer", layer.versions.layer},
                     {"attack", layer.versions.attack},
                     {"navigator", layer.versions.navigator}};
    Json techniques = Json::array();
    for (const auto& t : layer.techniques)
        techniques.push_back(
            {{"techniqueID", t.technique_id}, {"score", t.score}, {"color", t.color}, {"comment", t.comment}});
    j["techniques"] = std::move(techniques);
    Json legend = Json::array();
    for (const auto& l : layer.legend) legend.push_back({{"label", l.label}, {"color", l.color}});
    j["legendItems"] = std::move(legend);
    return j.dump(2, ' ', false) + "\n";
}

NavigatorLayer read_layer(std::string_view document) {
    Json j;
    try {
        j = Json::parse(document);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("layer: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("layer must be a JSON object");
    try {
        NavigatorLayer layer;
        layer.name = field(j, "name").get<std::string>();
        layer.description = j.value("description", "");
        layer.domain = field(j, "domain").get<std::string>();
        const Json& v = field(j, "versions");
        layer.versions = {v.value("layer", ""), v.value("attack", ""), v.value("navigator", "")};
        for (const auto& t : field(j, "techniques"))
            layer.techniques.push_back({field(t, "techniqueID").get<std::string>(),
                                        t.value("score", std::size_t{0}), t.value("color", ""),
                                        t.value("comment", "")});
        if (auto it = j.find("legendItems"); it != j.end())
            for (const auto& l : *it)
                layer.legend.push_back({field(l, "label").get<std::string>(), field(l, "color").get<std::string>()});
        return layer;
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("layer: ") + e.what());
    }
}

}  // namespace groupkb
