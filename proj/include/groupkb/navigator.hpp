#pragma once

// ATT&CK Navigator layer files for the technique-overlap heatmap:
// light red for techniques used by one group, darker for more.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groupkb/analytics.hpp"

namespace groupkb {

struct LayerTechnique {
    std::string technique_id;
    std::size_t score = 0;
    std::string color;
    std::string comment;

    friend bool operator==(const LayerTechnique&, const LayerTechnique&) = default;
};

struct LegendItem {
    std::string label;
    std::string color;

    friend bool operator==(const LegendItem&, const LegendItem&) = default;
};

struct LayerVersions {
    std::string layer = "4.2";
    std::string attack = "9";
    std::string navigator = "4.3";

    friend bool operator==(const LayerVersions&, const LayerVersions&) = default;
};

struct LayerMetadata {
    std::string name = "Technique overlap";
    std::string description;
    LayerVersions versions;
};

struct NavigatorLayer {
    std::string name;
    std::string description;
    std::string domain = "enterprise-attack";
    LayerVersions versions;
    std::vector<LayerTechnique> techniques;
    std::vector<LegendItem> legend;

    friend bool operator==(const NavigatorLayer&, const NavigatorLayer&) = default;
};

// tier count -> "#RRGGBB"
using Palette = std::map<std::size_t, std::string>;

inline constexpr std::string_view kLightRed = "#FFC7C7";
inline constexpr std::string_view kRed = "#FF6666";
inline constexpr std::string_view kDarkRed = "#C00000";

// Three groups get the fixed light/mid/dark reds; any other n interpolates
// linearly from light (tier 1) to dark (tier n).
Palette default_palette(std::size_t n_groups);

// {"1": "#FFC7C7", "2": "#FF6666", ...}. Throws std::invalid_argument.
Palette parse_palette(std::string_view document);

bool is_hex_color(std::string_view s) noexcept;

// Throws MissingPaletteTier.
NavigatorLayer layer_from_summary(std::span<const TechniqueUsage> usages, const OverlapSummary& summary,
                                  const Palette& palette, const LayerMetadata& metadata);

// Empty when the layer satisfies its invariants.
std::optional<std::string> check_layer(const NavigatorLayer& layer);

// Canonical JSON (sorted keys, two-space indent, trailing newline).
// Throws SerializationRefused.
std::string write_layer(const NavigatorLayer& layer);

// Throws std::invalid_argument on documents that are not layer files.
NavigatorLayer read_layer(std::string_view document);

}  // namespace groupkb
