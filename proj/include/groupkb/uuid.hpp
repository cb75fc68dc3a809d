#pragma once

#include <string>
#include <string_view>

namespace groupkb {

// Namespace under which every object the enrichment step creates is named.
inline constexpr std::string_view kEnrichmentNamespace = "a8e38bdf-6f4b-4486-a6fd-5f56c92217e6";

// RFC-4122 version 5 (SHA-1, name-based) UUID in lowercase canonical form.
// `ns` must be a canonical UUID string.
std::string uuid_v5(std::string_view ns, std::string_view name);

}  // namespace groupkb
